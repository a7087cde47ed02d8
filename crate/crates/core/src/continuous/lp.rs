//! Linear maximization over a knapsack polytope.
//!
//! Solves `max w·v` subject to `Σ_i c_r(i) v_i <= L_r` for every dimension and
//! `0 <= v <= 1`. One dimension is fractional knapsack and is solved by the
//! ratio greedy; more dimensions go through a dense tableau simplex. The
//! origin is always feasible, so no phase one is needed.

const PIVOT_EPS: f64 = 1e-12;

/// Maximizer of `w·v` over the polytope. Elements with `w_i <= 0` get 0.
pub fn maximize_linear(weights: &[f64], cost: &[Vec<f64>], budget: &[f64]) -> Vec<f64> {
    let active: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    let mut v = vec![0.0; weights.len()];
    if active.is_empty() {
        return v;
    }
    let sub = if cost.len() == 1 {
        fractional_knapsack(
            &active.iter().map(|&i| weights[i]).collect::<Vec<_>>(),
            &active.iter().map(|&i| cost[0][i]).collect::<Vec<_>>(),
            budget[0],
        )
    } else {
        let rows: Vec<Vec<f64>> = cost
            .iter()
            .map(|row| active.iter().map(|&i| row[i]).collect())
            .collect();
        simplex_box(&active.iter().map(|&i| weights[i]).collect::<Vec<_>>(), &rows, budget)
    };
    for (k, &i) in active.iter().enumerate() {
        v[i] = sub[k].clamp(0.0, 1.0);
    }
    v
}

/// Ratio greedy for one constraint. Zero-cost items come first; ties keep
/// index order.
pub fn fractional_knapsack(weights: &[f64], cost: &[f64], budget: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        // w_a / c_a > w_b / c_b  <=>  w_a c_b > w_b c_a for non-negative costs.
        let lhs = weights[a] * cost[b];
        let rhs = weights[b] * cost[a];
        rhs.partial_cmp(&lhs).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut v = vec![0.0; weights.len()];
    let mut left = budget;
    for i in order {
        if cost[i] <= 0.0 {
            v[i] = 1.0;
            continue;
        }
        if left <= 0.0 {
            break;
        }
        let take = (left / cost[i]).min(1.0);
        v[i] = take;
        left -= take * cost[i];
    }
    v
}

/// Tableau simplex with Bland's rule for
/// `max w·x, A x <= b, x <= 1, x >= 0` with `b >= 0`.
pub fn simplex_box(weights: &[f64], rows: &[Vec<f64>], budget: &[f64]) -> Vec<f64> {
    let n = weights.len();
    let m = rows.len() + n;
    let width = n + m + 1;
    // Row k < m is a constraint; row m is the objective (reduced costs).
    let mut t = vec![vec![0.0; width]; m + 1];
    for (r, row) in rows.iter().enumerate() {
        t[r][..n].copy_from_slice(row);
        t[r][n + r] = 1.0;
        t[r][width - 1] = budget[r].max(0.0);
    }
    for i in 0..n {
        let r = rows.len() + i;
        t[r][i] = 1.0;
        t[r][n + r] = 1.0;
        t[r][width - 1] = 1.0;
    }
    for i in 0..n {
        t[m][i] = weights[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..n + m).find(|&j| t[m][j] > PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            let a = t[r][enter];
            if a > PIVOT_EPS {
                let ratio = t[r][width - 1] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && basis[r] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        // Bounded by the x <= 1 rows, so a leaving row always exists.
        let Some(leave) = leave else { break };
        let pivot = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[leave].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r == leave {
                continue;
            }
            let factor = row[enter];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        basis[leave] = enter;
    }

    let mut x = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[r][width - 1].clamp(0.0, 1.0);
        }
    }
    x
}
