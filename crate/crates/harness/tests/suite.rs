use std::path::Path;

use knapsub_harness::suite::{run_suite, SuiteConfig, COLUMNS};

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

fn load(name: &str) -> SuiteConfig {
    SuiteConfig::from_json(&std::fs::read_to_string(fixtures().join(name)).unwrap()).unwrap()
}

#[test]
fn empty_config_gives_header_only() {
    let report = run_suite(&SuiteConfig::from_json("{}").unwrap(), fixtures());
    assert!(report.rows.is_empty());
    assert_eq!(report.to_csv_string(true), format!("{}\n", COLUMNS.join(",")));
}

#[test]
fn one_instance_two_algorithms_three_seeds() {
    let cfg = SuiteConfig::from_json(
        r#"{"instances":[{"file":"tiny_modular.json"}],"algorithms":["randomized","deterministic"],"seeds":[1,2,3]}"#,
    )
    .unwrap();
    let report = run_suite(&cfg, fixtures());
    assert_eq!(report.rows.len(), 6);
    let order: Vec<(&str, u64)> = report.rows.iter().map(|r| (r.algorithm.name(), r.seed)).collect();
    assert_eq!(
        order,
        [
            ("randomized", 1),
            ("randomized", 2),
            ("randomized", 3),
            ("deterministic", 1),
            ("deterministic", 2),
            ("deterministic", 3)
        ]
    );
}

#[test]
fn golden_csv_is_stable() {
    let report = run_suite(&load("golden_suite.json"), fixtures());
    let golden = std::fs::read_to_string(fixtures().join("golden_suite.csv")).unwrap();
    assert_eq!(report.to_csv_string(false), golden);
}

#[test]
fn rows_are_feasible_and_ratios_bounded() {
    let report = run_suite(&load("golden_suite.json"), fixtures());
    for row in &report.rows {
        assert!(row.error.is_none(), "{row:?}");
        assert_eq!(row.feasible, Some(true));
        assert_eq!(row.ratio.is_some(), row.opt.is_some());
        assert!(row.ratio.unwrap() <= 1.0 + 1e-9);
    }
    let summary = report.summary();
    assert_eq!(summary.len(), 4);
    assert!(summary.iter().all(|s| s.rows == 4 && s.with_opt == 4));
}

#[test]
fn missing_file_is_a_row_error_and_the_suite_continues() {
    let cfg = SuiteConfig::from_json(
        r#"{"instances":[{"file":"nope.json"},{"file":"tiny_modular.json"}],"algorithms":["bruteforce"]}"#,
    )
    .unwrap();
    let report = run_suite(&cfg, fixtures());
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows[0].error.as_deref().unwrap().contains("nope.json"));
    assert_eq!(report.rows[1].value, Some(3.0));
}

#[test]
fn rerun_reproduces_non_timing_columns() {
    let cfg = load("golden_suite.json");
    let a = run_suite(&cfg, fixtures()).to_csv_string(false);
    let b = run_suite(&cfg, fixtures()).to_csv_string(false);
    assert_eq!(a, b);
}
