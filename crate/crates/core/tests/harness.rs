use std::fs;
use std::path::Path;

use rarewave::harness::{emit_plots, parse_config, parse_study, run_study, RunConfig, RunStatus, StudyKind};
use rarewave::Error;

const TINY: &str = "\
[grid]
n1 = 96
n2 = 8
[run]
delta = 0.25
t_star = 0.5
u_star = 1.2
[analysis]
levels = 3
max_order = 1
step = 0.1
";

fn tiny(out: &Path) -> RunConfig {
    let mut cfg = parse_config(TINY).unwrap();
    cfg.output = Some(out.to_path_buf());
    cfg
}

#[test]
fn defaults_are_valid() {
    let cfg = parse_config("").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!((cfg.gamma, cfg.n1, cfg.n2), (2.0, 1024, 128));
    cfg.validate().unwrap();
}

#[test]
fn bad_values_name_their_line() {
    match parse_config("# gas\n[gas]\ngamma = 5\n") {
        Err(Error::ConfigLine { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    // Beyond the vacuum width (gamma + 1) / (gamma - 1) c0 = 3.
    assert!(parse_config("u_star = 3.5\n").unwrap_err().is_config());
    assert!(parse_config("no_such_key = 1\n").is_err());
    assert!(parse_config("[nowhere]\n").is_err());
    assert!(parse_config("n1 = lots\n").is_err());
}

#[test]
fn keys_are_accepted_with_and_without_sections() {
    let a = parse_config("lag_cells = 0.25\nreconstruction = constant\n").unwrap();
    let b = parse_config("[analysis]\nlag_cells = 0.25\n[solver]\nreconstruction = constant\n").unwrap();
    assert_eq!(a, b);
    assert_eq!(a.analysis.lag_cells, 0.25);
    let m = parse_config("mode = potential, 1.0, 3, 0.2, 0.1\n").unwrap();
    assert_eq!(m.modes.len(), 1);
    assert!(parse_config("mode = potential, 1.0\n").is_err());
}

#[test]
fn study_specs() {
    let s = parse_study("kind = epsilon_scaling\nladder = 0.02, 0.01\nworkers = 2\n").unwrap();
    assert_eq!(s.kind, StudyKind::EpsilonScaling);
    assert_eq!(s.ladder, vec![0.02, 0.01]);
    assert!(parse_study("ladder = 1, 2\n").is_err());
    assert!(parse_study("kind = convergence\nladder = 64\n").is_err());
}

#[test]
fn tiny_study_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let base = tiny(dir.path());
    let spec = parse_study("kind = epsilon_scaling\nladder = 0.02, 0.01, 2.0\nworkers = 2\n").unwrap();

    let first = run_study(&spec, &base).unwrap();
    assert_eq!(first.runs.len(), 3);
    for r in &first.runs {
        let manifest = fs::read_to_string(r.dir.join("MANIFEST")).unwrap();
        if r.label == "eps-2" {
            // A perturbation this large pushes the data out of the domain.
            assert_eq!(r.status, RunStatus::Failed);
            assert!(manifest.contains("failed"), "{manifest}");
        } else {
            assert_eq!(r.status, RunStatus::Complete, "{:?}", r.error);
            assert!(manifest.contains("complete"));
            for f in ["config.json", "result.json", "energy.csv", "windows.csv"] {
                assert!(r.dir.join(f).exists(), "{f}");
            }
            assert!(!r.reused);
        }
    }
    for f in ["report.json", "runs.csv", "checks.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!first.checks.is_empty());
    let plots = emit_plots(&first).unwrap();
    assert!(plots.len() >= 6, "{plots:?}");

    let energy = |rep: &rarewave::harness::StudyReport| {
        let r = rep.runs.iter().find(|r| r.label == "eps-0.01").unwrap();
        fs::read(r.dir.join("energy.csv")).unwrap()
    };
    let before = energy(&first);

    // Completed members are reused; the failed one is retried.
    let second = run_study(&spec, &base).unwrap();
    for r in &second.runs {
        assert_eq!(r.reused, r.label != "eps-2", "{}", r.label);
    }
    assert_eq!(energy(&second), before);

    // A fresh directory reproduces the outputs byte for byte.
    let other = tempfile::tempdir().unwrap();
    let third = run_study(&spec, &tiny(other.path())).unwrap();
    assert_eq!(energy(&third), before);
}
