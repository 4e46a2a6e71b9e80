use std::path::PathBuf;
use std::process::Command;

use jumpvar::harness::*;
use jumpvar::oscillatory::{vdc_1d, AmplitudeSpec, PhaseSpec};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jumpvar")).args(args).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn single_atom_seminorm_is_root_two() {
    let cfg = ExperimentConfig::load(&configs().join("jump_seminorm.json")).unwrap();
    let t = run(&cfg).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert!((t.rows[0].measured - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn tables_round_trip_through_both_formats() {
    let cfg = ExperimentConfig::load(&configs().join("jump_count.json")).unwrap();
    let t = run(&cfg).unwrap();
    assert!(!t.rows.is_empty());
    for format in [Format::Csv, Format::Json] {
        let back = ResultTable::parse(&t.render(format), format).unwrap();
        assert_eq!(back, t);
    }
}

#[test]
fn provenance_hash_ignores_the_output_path() {
    let mut cfg = ExperimentConfig::load(&configs().join("jump_count.json")).unwrap();
    let a = run(&cfg).unwrap().provenance;
    cfg.output = Some(PathBuf::from("elsewhere.csv"));
    let b = run(&cfg).unwrap().provenance;
    assert_eq!(a.config_sha256, b.config_sha256);
    assert_eq!(a.config_sha256.len(), 64);
    cfg.seed += 1;
    assert_ne!(run(&cfg).unwrap().provenance.config_sha256, a.config_sha256);
}

#[test]
fn empty_corpus_reports_zero_checks() {
    let cfg = ExperimentConfig::from_json(
        r#"{"experiment": {"kind": "jump-corpus", "paths": 0, "max_len": 8, "lambdas": [1], "exponents": [2]}}"#,
    )
    .unwrap();
    let t = run(&cfg).unwrap();
    assert_eq!(t.rows.len(), 4);
    assert!(t.rows.iter().all(|r| r.measured == 0.0 && !r.flagged && r.extras.iter().all(|x| *x == 0.0)));
}

#[test]
fn vdc_sweep_rows_agree_with_direct_evaluation() {
    let cfg = ExperimentConfig::load(&configs().join("vdc.json")).unwrap();
    let t = run(&cfg).unwrap();
    let row = t
        .rows_with_id("linear-indicator")
        .find(|r| r.params.iter().any(|p| *p == Param::from(10.0)))
        .unwrap();
    let direct = vdc_1d(&PhaseSpec::monomial(10.0, 1, 0.0, 1.0), &AmplitudeSpec::indicator_1d(0.0, 1.0)).unwrap();
    assert_eq!(row.measured, direct.lhs);
}

#[test]
fn cli_writes_to_the_requested_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let cfg = configs().join("variation.json");
    let o = cli(&["variation", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let t = ResultTable::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t.experiment, "variation");
}

#[test]
fn cli_seed_override_changes_only_the_seed() {
    let cfg = configs().join("corpus.json");
    let small = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(cfg).unwrap().replace("10000", "50");
    let path = write_config(&small, "c.json", &text);
    let a = cli(&["corpus", "--config", &path, "--seed", "3"]);
    let b = cli(&["corpus", "--config", &path, "--seed", "3"]);
    let c = cli(&["corpus", "--config", &path, "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("# seed 3"));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // wrong subcommand for the config
    let cfg = configs().join("jump_count.json");
    assert_eq!(cli(&["variation", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    // malformed and invalid configs
    let bad = write_config(&dir, "bad.json", "{\"experiment\": ");
    assert_eq!(cli(&["run", "--config", &bad]).status.code(), Some(2));
    let unknown = write_config(&dir, "unknown.json", r#"{"experiment": {"kind": "jump-count", "paths": [], "values": [1]}, "colour": 1}"#);
    assert_eq!(cli(&["run", "--config", &unknown]).status.code(), Some(2));
    // missing file
    let missing = dir.path().join("none.json");
    assert_eq!(cli(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
    // quadrature that cannot be carried out within budget
    let huge = write_config(
        &dir,
        "huge.json",
        r#"{"experiment": {"kind": "vdc-sweep", "scales": [1], "corpus": [{"id": "x", "radius": 2,
            "phase": {"kind": "polynomial", "terms": [{"alpha": [1, 1], "coef": 1e9}]},
            "amplitude": {"kind": "indicator", "lower": [0, 0], "upper": [0.5, 0.5]}}]}}"#,
    );
    let o = cli(&["vdc", "--config", &huge]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
