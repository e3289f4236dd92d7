use std::path::Path;
use std::process::{Command, Output};

fn traject(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traject"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRAJECT_OUT_DIR")
        .output()
        .unwrap()
}

fn quantity(csv: &str, name: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("{name} missing in\n{csv}"))
        .parse()
        .unwrap()
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), "seed = 9\n[params]\nn_traj = 400\nn_steps = 300\n").unwrap();
    for out in ["a", "b"] {
        assert!(traject(&["run", "bernoulli", "--config", "b.toml", "--out", out], dir.path()).status.success());
    }
    let read = |o: &str| std::fs::read(dir.path().join(o).join("bernoulli.csv")).unwrap();
    assert_eq!(read("a"), read("b"));

    // --seed overrides the config
    assert!(traject(&["run", "bernoulli", "--config", "b.toml", "--out", "c", "--seed", "10"], dir.path()).status.success());
    assert_ne!(read("a"), read("c"));
}

#[test]
fn unknown_key_is_a_schema_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "seed = 1\n[params]\nn_traj = 10\nn_trajs = 5\n").unwrap();
    let out = traject(&["run", "bernoulli", "--config", "bad.toml", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("n_trajs"), "{err}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn wrong_scenario_name_in_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "scenario = \"decay\"\n").unwrap();
    let out = traject(&["run", "epr", "--config", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_scenario_and_missing_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(traject(&["run", "nope", "--config", "x.toml"], dir.path()).status.code(), Some(2));
    assert_eq!(traject(&["run", "epr", "--config", "x.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn listing_is_complete_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = traject(&["list-scenarios"], dir.path());
    let b = traject(&["list-scenarios"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter(|l| !l.is_empty() && !l.starts_with(' ')).collect();
    assert_eq!(
        names,
        ["bernoulli", "scattering", "flipper", "decay", "stern-gerlach", "epr", "two-slit", "bigbang"]
    );
    let decay = text.split("\n\n").find(|b| b.starts_with("decay")).unwrap();
    for key in ["m1 ", "m2 ", "m3 ", "c ", "x1 "] {
        assert!(decay.contains(&format!("    {key}")), "{key} missing from\n{decay}");
    }
    assert!(decay.lines().any(|l| l.trim_start().starts_with("x1") && l.contains("required")));
}

#[test]
fn bernoulli_and_epr_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), "seed = 2\n").unwrap();
    std::fs::write(dir.path().join("e.toml"), "").unwrap();
    assert!(traject(&["run", "bernoulli", "--config", "b.toml", "--out", "o"], dir.path()).status.success());
    assert!(traject(&["run", "epr", "--config", "e.toml", "--out", "o"], dir.path()).status.success());
    let b = std::fs::read_to_string(dir.path().join("o/bernoulli.csv")).unwrap();
    assert!((quantity(&b, "mean_yes_rate") - 0.5).abs() < 0.01);
    let e = std::fs::read_to_string(dir.path().join("o/epr.csv")).unwrap();
    assert!((quantity(&e, "chsh_singlet").abs() - 2.828427).abs() < 1e-6);
    assert!(dir.path().join("o/epr_manifest.toml").exists());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("e.toml"), "").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_traject"))
        .args(["run", "epr", "--config", "e.toml"])
        .current_dir(dir.path())
        .env("TRAJECT_OUT_DIR", "from-env")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("from-env/epr.csv").exists());
}
