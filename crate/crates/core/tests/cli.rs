use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("exlevy-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn exlevy(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exlevy"))
        .args(["--out-dir", dir.to_str().unwrap()])
        .args(args)
        .env_remove("EXLEVY_THREADS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const PAIR: &str = r#"{"x": {"family": "brownian_drift", "params": {"sigma": 1, "mu": 0.5}},
                      "y": {"family": "symmetric_stable", "params": {"alpha": 1.5, "scale": 1}}}"#;

#[test]
fn check_reports_existence() {
    let dir = scratch("check");
    let cfg = write(&dir, "pair.json", PAIR);
    let out = exlevy(&dir, &["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "exists");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("check.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["verdict"], "exists");
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    assert!(doc["toolkit_version"].is_string());
    assert_eq!(doc["config"]["command"], "check");
}

#[test]
fn divergence_is_a_determined_verdict() {
    let dir = scratch("diverge");
    let cfg = write(&dir, "pair.json", &PAIR.replace("0.5", "-0.5"));
    let out = exlevy(&dir, &["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "diverges");
}

#[test]
fn unknown_family_is_a_usage_error_with_path() {
    let dir = scratch("unknown");
    let cfg = write(&dir, "pair.json", &PAIR.replace("symmetric_stable", "cauchy"));
    let out = exlevy(&dir, &["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("y") && err.contains("cauchy"), "{err}");
}

#[test]
fn invalid_parameter_names_its_path() {
    let dir = scratch("badparam");
    let cfg = write(&dir, "pair.json", &PAIR.replace("\"alpha\": 1.5", "\"alpha\": 2.5"));
    let out = exlevy(&dir, &["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("y.params.alpha"));
}

#[test]
fn missing_subcommand_and_unknown_theorem_exit_3() {
    let dir = scratch("usage");
    assert_eq!(exlevy(&dir, &[]).status.code(), Some(3));
    assert_eq!(exlevy(&dir, &["verify", "--theorem", "9.9"]).status.code(), Some(3));
    assert_eq!(exlevy(&dir, &["--version"]).status.code(), Some(0));
}

#[test]
fn verify_atoms_writes_side_table() {
    let dir = scratch("atoms-verify");
    let out = exlevy(&dir, &["verify", "--theorem", "3.2iii"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("verify_3.2iii.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["overall"], "pass");
    let csv = fs::read_to_string(dir.join("atoms_3.2iii.csv")).unwrap();
    assert!(csv.starts_with("# exlevy "));
    assert!(csv.contains("config_hash="));
}

#[test]
fn atoms_command_writes_csv() {
    let dir = scratch("atoms");
    let y = write(&dir, "y.json", r#"{"family": "compound_poisson_integer", "params": {"rate": 1, "jump_pmf": {"-1": 0.5, "1": 0.5}}}"#);
    let out = exlevy(&dir, &["atoms", "--a", "1", "--y", &y, "--nmax", "2", "--kmax", "5", "--out", "atoms.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("atoms.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# exlevy "));
    assert_eq!(lines.next().unwrap(), "n,k,point,mass,quadrature_error,flagged");
    assert_eq!(lines.count(), 3 * 10);
}

#[test]
fn sample_output_is_identical_across_thread_counts() {
    let dir = scratch("threads");
    let cfg = write(&dir, "euler.json", PAIR);
    let run = |threads: &str| {
        let out_dir = dir.join(threads);
        fs::create_dir_all(&out_dir).unwrap();
        let o = exlevy(&out_dir, &["--seed", "4", "--threads", threads, "sample", "--method", "euler", "--config", &cfg, "--n", "3000", "--out", "z.csv"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out_dir.join("z.csv")).unwrap()
    };
    let one = run("1");
    assert!(one == run("4"));
    assert!(one == run("16"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 2 + 3000);
}

#[test]
fn seed_changes_samples_and_hash() {
    let dir = scratch("seeds");
    let cfg = write(&dir, "d.json", r#"{"a_coef": 1, "b_coef": 1.5}"#);
    let run = |seed: &str| {
        let o = exlevy(&dir, &["--seed", seed, "sample", "--method", "dufresne", "--config", &cfg, "--n", "10", "--out", "d.csv"]);
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(dir.join("d.csv")).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_ne!(a.lines().next(), b.lines().next());
    assert_ne!(a, b);
    assert_eq!(a, run("1"));
}

#[test]
fn conflicting_method_is_rejected() {
    let dir = scratch("method");
    let cfg = write(&dir, "d.json", r#"{"method": "dufresne", "a_coef": 1, "b_coef": 1.5}"#);
    let o = exlevy(&dir, &["sample", "--method", "euler", "--config", &cfg, "--n", "10", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}
