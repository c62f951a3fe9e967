use std::path::PathBuf;
use std::process::{Command, Output};

fn job_file(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithsupport")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const DIFF_JOB: &str = "kind = \"diff\"\nP = \"theta\"\nQ = \"t*3\"\nprimes = [5, 7]\nt_order = 3\n";

#[test]
fn diff_job_passes_and_is_reproducible() {
    let cfg = job_file("diff.toml", DIFF_JOB);
    let a = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(json["ok"], true);
    assert_eq!(json["schema"], 1);
    assert!(json["records"].as_array().unwrap().iter().all(|r| r["match"] == true && r["anchor"].is_string()));
    assert!(json.get("timings").is_none());
    let b = run(&["--config", cfg.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn malformed_operator_exits_2_with_location() {
    let cfg = job_file("bad.toml", "kind = \"diff\"\nP = \"theta + (x\"\nprimes = [5]\n");
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 10"));
}

#[test]
fn bad_config_exits_2() {
    let cfg = job_file("badprime.toml", "kind = \"diff\"\nP = \"theta\"\nprimes = [9]\n");
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["monodromy"]).status.code(), Some(2));
}

#[test]
fn experiment_arith_reports_c4() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("arith.json");
    let o = run(&["experiment", "arith", "--max-n", "6", "--out", out.to_str().unwrap(), "--verbose"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"c_4\": \"-101/576\""));
    assert!(text.contains("\"timings\""));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("W_4"));
}

#[test]
fn subcommand_kind_mismatch_exits_2() {
    let cfg = job_file("diff2.toml", DIFF_JOB);
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "qmonodromy"]).status.code(), Some(2));
}

#[test]
fn random_mode_seed_is_echoed() {
    let cfg = job_file("rand.toml", &format!("{DIFF_JOB}mode = \"random\"\ntrials = 3\n"));
    let o = run(&["--config", cfg.to_str().unwrap(), "--seed", "42", "verify", "det"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["seed"], 42);
}
