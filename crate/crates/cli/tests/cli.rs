use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scleq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scleq")).current_dir(root()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unsatisfiable_exits_zero() {
    let o = scleq(&["problems/refutation.scl"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("status: Unsatisfiable"));
    assert!(stdout(&o).contains("rule=Conflict"));
}

#[test]
fn bounded_model_exits_one() {
    let o = scleq(&["problems/saturation.scl"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("status: BoundedModel"));
    assert!(out.contains("beta: f(f(g(a)))"));
    assert!(out.contains("trail:"));
}

#[test]
fn step_limit_exits_two() {
    let o = scleq(&["--max-steps", "1", "problems/intro.scl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("status: ResourceOut"));
}

#[test]
fn input_errors_exit_three() {
    let dir = std::env::temp_dir().join(format!("scleq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.scl");
    std::fs::write(&bad, "sig f/1 a/0;\nclause f(a,a) = a;\n").unwrap();
    let o = scleq(&[bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());

    let fof = dir.join("bad.p");
    std::fs::write(&fof, "fof(ax, axiom, ![X]: X = X).\n").unwrap();
    let o = scleq(&["--format", "tptp-cnf", fof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = scleq(&["problems/does_not_exist.scl"]);
    assert_eq!(o.status.code(), Some(3));

    let o = scleq(&["--beta", "X", "problems/intro.scl"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tptp_input() {
    let o = scleq(&["--format", "tptp-cnf", "problems/refutation.p"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("beta: f(f(a))"));

    let o = scleq(&["--format", "tptp-cnf", "--beta", "f(f(f(b)))", "problems/refutation.p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("status: Unsatisfiable"));
}

#[test]
fn trace_goes_to_file() {
    let path = std::env::temp_dir().join(format!("scleq-trace-{}.txt", std::process::id()));
    let o = scleq(&["--trace", path.to_str().unwrap(), "problems/refutation.scl"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("rule="));
    let trace = std::fs::read_to_string(&path).unwrap();
    assert!(trace.lines().any(|l| l.starts_with("rule=Conflict")));
    std::fs::remove_file(&path).ok();
}

#[test]
fn audit_runs_clean() {
    let o = scleq(&["--audit", "problems/intro.scl"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = Command::new(env!("CARGO_BIN_EXE_scleq"))
        .current_dir(root())
        .env("SCLEQ_AUDIT", "1")
        .arg("problems/pair.scl")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stderr.is_empty());
}

#[test]
fn grow_and_seed_are_deterministic() {
    let a = scleq(&["--grow", "2", "--seed", "7", "problems/smaller_eq.scl"]);
    let b = scleq(&["--grow", "2", "--seed", "7", "problems/smaller_eq.scl"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(matches!(a.status.code(), Some(0..=2)));
}
