use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strip-pressure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_exit_codes_follow_the_gate() {
    let pass = cli(&["check", "hard_core a=1.0"]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).contains("applicability: PASS"));

    let fail = cli(&["check", "hard_core a=1.3"]);
    assert_eq!(fail.status.code(), Some(2));
    assert!(stdout(&fail).contains("applicability: FAIL"));

    let ising = cli(&["check", "ising beta=0.02 h=0"]);
    assert_eq!(ising.status.code(), Some(0));
    assert!(stdout(&ising).contains("ising_condition=true"));
}

#[test]
fn simulated_threshold_prints_banner() {
    let o = cli(&["check", "hard_core a=1.3", "--pc", "0.5927"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NON-RIGOROUS"));
    let o = cli(&[
        "run",
        "hard_square",
        "--n-min",
        "1",
        "--n-max",
        "3",
        "--pc",
        "0.5927",
    ]);
    assert!(stdout(&o).contains("NON-RIGOROUS"));
}

#[test]
fn run_writes_csv_with_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = cli(&[
        "run",
        "hard_square",
        "--n-min",
        "1",
        "--n-max",
        "6",
        "--tol",
        "1e-13",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut data = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        data.next().unwrap(),
        "n,columns,log_lambda,lambda_lo,lambda_hi,diff,identity_residual,wall_ms"
    );
    let first: Vec<&str> = data.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "2");
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((first[2].parse::<f64>().unwrap() - log_phi).abs() < 1e-12);
    assert!(text.contains("# gate.passes=true"));
    assert_eq!(data.count(), 5);
}

#[test]
fn gate_failure_blocks_run_unless_forced() {
    let args = ["run", "hard_core a=1.3", "--n-min", "1", "--n-max", "3"];
    assert_eq!(cli(&args).status.code(), Some(2));
    let mut forced = args.to_vec();
    forced.push("--force");
    let o = cli(&forced);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not certified"));
}

#[test]
fn numerical_failure_exits_with_three() {
    let o = cli(&[
        "run",
        "checkerboard k=3",
        "--n-min",
        "2",
        "--n-max",
        "4",
        "--method",
        "cyclic",
        "--force",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not mixing"));

    let o = cli(&[
        "run",
        "hard_square",
        "--n-min",
        "1",
        "--n-max",
        "30",
        "--max-columns",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_errors_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "[alphabet]\nsymbols = [\"0\", \"1\"]\n[e1]\nallowed = [[\"0\", \"7\"]]\n",
    )
    .unwrap();
    assert_eq!(
        cli(&["check", bad.to_str().unwrap()]).status.code(),
        Some(4)
    );
    assert_eq!(cli(&["check", "no_such_model"]).status.code(), Some(4));
    let o = cli(&[
        "run",
        "hard_square",
        "--n-min",
        "1",
        "--n-max",
        "3",
        "--t",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn entropy_of_full_shift_is_log_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = cli(&[
        "entropy",
        "zero k=2",
        "--n-min",
        "1",
        "--n-max",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("topological entropy estimate"));
    let text = fs::read_to_string(&out).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let diff = line.split(',').nth(5).unwrap();
        if !diff.is_empty() {
            assert!((diff.parse::<f64>().unwrap() - 2f64.ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn model_file_with_periodic_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cb.toml");
    fs::write(
        &path,
        "builtin = \"checkerboard k=4\"\n[boundary]\nt = \"1 2\"\nb = \"2 1\"\n",
    )
    .unwrap();
    // at height 1 these rows leave two disjoint 3/4 cycles
    let o = cli(&[
        "entropy",
        path.to_str().unwrap(),
        "--n-min",
        "2",
        "--n-max",
        "4",
        "--method",
        "cyclic",
        "--force",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("block length p = 2 (cyclic)"));
}

#[test]
fn eigen_report_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("a.txt");
    let o = cli(&[
        "eigen-report",
        "hard_square",
        "--n",
        "3",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("columns: 5 raw, 5 after trimming"));
    assert!(s.contains("identity residual"));
    let edges = fs::read_to_string(&dump).unwrap();
    // pairs of the 5 columns 000, 001, 010, 100, 101 with no common 1
    assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 17);
}

#[test]
fn checkpoint_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.csv");
    let ck = ck.to_str().unwrap();
    let base = ["run", "hard_square", "--n-min", "1", "--checkpoint", ck];
    let mut first = base.to_vec();
    first.extend(["--n-max", "4"]);
    assert_eq!(cli(&first).status.code(), Some(0));
    let mut second = base.to_vec();
    second.extend(["--n-max", "7"]);
    assert_eq!(cli(&second).status.code(), Some(0));
    let rows = fs::read_to_string(ck).unwrap();
    assert_eq!(rows.lines().filter(|l| !l.starts_with('#')).count(), 8);
    let mut other = vec!["run", "hard_core a=0.5", "--n-min", "1", "--checkpoint", ck];
    other.extend(["--n-max", "7"]);
    assert_eq!(cli(&other).status.code(), Some(4));
}
