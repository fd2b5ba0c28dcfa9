use std::fs;

use strip_pressure::pressure::parse_csv;
use strip_pressure::{builtin, load_model, parse_model, run_pressure, Error, RunConfig};

fn hard_square_run(n_max: usize) -> RunConfig {
    let mut cfg = RunConfig::new(builtin("hard_square").unwrap(), 2, n_max).unwrap();
    cfg.rel_tol = 1e-13;
    cfg
}

#[test]
fn csv_round_trips_exactly() {
    let run = run_pressure(&hard_square_run(7)).unwrap();
    let parsed = parse_csv(&run.to_csv_string()).unwrap();
    assert_eq!(parsed.rows, run.rows);
    assert_eq!(parsed.diffs, run.diffs);
    assert_eq!(parsed.metadata, run.metadata());
    let est = parsed
        .metadata
        .iter()
        .find(|(k, _)| k == "estimate")
        .unwrap();
    assert_eq!(est.1.parse::<f64>().unwrap(), run.estimate);
}

#[test]
fn csv_header_and_blank_last_diff() {
    let run = run_pressure(&hard_square_run(4)).unwrap();
    let text = run.to_csv_string();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "n,columns,log_lambda,lambda_lo,lambda_hi,diff,identity_residual,wall_ms"
    );
    let last = text.lines().last().unwrap();
    assert_eq!(last.split(',').nth(5), Some(""));
}

#[test]
fn saved_csv_matches_string() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let run = run_pressure(&hard_square_run(4)).unwrap();
    run.save_csv(&path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), run.to_csv_string());
    assert!(!path.with_extension("tmp").exists());
}

#[test]
fn checkpoint_resume_reuses_rows() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.csv");
    let mut cfg = hard_square_run(6);
    cfg.checkpoint = Some(ck.clone());
    let first = run_pressure(&cfg).unwrap();
    assert!(ck.exists());

    cfg.n_max = 9;
    let second = run_pressure(&cfg).unwrap();
    // reused rows keep their original timings
    assert_eq!(&second.rows[..first.rows.len()], &first.rows[..]);
    assert_eq!(second.rows.len(), 8);
    assert_eq!(second.first_untrimmed_n, first.first_untrimmed_n);

    let fresh = run_pressure(&hard_square_run(9)).unwrap();
    for (a, b) in second.rows.iter().zip(&fresh.rows) {
        assert_eq!(a.log_lambda, b.log_lambda);
        assert_eq!(a.columns, b.columns);
    }
}

#[test]
fn checkpoint_from_other_model_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.csv");
    let mut cfg = hard_square_run(4);
    cfg.checkpoint = Some(ck.clone());
    run_pressure(&cfg).unwrap();

    let mut other = RunConfig::new(builtin("hard_core a=0.5").unwrap(), 2, 4).unwrap();
    other.rel_tol = 1e-13;
    other.checkpoint = Some(ck);
    let err = run_pressure(&other).unwrap_err();
    assert!(matches!(err, Error::Input(_)), "{err}");
}

#[test]
fn model_file_matches_builtin() {
    let text = r#"
name = "hard square by hand"

[alphabet]
symbols = ["0", "1"]

[e1]
forbidden = [["1", "1"]]

[e2]
forbidden = [["1", "1"]]

[interaction]
vertex = { "1" = "-log(0.5)" }

[boundary]
t = "0"
b = "0"
"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hc.toml");
    fs::write(&path, text).unwrap();
    let from_file = load_model(path.to_str().unwrap()).unwrap();
    let from_builtin = load_model("hard_core a=0.5").unwrap();

    let run = |m| {
        let mut cfg = RunConfig::new(m, 1, 5).unwrap();
        cfg.rel_tol = 1e-13;
        run_pressure(&cfg).unwrap()
    };
    let (a, b) = (run(from_file), run(from_builtin));
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.columns, y.columns);
        assert!((x.log_lambda - y.log_lambda).abs() < 1e-12);
    }
}

#[test]
fn builtin_section_with_boundary_override() {
    let m = parse_model(
        r#"
builtin = "ising beta=0.02 h=0"

[boundary]
t = ["+1", "-1"]
b = "+1"
"#,
    )
    .unwrap();
    assert_eq!(m.top.unwrap().period(), 2);
    assert_eq!(m.bottom.unwrap().period(), 1);
}

#[test]
fn parse_errors_exit_with_four() {
    let bad = [
        "[alphabet]\nsymbols = [\"0\", \"0\"]",
        "[alphabet]\nsymbols = [\"0\", \"1\"]\n[e1]\nallowed = [[\"0\", \"2\"]]",
        "[mystery]\nx = 1",
        "builtin = \"hard_core\"",
        "builtin = \"hard_square\"\n[alphabet]\nsymbols = [\"0\"]",
        "not toml at all [",
    ];
    for text in bad {
        let err = parse_model(text).unwrap_err();
        assert_eq!(err.exit_code(), 4, "{text:?}: {err}");
    }
    assert_eq!(load_model("no_such_model").unwrap_err().exit_code(), 4);
}
