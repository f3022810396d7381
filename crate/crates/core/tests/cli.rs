use std::process::Command;

use quasidiag::experiment::read_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasidiag"))
}

#[test]
fn writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = bin()
        .args(["--dim", "2", "--levels", "2", "--no-timing", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let rows = read_csv(&out).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.num_elements).collect::<Vec<_>>(),
        vec![12, 48]
    );
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert_eq!(stdout, std::fs::read_to_string(&out).unwrap());
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["--dim", "3", "--refine", "adaptive"],
        vec!["--dim", "5"],
        vec!["--theta", "2"],
        vec!["--space", "h1"],
        vec!["--levels", "0"],
        vec!["--bogus"],
    ] {
        let code = bin().args(&args).output().unwrap().status.code();
        assert_eq!(code, Some(2), "{args:?}");
    }
}

#[test]
fn eigenvalue_failure_exits_three_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let output = bin()
        .args([
            "--dim",
            "2",
            "--levels",
            "3",
            "--max-iter",
            "2",
            "--tol",
            "1e-14",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("level,nE,dofs,condDiag,condP,lmin,lmax,seconds\n"));
}

#[test]
fn dumps_matrix_market_files() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--dim",
            "3",
            "--levels",
            "1",
            "--degree",
            "1",
            "--dump-matrices",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let inc = quasidiag::matrix_market::read_matrix(dir.path().join("level1_I.mtx")).unwrap();
    assert_eq!(inc.nrows(), 24);
}
