use std::process::Command;

fn hml(args: &[&str], dir: &std::path::Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hml")).args(args).current_dir(dir).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn json(path: std::path::PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_u_writes_profile_and_sidecar() {
    let d = tempfile::tempdir().unwrap();
    let (code, err) = hml(&["solve-u", "--nodes", "2000", "--out", "u.csv"], d.path());
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(d.path().join("u.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# hml"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "r,u,du_dr");
    assert_eq!(lines.count(), 2000);
    let v = json(d.path().join("u.json"));
    assert_eq!(v["config"]["profile"]["nodes"], 2000);
    assert_eq!(v["result"]["bessel_match"]["flagged"], false);
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn usage_errors_exit_64() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(hml(&["no-such-command"], d.path()).0, 64);
    assert_eq!(hml(&["solve-u", "--nodes", "ten"], d.path()).0, 64);
    assert_eq!(hml(&["solve-u", "--nodes", "10"], d.path()).0, 64);
    assert_eq!(hml(&["periods", "--q2", "1,2,1"], d.path()).0, 64);
    assert_eq!(hml(&["--help"], d.path()).0, 0);
    assert_eq!(hml(&["--version"], d.path()).0, 0);
}

#[test]
fn thread_variable_is_validated() {
    let d = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hml"))
        .args(["identity-check", "--count", "3"])
        .env("HML_THREADS", "zero")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = Command::new(env!("CARGO_BIN_EXE_hml"))
        .args(["identity-check", "--count", "3"])
        .env("HML_THREADS", "2")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn identity_and_gauge_checks_pass() {
    let d = tempfile::tempdir().unwrap();
    let (code, err) = hml(&["identity-check", "--count", "12", "--out", "i.json"], d.path());
    assert_eq!(code, 0, "{err}");
    let v = json(d.path().join("i.json"));
    assert_eq!(v["result"]["instances"], 12);
    let (code, err) = hml(&["gauge-fix", "--n", "4", "--ell", "2", "--two-coordinate", "--count", "3"], d.path());
    assert_eq!(code, 0, "{err}");
    let v = json(d.path().join("gauge.json"));
    assert_eq!(v["result"].as_array().unwrap().len(), 3);
}

#[test]
fn periods_table_and_envelope() {
    let d = tempfile::tempdir().unwrap();
    let (code, err) = hml(&["periods", "--q2", "-1,0,1", "--t", "4,6,8,10,12", "--out", "p.csv"], d.path());
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(d.path().join("p.csv")).unwrap();
    let row: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(&row[..2], &["0", "1"]);
    let m: f64 = row[4].parse().unwrap();
    assert!((m - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let v = json(d.path().join("p.json"));
    assert!(v["result"]["envelope"]["full_log"]["slope"].as_f64().unwrap() < -6.0);
}

#[test]
fn semiflat_and_stokes_checks() {
    let d = tempfile::tempdir().unwrap();
    let (code, err) = hml(&["sf-consistency", "--pdot", "0,1"], d.path());
    assert_eq!(code, 0, "{err}");
    let (code, err) = hml(&["stokes-check", "--t", "4", "--pdot", "1+0.5i,-1"], d.path());
    assert_eq!(code, 0, "{err}");
    let v = json(d.path().join("stokes.json"));
    assert!(v["result"][0]["rel_err"].as_f64().unwrap() < 1e-8);
}

#[test]
fn failed_check_exits_1() {
    let d = tempfile::tempdir().unwrap();
    // a tolerance no quadrature can meet
    let (code, _) = hml(&["stokes-check", "--t", "8", "--tol", "1e-30"], d.path());
    assert_eq!(code, 1);
}
