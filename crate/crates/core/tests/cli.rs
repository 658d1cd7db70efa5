use std::path::Path;
use std::process::{Command, Output};

fn recip(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recip")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn transfer_sweep_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let o = recip(&["transfer-sweep", "--alpha", "1,2", "--lambda0-t", "0:pi:pi/4", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("rows = 10"));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), reciprocation::sweep::CSV_HEADER);
    assert_eq!(lines.count(), 10);
    let meta = std::fs::read_to_string(dir.path().join("t.csv.meta")).unwrap();
    assert!(meta.contains("command = transfer-sweep"), "{meta}");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), "# sweep\nalpha = 3\nlambda0_t = pi/2\ndelta-ratio = 0:0.2:0.1\nout = from_config.csv\n").unwrap();
    let o = recip(&["--config", "run.conf", "delta-sweep", "--alpha", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = reciprocation::sweep::read_csv(&std::fs::read_to_string(dir.path().join("from_config.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.alpha == 1.0));
}

#[test]
fn validate_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = recip(&["validate", "--preset", "paper-regime", "--out", "v.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.trim_end().ends_with("RESULT PASS"));
    assert_eq!(std::fs::read_to_string(dir.path().join("v.txt")).unwrap(), text);

    let o = recip(&["validate", "--preset", "degenerate-raman"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = recip(&["validate", "--preset", "strong-coupling"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn roundtrip_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = recip(&["roundtrip", "--alpha", "2", "--lambda0-t", "pi/2", "--retrieve-lambda0-t", "1.0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let get = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap();
        line.split(" = ").nth(1).unwrap().parse().unwrap()
    };
    assert!((get("e_initial") - 1.0).abs() < 1e-9);
    assert!((get("e_stored") - 1.0).abs() < 1e-6);
    assert!((get("retrieval_fidelity") - 1.0).abs() < 1e-6);
    assert!(text.contains("degenerate = none"));
}

#[test]
fn degenerate_roundtrip_exits_numeric() {
    let dir = tempfile::tempdir().unwrap();
    // at delta = 0 and lambda0 t = pi the g1g1 outcome never occurs
    let o = recip(&["roundtrip", "--lambda0-t", "pi", "--delta-ratio", "0"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(!stdout(&o).contains("degenerate = none"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["transfer-sweep", "--alpha", "abc"],
        vec!["transfer-sweep", "--outcome", "g3g1"],
        vec!["validate", "--preset", "nope"],
        vec!["--config", "missing.conf", "validate"],
        vec!["frobnicate"],
        vec!["delta-sweep", "--lambda0-t", "0:1:0.5"],
    ] {
        let o = recip(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(recip(&["--help"], dir.path()).status.code(), Some(0));
}
