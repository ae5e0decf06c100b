use std::path::Path;
use std::process::{Command, Output};

fn bbm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bbm_writes_all_formats_and_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bbm", "--s-grid", "0.5,0.9", "--out", "r"];
    let first = bbm(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let out = stdout(&first);
    assert!(!out.contains("(cached)"));
    let files: Vec<_> = std::fs::read_dir(dir.path().join("r"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    for ext in ["csv", "json", "gp"] {
        assert!(files.iter().any(|p| p.extension().unwrap() == ext), "missing .{ext}");
    }
    let csv = files.iter().find(|p| p.extension().unwrap() == "csv").unwrap();
    let before = std::fs::read(csv).unwrap();

    let second = bbm(&args, dir.path());
    assert_eq!(second.status.code(), Some(0));
    assert!(stdout(&second).contains("(cached)"));
    assert_eq!(std::fs::read(csv).unwrap(), before);
}

#[test]
fn emit_regenerates_csv_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bbm(&["bbm", "--s-grid", "0.5", "--out", "a", "--format", "json", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let find = |sub: &str, ext: &str| {
        std::fs::read_dir(dir.path().join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.extension().is_some_and(|e| e == ext))
            .unwrap()
    };
    let json = find("a", "json");
    let o = bbm(&["emit", json.to_str().unwrap(), "--format", "csv", "--out", "b"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(find("a", "csv")).unwrap(), std::fs::read(find("b", "csv")).unwrap());
}

#[test]
fn non_smooth_function_trips_hypothesis_gate() {
    let dir = tempfile::tempdir().unwrap();
    let o = bbm(&["bbm", "--fn", "tent", "--s-grid", "0.5", "--no-cache"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn truncation_failure_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plain.toml");
    std::fs::write(&cfg, "kind = \"bbm-limit\"\ns_grid = [0.999]\n\n[plan]\nuse_rho_substitution = false\n").unwrap();
    let o = bbm(&["bbm", "--config", cfg.to_str().unwrap(), "--no-cache"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_input_is_a_plain_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bbm(&["bbm", "--spec", "nosuch", "--no-cache"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn property_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bbm(&["props", "--seed", "3", "--out", "p"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(", 0 failed"));
}
