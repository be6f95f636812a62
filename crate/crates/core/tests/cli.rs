use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn perforate(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perforate"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn fit_on_square_law_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("eps_squared.csv");
    let out = perforate(&["fit", "--input", input.to_str().unwrap(), "--target", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("fit.csv"));
    let slope: f64 = rows[1][0].parse().unwrap();
    assert!((slope - 2.0).abs() < 1e-12);
    assert!(dir.path().join("report.txt").exists());
    assert!(dir.path().join("resolved_config.toml").exists());

    let out = perforate(&["fit", "--input", input.to_str().unwrap(), "--target", "2.5"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn coincident_centers_fail_separation() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("coincident_centers.txt");
    let out = perforate(&["separation", "--input", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("violating pair: holes 0 and 1"), "{report}");
}

#[test]
fn cutoff_reports_target_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let out = perforate(&["cutoff", "--alpha", "4", "--seeds", "2"], dir.path());
    assert!(matches!(out.status.code(), Some(0 | 3)), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("cutoff.csv"));
    assert_eq!(rows[0], ["eps", "lq_part", "grad_part", "w1q_norm", "target_sigma"]);
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r[4] == "0.5"));
}

#[test]
fn unknown_config_keys_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schema_version = 1\n[perforation]\nalpah = 4.0\n").unwrap();
    let out = perforate(&["slln", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("perforation.alpah"));
}

#[test]
fn invalid_parameters_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = perforate(&["measures", "--alpha", "1.5", "--seeds", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = perforate(&["slln", "--eps", "0.1,0.2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let a = perforate(&["measures", "--seeds", "3", "--seed", "12", "--eps", "0.2,0.15,0.1"], &first);
    assert!(matches!(a.status.code(), Some(0 | 3)), "{}", String::from_utf8_lossy(&a.stderr));
    let second = dir.path().join("second");
    let cfg = first.join("resolved_config.toml");
    let b = perforate(&["measures", "--config", cfg.to_str().unwrap()], &second);
    assert_eq!(a.status.code(), b.status.code());
    let a = std::fs::read(first.join("measures.csv")).unwrap();
    let b = std::fs::read(second.join("measures.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sample_writes_a_replayable_domain() {
    let dir = tempfile::tempdir().unwrap();
    let out = perforate(&["sample", "--eps", "0.2", "--domain-check-is-not-a-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = perforate(&["sample", "--eps", "0.2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("domain.txt")).unwrap();
    assert!(text.starts_with("# perforated-domain v1"));
    let rows = csv_rows(&dir.path().join("holes.csv"));
    let n: usize = text.lines().find_map(|l| l.strip_prefix("holes ")).unwrap().parse().unwrap();
    assert_eq!(rows.len() - 1, n);

    let replay = dir.path().join("replay");
    let domain = dir.path().join("domain.txt");
    let out = perforate(&["separation", "--input", domain.to_str().unwrap()], &replay);
    assert!(matches!(out.status.code(), Some(0 | 3)));
}

#[test]
fn box_domains_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("box.toml");
    std::fs::write(&cfg, "[domain]\nshape = \"box\"\nhalf_widths = [1.0, 0.5, 0.5]\n").unwrap();
    let out = perforate(&["sample", "--config", cfg.to_str().unwrap(), "--eps", "0.2"], &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("o/report.txt")).unwrap();
    assert!(report.contains("no C2 boundary"));
}
