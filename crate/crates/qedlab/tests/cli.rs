use std::path::Path;
use std::process::{Command, Output};

fn qedlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qedlab"))
        .args(args)
        .current_dir(dir)
        .env("QEDLAB_WORKERS", "1")
        .env("RUST_LOG", "warn")
        .output()
        .expect("qedlab runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL_GROUND: &str = r#"
preset = "small"
[grid]
points = 41
spacing = 0.25
[modes]
omega = 0.5
[solver]
max_n = 6
[sweep]
lambda = [0.0, 0.2]
[[run]]
method = "exact-pzw"
[[run]]
method = "photon-free"
"#;

#[test]
fn ground_output_is_self_describing_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_GROUND);
    let read = |out: &str| {
        let o = qedlab(&["ground", "--config", &cfg, "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join(out).join("small_exact-pzw.csv")).unwrap()
    };
    let a = read("a");
    let b = read("b");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("# method = \"exact-pzw\""));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("preset,label,method"));
    assert!(rows[1..].iter().all(|r| r.ends_with(",ok")));
    assert!(dir.path().join("a/small_photon-free.plot").exists());
}

#[test]
fn empty_sweep_fails_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL_GROUND.replace("[0.0, 0.2]", "[]"));
    let o = qedlab(&["ground", "--config", &cfg, "--out", "out"], dir.path());
    assert!(!o.status.success());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn failed_points_are_rows_and_a_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        r#"
        preset = "bad"
        method = "pheg"
        [grid]
        points = 11
        spacing = 0.5
        [modes]
        omega = 0.5
        lambda = 0.3
        "#,
    );
    let o = qedlab(&["ground", "--config", &cfg, "--out", "out"], dir.path());
    assert!(!o.status.success());
    let text = std::fs::read_to_string(dir.path().join("out/bad_pheg.csv")).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.contains("failed"), "{last}");
}

#[test]
fn validate_reports_dimension_and_problems() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        r#"
        [grid]
        points = 301
        spacing = 0.1
        [modes]
        omega = 0.5
        ratio = 0.136
        [solver]
        max_n = 40
        [[run]]
        method = "exact-pzw"
        [[run]]
        method = "pheg"
        "#,
    );
    let o = qedlab(&["validate", "--config", &cfg], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("dimension 12341"), "{text}");
    assert!(text.contains("problem: pheg needs a periodic grid"), "{text}");
    let lambda = 0.136 * (2.0f64 * 0.5).sqrt();
    assert!(text.contains(&format!("lambda {lambda:.10}")), "{text}");
}

#[test]
fn unparsable_config_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "method = \"exact-pzw\"\n[grid]\npoints = 11\nspacing = 0.1\ncolour = 1\n");
    assert!(!qedlab(&["validate", "--config", &cfg], dir.path()).status.success());
}

#[test]
fn single_frequency_spectrum_is_one_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        r#"
        preset = "one"
        kind = "spectrum"
        method = "maxwell"
        [grid]
        points = 41
        spacing = 0.25
        [modes]
        omega = 0.4
        ratio = 0.136
        [dynamics]
        t_end = 5.0
        dt = 1e-3
        n_omega = 5
        omega_max = 1.0
        "#,
    );
    let o = qedlab(&["spectrum", "--config", &cfg, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/one_maxwell.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.len() == 2));
    assert_eq!(&rows[0][0], "1");
    assert!(dir.path().join("out/one_maxwell_runs.csv").exists());
    assert!(dir.path().join("out/one_maxwell.plot").exists());
}

#[test]
fn static_method_has_no_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg2 = write(
        dir.path(),
        "d.toml",
        "kind = \"spectrum\"\nmethod = \"qedft-px\"\n[grid]\npoints = 11\nspacing = 0.5\n",
    );
    assert!(!qedlab(&["spectrum", "--config", &cfg2, "--out", "out"], dir.path()).status.success());
    // a ground-state config holds no spectrum runs
    assert!(!qedlab(&["spectrum", "--preset", "fig5", "--out", "out"], dir.path()).status.success());
}

#[test]
fn workers_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_GROUND);
    let o = Command::new(env!("CARGO_BIN_EXE_qedlab"))
        .args(["ground", "--config", &cfg, "--out", "out"])
        .env("QEDLAB_WORKERS", "0")
        .output()
        .unwrap();
    assert!(!o.status.success());
}
