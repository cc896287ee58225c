use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn fkslab(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fkslab"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("FKSLAB_WORKERS", w),
        None => cmd.env_remove("FKSLAB_WORKERS"),
    };
    cmd.output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const TINY_SOLVE: &str = "[experiment]
kind = solve
id = tiny
seed = 5

[grid]
dim = 2
points = 16

[solver]
alpha = 1.5
dt = 0.05
T = 0.2
";

#[test]
fn missing_alpha_is_a_configuration_error() {
    let dir = scratch("missing-alpha");
    let cfg = write(&dir, "c.cfg", "[experiment]\nkind = solve\n");
    let out = fkslab(&["run", cfg.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("'alpha'"), "{}", stderr(&out));
}

#[test]
fn unknown_key_names_its_line() {
    let dir = scratch("unknown-key");
    let cfg = write(&dir, "c.cfg", "[experiment]\nkind = solve\n[solver]\nalpha = 1.5\nbeta = 2\n");
    let out = fkslab(&["run", cfg.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}

#[test]
fn bad_usage_exits_with_one() {
    let out = fkslab(&["verify", "--suite", "nonsense"], None);
    assert_eq!(out.status.code(), Some(1));
    let out = fkslab(&["verify", "--suite", "kernels", "--alpha", "3"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_check_exits_with_two() {
    let dir = scratch("failing");
    // only small amplitudes, so the sweep never sees a blow-up
    let cfg = write(
        &dir,
        "c.cfg",
        "[experiment]\nkind = dichotomy-sweep\nid = one-sided\n[grid]\npoints = 32\n[solver]\nalpha = 2\ndt = 0.01\nT = 0.05\n[dichotomy]\namplitudes = 0.1\n",
    );
    let out_dir = dir.join("out");
    let out = fkslab(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("one-sided-dichotomy.csv")).unwrap();
    assert!(csv.starts_with("amplitude,smallness_lhs,outcome,"));
    assert!(csv.contains(",decay,"));
}

#[test]
fn run_writes_report_and_tables() {
    let dir = scratch("run");
    let cfg = write(&dir, "c.cfg", TINY_SOLVE);
    let out_dir = dir.join("out");
    let out = fkslab(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("tiny.json")).unwrap()).unwrap();
    assert_eq!(json["kind"], "solve");
    for table in json["tables"].as_array().unwrap() {
        assert!(out_dir.join(table.as_str().unwrap()).exists());
    }
}

#[test]
fn sweep_merges_in_value_order_with_derived_seeds() {
    let dir = scratch("sweep");
    let cfg = write(&dir, "c.cfg", TINY_SOLVE);
    let out_dir = dir.join("out");
    let out = fkslab(
        &["sweep", cfg.to_str().unwrap(), "--param", "alpha", "--values", "2.0,1.5,1.8", "--out", out_dir.to_str().unwrap()],
        Some("2"),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("tiny-sweep-merged.csv")).unwrap();
    let firsts: Vec<(String, String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].to_string(), cols[1].to_string(), cols[2].to_string())
        })
        .collect();
    let mut seen = Vec::new();
    for row in firsts {
        if !seen.contains(&row) {
            seen.push(row);
        }
    }
    let expect = [("1.5", "1", "6"), ("1.8", "2", "7"), ("2.0", "0", "5")];
    let got: Vec<(&str, &str, &str)> = seen.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    assert_eq!(got, expect);
}

#[test]
fn sweep_rejects_bad_input() {
    let dir = scratch("sweep-bad");
    let cfg = write(&dir, "c.cfg", TINY_SOLVE);
    let c = cfg.to_str().unwrap();
    let o = dir.join("out");
    let o = o.to_str().unwrap();
    assert_eq!(fkslab(&["sweep", c, "--param", "alpha", "--values", "", "--out", o], None).status.code(), Some(1));
    assert_eq!(fkslab(&["sweep", c, "--param", "scheme", "--values", "imex", "--out", o], None).status.code(), Some(1));
    assert_eq!(fkslab(&["sweep", c, "--param", "alpha", "--values", "1.5", "--out", o], Some("zero")).status.code(), Some(1));
}

#[test]
fn sweep_job_errors_are_recorded_per_row() {
    let dir = scratch("sweep-job-error");
    let cfg = write(&dir, "c.cfg", TINY_SOLVE);
    let out_dir = dir.join("out");
    // alpha = 3 is rejected by the job, the other value still runs
    let out = fkslab(
        &["sweep", cfg.to_str().unwrap(), "--param", "alpha", "--values", "3,1.5", "--out", out_dir.to_str().unwrap()],
        Some("1"),
    );
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(out_dir.join("tiny-sweep-merged.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("1.5,1,6,pass,")));
    assert!(csv.lines().any(|l| l.starts_with("3,0,5,error,")));
}
