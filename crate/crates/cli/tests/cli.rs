//! End-to-end runs of the `aim` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aim_cli::{exit, read_csv, HEADER};

fn aim(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aim"));
    cmd.args(args).env_remove("AIM_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn aim")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CLOSE: &str = "policies = [\"aim_gauss2\", \"thompson\"]\nmeans = [0.8, 0.79]\nhorizon = 3000\nruns = 8\nseed = 1\n";

#[test]
fn run_writes_a_replayable_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "close.toml", CLOSE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, threads) in [(&a, "1"), (&b, "2")] {
        let o = aim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[("AIM_THREADS", threads)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert!(String::from_utf8_lossy(&text).starts_with(HEADER));
    let table = read_csv(&a).unwrap();
    assert!(table.rows.iter().all(|r| r.runs == 8));
    assert_eq!(table.row("thompson", 3000).map(|r| r.runs), Some(8));
}

#[test]
fn overrides_reach_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "close.toml", CLOSE);
    let out = dir.path().join("o.csv");
    let o = aim(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--horizon", "50", "--runs", "3", "--seed", "4", "--policies", "thompson"],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = read_csv(&out).unwrap();
    assert!(table.rows.iter().all(|r| r.policy == "thompson" && r.runs == 3 && r.t <= 50));
    assert!(table.row("thompson", 50).is_some());
}

#[test]
fn single_checkpoint_and_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "one.toml", "policy = \"thompson\"\nmeans = [0.5]\nhorizon = 1\nruns = 1\nseed = 3\n");
    let out = dir.path().join("one.csv");
    assert!(aim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[]).status.success());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2);

    let cfg = write(dir.path(), "tie.toml", &CLOSE.replace("0.79", "0.8"));
    let out = dir.path().join("tie.csv");
    assert!(aim(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("0")), "{text}");
}

#[test]
fn config_errors_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let bad = write(dir.path(), "bad.toml", &CLOSE.replace("horizon = 3000", "horizon = 1"));
    let o = aim(&["run", "--config", &bad, "--out", out], &[]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon 1"));

    let typo = write(dir.path(), "typo.toml", &format!("{CLOSE}rnus = 3\n"));
    let o = aim(&["run", "--config", &typo, "--out", out], &[]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rnus"));

    let o = aim(&["run", "--config", "/nonexistent.toml", "--out", out], &[]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));

    let good = write(dir.path(), "good.toml", CLOSE);
    let o = aim(&["run", "--config", &good, "--out", out], &[("AIM_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(!Path::new(out).exists());
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &CLOSE.replace("runs = 8", "runs = 1"));
    let o = aim(&["run", "--config", &cfg, "--out", "/nonexistent/dir/out.csv"], &[]);
    assert_eq!(o.status.code(), Some(exit::IO));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/out.csv"));
}

#[test]
fn usage_errors_are_distinct() {
    assert_eq!(aim(&["run"], &[]).status.code(), Some(exit::USAGE));
    assert_eq!(aim(&["frobnicate"], &[]).status.code(), Some(exit::USAGE));
    assert_eq!(aim(&["--help"], &[]).status.code(), Some(exit::OK));
}

#[test]
fn validate_passes_without_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "policies = []\n");
    for args in [vec!["validate"], vec!["validate", "--config", empty.as_str()]] {
        let o = aim(&args, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 7, "{stdout}");
    }
}

#[test]
fn sweep_writes_per_instance_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        "family = \"bernoulli\"\npolicies = [\"aim_bern2\", \"thompson\"]\nsobol_pairs = 3\nhorizon = 200\nruns = 2\nseed = 5\n",
    );
    let out = dir.path().join("sweep");
    let o = aim(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pooled = read_csv(&out.join("bayesian.csv")).unwrap();
    assert_eq!(pooled.row("thompson", 200).unwrap().runs, 6);
    for i in 0..3 {
        let t = read_csv(&out.join(format!("instance_{i:04}.csv"))).unwrap();
        assert_eq!(t.row("aim_bern2", 200).unwrap().runs, 2);
    }
    let listing = fs::read_to_string(out.join("instances.csv")).unwrap();
    assert_eq!(listing.lines().nth(1), Some("0,0.5;0.5"));
    assert_eq!(listing.lines().nth(2), Some("1,0.75;0.25"));
}

#[test]
fn sweep_with_uniform_means_writes_only_the_pooled_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "u.toml",
        "family = \"bernoulli\"\npolicies = [\"aim_bernk\"]\nuniform_arms = 4\nhorizon = 100\nruns = 3\nseed = 5\n",
    );
    let out = dir.path().join("u");
    assert!(aim(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()], &[]).status.success());
    let names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names, ["bayesian.csv"]);
}
