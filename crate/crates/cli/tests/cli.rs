//! End-to-end tests of the `ttd` command surface: flags, spec files,
//! environment-variable overrides, metric files, and exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

fn ttd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ttd"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ttd-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn run_writes_per_run_and_aggregate_csvs() {
    let dir = temp_dir("run");
    let out = dir.join("metrics");
    let status = ttd()
        .args([
            "run",
            "--env",
            "car-parking",
            "--episodes",
            "4",
            "--runs",
            "2",
            "--seed",
            "11",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let run0 = read(&out.join("run_11.csv"));
    assert!(run0.starts_with("episode,duration,total_reward,avg_reward_per_step,padded\n"));
    assert_eq!(run0.lines().count(), 5); // header + 4 episodes
    assert!(out.join("run_12.csv").exists());

    let aggregate = read(&out.join("aggregate.csv"));
    assert!(aggregate.starts_with(
        "episode,mean_duration,mean_total_reward,mean_avg_reward_per_step,\
         rolling_mean_duration,rolling_mean_avg_reward_per_step\n"
    ));
    assert_eq!(aggregate.lines().count(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_invocations_emit_identical_bytes() {
    let dir = temp_dir("det");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let status = ttd()
            .args([
                "run", "--env", "cart-pole", "--episodes", "3", "--runs", "2", "--seed", "5",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(read(&out_a.join("aggregate.csv")), read(&out_b.join("aggregate.csv")));
    assert_eq!(read(&out_a.join("run_5.csv")), read(&out_b.join("run_5.csv")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn spec_file_flags_and_env_precedence() {
    let dir = temp_dir("prec");
    std::fs::write(
        dir.join("study.conf"),
        "# tiny study\nenv = car-parking\nepisodes = 6\nruns = 1\nlambda = 0.5\nseed = 3\n",
    )
    .unwrap();

    // Environment variable overrides the file; flag overrides both.
    let out = dir.join("m1");
    let status = ttd()
        .args(["run", "--spec"])
        .arg(dir.join("study.conf"))
        .args(["--out"])
        .arg(&out)
        .env("TTD_EPISODES", "2")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read(&out.join("run_3.csv")).lines().count(), 3); // header + 2

    let out2 = dir.join("m2");
    let status = ttd()
        .args(["run", "--spec"])
        .arg(dir.join("study.conf"))
        .args(["--episodes", "5", "--out"])
        .arg(&out2)
        .env("TTD_EPISODES", "2")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read(&out2.join("run_3.csv")).lines().count(), 6); // header + 5
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_configuration_fails_before_running() {
    let dir = temp_dir("bad");
    let status = ttd()
        .args(["run", "--lambda", "1.5", "--out"])
        .arg(dir.join("x"))
        .status()
        .unwrap();
    assert!(!status.success());

    // Incremental engine with lambda = 0 divides by gamma*lambda: rejected.
    let status = ttd()
        .args(["run", "--engine", "incremental", "--lambda", "0", "--out"])
        .arg(dir.join("y"))
        .status()
        .unwrap();
    assert!(!status.success());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_subcommand_exit_codes() {
    let output = ttd().args(["check", "--trials", "60", "--seed", "1"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("iterative-vs-closed-form"));
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));

    let output = ttd().args(["check", "--trials", "0"]).output().unwrap();
    assert!(output.status.success());
}

#[test]
fn curves_converts_aggregate_to_plot_columns() {
    let dir = temp_dir("curves");
    let out = dir.join("metrics");
    let status = ttd()
        .args([
            "run", "--env", "car-parking", "--episodes", "3", "--runs", "1", "--seed", "0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let output = ttd().arg("curves").arg(out.join("aggregate.csv")).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.starts_with("# episode mean_duration"));
    assert!(!stdout.contains(','));

    let plot_path = dir.join("plot.dat");
    let status = ttd()
        .arg("curves")
        .arg(out.join("aggregate.csv"))
        .arg("--output")
        .arg(&plot_path)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read(&plot_path), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_subcommand_verifies_the_parking_claim() {
    let output = ttd().args(["oracle", "--max-depth", "21"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("21 steps"));
    assert!(stdout.contains("oracle: PASS"));

    // Expecting a different depth must fail.
    let output = ttd()
        .args(["oracle", "--expect", "20", "--max-depth", "20"])
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn preset_flag_selects_named_settings() {
    let dir = temp_dir("preset");
    let out = dir.join("m");
    // Preset values with a flag override shrinking the workload.
    let status = ttd()
        .args([
            "run",
            "--preset",
            "car-study2-m5",
            "--episodes",
            "2",
            "--runs",
            "1",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("run_0.csv").exists());

    let status = ttd()
        .args(["run", "--preset", "no-such-preset", "--out"])
        .arg(dir.join("z"))
        .status()
        .unwrap();
    assert!(!status.success());
    std::fs::remove_dir_all(&dir).unwrap();
}
