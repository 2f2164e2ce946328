use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wirehead(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wirehead"))
        .args(args)
        .env_remove("WIREHEAD_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn train_small(out: &Path, extra: &[&str]) -> Output {
    let out = out.to_str().unwrap();
    let mut args = vec!["train", "--episodes", "200", "--repeats", "2", "--test-episodes", "5", "--out", out];
    args.extend_from_slice(extra);
    wirehead(&args)
}

#[test]
fn analyze_conditions_reports_values() {
    let o = wirehead(&["analyze-conditions", "--k", "6", "--u", "8", "--r_c", "20", "--gamma", "0.9", "--n", "8", "--l0", "4", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["v_max"], 1200.0);
    assert_eq!(v["sufficient"], false);
    assert_eq!(v["growth"], true);
    assert_eq!(v["minimal_k"], 56);

    let o = wirehead(&["analyze-conditions", "--k", "6", "--u", "8"]);
    assert!(stdout(&o).contains("= 1200"));
}

#[test]
fn analyze_conditions_rejects_bad_domain() {
    let o = wirehead(&["analyze-conditions", "--k", "6", "--u", "8", "--gamma", "1.5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(wirehead(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(wirehead(&["train", "--experiment", "7", "--episodes", "1"]).status.code(), Some(2));
}

#[test]
fn train_all_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = train_small(dir.path(), &["--experiment", "all", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for label in ["e1_baseline", "e2_k1.5_u4", "e3_k6_u8"] {
        for f in ["training_curve.csv", "test_scores.csv", "consumption.csv", "config.json"] {
            assert!(dir.path().join(label).join(f).is_file(), "{label}/{f}");
        }
        assert!(dir.path().join(label).join("qtables/repeat_00.qtable").is_file());
    }
    for f in ["training_curves.svg", "test_scores.svg", "consumption.svg"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn zero_episodes_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = wirehead(&["train", "--experiment", "1", "--episodes", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("e1_baseline").exists());
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wirehead"))
        .args(["train", "--experiment", "2", "--episodes", "50", "--repeats", "1", "--test-episodes", "2", "--no-charts"])
        .env("WIREHEAD_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("e2_k1.5_u4/consumption.csv").is_file());
    assert!(!dir.path().join("training_curves.svg").exists());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert!(train_small(&a, &["--experiment", "3", "--no-charts"]).status.success());
    let cfg = a.join("e3_k6_u8/config.json");
    let b = dir.path().join("b");
    let o = wirehead(&["train", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--no-charts"]);
    assert!(o.status.success());
    for f in ["training_curve.csv", "test_scores.csv", "consumption.csv"] {
        assert_eq!(fs::read(a.join("e3_k6_u8").join(f)).unwrap(), fs::read(b.join("e3_k6_u8").join(f)).unwrap());
    }
}

#[test]
fn evaluate_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    assert!(train_small(dir.path(), &["--experiment", "1", "--no-charts"]).status.success());
    let q = dir.path().join("e1_baseline/qtables/repeat_01.qtable");
    let traj = dir.path().join("traj.json");
    let o = wirehead(&["evaluate", "--qtable", q.to_str().unwrap(), "--episodes", "3", "--record", traj.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("episode,return,steps,seeds,drugs,length"));
    assert_eq!(lines.count(), 3);
    assert!(traj.is_file());

    let o = wirehead(&["replay", traj.to_str().unwrap(), "--fps", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains('@'));

    let missing = dir.path().join("missing.qtable");
    let o = wirehead(&["evaluate", "--qtable", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn tdrl_writes_value_history() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tdrl.csv");
    let o = wirehead(&["tdrl", "--drug-surge", "0", "--trials", "20", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("trial,state_index,value"));
    assert_eq!(text.lines().count(), 1 + 20 * 3);
}

#[test]
fn oracle_agrees() {
    let o = wirehead(&["oracle", "--samples", "200", "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("disagreements 0"));
}
