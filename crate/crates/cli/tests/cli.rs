use std::path::Path;
use std::process::{Command, Output};

fn selfplay(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_selfplay"));
    cmd.args(args).env_remove("SELFPLAY_SEED").env_remove("SELFPLAY_OUTPUT_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const KUHN: &str = "games = [\"kuhn\"]\ngroup_size = 8\nmax_steps = 10\neval_interval = 5\neval_games = 40\ntrajectory_log_interval = 5\n";

#[test]
fn train_twice_gives_identical_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_config(tmp.path(), "a.toml", &format!("{KUHN}output_dir = \"{}\"\n", tmp.path().join("a").display()));
    let b = write_config(tmp.path(), "b.toml", &format!("{KUHN}output_dir = \"{}\"\n", tmp.path().join("b").display()));
    for cfg in [&a, &b] {
        let out = selfplay(&["train", cfg], &[]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ma = std::fs::read(tmp.path().join("a/metrics.csv")).unwrap();
    let mb = std::fs::read(tmp.path().join("b/metrics.csv")).unwrap();
    assert_eq!(ma, mb);
}

#[test]
fn invalid_config_fails_with_a_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "games = [\"kuhn\"]\nschem = \"mars\"\n");
    let out = selfplay(&["train", &cfg], &[]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn output_dir_can_come_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", KUHN);
    let out_dir = tmp.path().join("from_env");
    let out = selfplay(&["train", &cfg], &[("SELFPLAY_OUTPUT_DIR", &out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("checkpoint.bin").exists());
}

#[test]
fn evaluate_inspect_and_solve_round_out_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let cfg = write_config(tmp.path(), "run.toml", &format!("{KUHN}output_dir = \"{}\"\n", run.display()));
    assert!(selfplay(&["train", &cfg], &[]).status.success());
    let ckpt = run.join("checkpoint.bin");
    let ckpt = ckpt.to_str().unwrap();

    let out =
        selfplay(&["evaluate", ckpt, "--game", "kuhn", "--opponent", "kuhn_nash", "--n-games", "100", "--json"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["n_games"], 100);
    assert!(report["exact_mean"].is_f64());

    let out = selfplay(&["evaluate", ckpt, "--game", "kuhn", "--opponent", "mcts:10"], &[]);
    assert!(!out.status.success());

    let out = selfplay(&["inspect", ckpt], &[]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("step            10"));
    let log = run.join("trajectories.jsonl");
    let out = selfplay(&["inspect", log.to_str().unwrap(), "--limit", "3"], &[]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 4);

    let table = tmp.path().join("kuhn_cfr.txt");
    let out = selfplay(&["solve", "--game", "kuhn", "--iterations", "2000", "--out", table.to_str().unwrap()], &[]);
    assert!(out.status.success());
    let spec = format!("cfr:{}", table.display());
    let out = selfplay(&["evaluate", ckpt, "--game", "kuhn", "--opponent", &spec, "--n-games", "50"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        selfplay::harness::ExperimentConfig::from_toml(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 3);
}
