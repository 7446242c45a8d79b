//! CLI integration: exercises the subcommands end to end on a tiny network.

use std::path::Path;
use std::process::Command;

fn cranra() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cranra"))
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.cfg");
    std::fs::write(
        &path,
        "master_seed = 3\n\
         area_side = 120\n\
         rrh_count = 16\n\
         device_count = 80\n\
         scatterer_count = 100\n\
         blocker_count = 40\n\
         lambda_in = 30\n\
         theta = 0.3\n\
         frames = 2\n\
         warmup = 3\n\
         window = 2\n\
         mc_rank = 16\n\
         mc_max_iters = 60\n\
         alpha_steps = 5\n\
         beta_steps = 8\n",
    )
    .unwrap();
    path
}

#[test]
fn print_defaults_is_a_valid_config() {
    let out = cranra().arg("--print-defaults").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = cranra::config::parse_config(&text).unwrap();
    assert_eq!(cfg, cranra::config::ExperimentConfig::default());
}

#[test]
fn bad_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "theta = oops\n").unwrap();
    let out = cranra().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("theta"), "{stderr}");
}

#[test]
fn simulate_classify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let sim_out = dir.path().join("sim");
    let status = cranra()
        .args(["simulate", "--theta", "0.3", "--emit-views", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&sim_out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(sim_out.join("campaign.csv").exists());
    assert!(sim_out.join("layout.csv").exists());
    assert!(sim_out.join("gains.csv").exists());
    // Views for the last two frames of warmup(3) + frames(2) = 5 total.
    assert!(sim_out.join("view_3.csv").exists());
    assert!(sim_out.join("view_4.csv").exists());

    let cls_out = dir.path().join("cls");
    let status = cranra()
        .args(["classify", "--method", "mc", "--frames", "3,4", "--config"])
        .arg(&cfg)
        .arg("--in")
        .arg(&sim_out)
        .arg("--out")
        .arg(&cls_out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(cls_out.join("chat_4.csv").exists());
    assert!(cls_out.join("fit_trace.csv").exists());

    let status = cranra()
        .args(["classify", "--method", "baseline", "--alpha", "0.3", "--frames", "4", "--config"])
        .arg(&cfg)
        .arg("--in")
        .arg(&sim_out)
        .arg("--out")
        .arg(dir.path().join("cls-base"))
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn model_vs_sim_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tp");
    let status = cranra()
        .args([
            "model-vs-sim",
            "--theta",
            "0.2",
            "--p",
            "0.02,0.05",
            "--frames",
            "50",
            "--population",
            "100",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let table = std::fs::read_to_string(out.join("throughput.csv")).unwrap();
    assert!(table.starts_with("theta,p,lambda_out_sim,lambda_out_model,stderr"));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn run_produces_full_artifact_tree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    let status = cranra().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    for file in ["layout.csv", "gains.csv", "summary.csv", "manifest.txt"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let theta_dir = out.join("theta-0.3");
    for file in ["roc_baseline.csv", "roc_mc_w1.csv", "roc_mc_w2.csv", "campaign.csv", "fit_trace.csv"] {
        assert!(theta_dir.join(file).exists(), "theta-0.3/{file} missing");
    }
    // The manifest reloads as a configuration (replay).
    let manifest = cranra::config::load_config(&out.join("manifest.txt")).unwrap();
    assert_eq!(manifest.master_seed, 3);

    // Refusing to overwrite an existing non-empty directory is a config
    // error (exit code 2).
    let out2 = cranra().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(out2.status.code(), Some(2));
}

#[test]
fn calibrate_dthr_prints_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = cranra().args(["calibrate-dthr", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("d_thr = "), "{stdout}");
}
