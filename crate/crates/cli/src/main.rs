//! Command-line front end: simulate, classify, evaluate and reproduce.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cranra::config::{default_config_text, load_config, ExperimentConfig};
use cranra::eval::{model_vs_sim_abstract, model_vs_sim_geometric};
use cranra::io;
use cranra::pipeline::{
    calibration_draw, classify_from_files, run_experiment, simulate_experiment,
    FileClassifyMethod,
};
use cranra::ra::p_star;

#[derive(Parser)]
#[command(name = "cranra", version, about = "C-RAN random-access simulator and link classifiers")]
struct Cli {
    /// Print the complete default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct Common {
    /// Configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Relative paths resolve under $CRANRA_OUT when set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one RA campaign and write campaign/view/gain artifacts.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Relative overhead; T = round(theta * lambda_in).
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        /// Delay-target parameter override.
        #[arg(long)]
        rho: Option<f64>,
        /// Arrival rate override.
        #[arg(long)]
        lambda_in: Option<f64>,
        /// Access probability override (otherwise p*(theta)).
        #[arg(long)]
        p: Option<f64>,
        /// Frames to simulate after warm-up.
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        warmup: Option<usize>,
        /// Detection backend.
        #[arg(long, value_parser = ["gscm", "abstract-q"], default_value = "gscm")]
        mode: String,
        /// How many final frames get per-frame view files.
        #[arg(long, default_value_t = 5)]
        emit_views: usize,
    },
    /// Classify simulated frames from their CSV artifacts.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Directory holding view_<f>.csv and layout.csv.
        #[arg(long = "in")]
        input: PathBuf,
        /// Frames to use, oldest first; the last frame is classified. A
        /// single frame combined with --window expands to the W frames
        /// ending at it.
        #[arg(long, value_delimiter = ',', required = true)]
        frames: Vec<usize>,
        /// Window size when --frames names a single frame.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_parser = ["baseline", "mc"], default_value = "mc")]
        method: String,
        /// Baseline coin bias.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Completion decision threshold (dB); defaults to the midpoint of
        /// the predicted range.
        #[arg(long)]
        beta: Option<f64>,
        /// Distance threshold override for the geographic rule.
        #[arg(long)]
        d_thr: Option<f64>,
        /// Completion hyperparameter overrides.
        #[arg(long)]
        mc_rank: Option<usize>,
        #[arg(long)]
        mc_regularization: Option<f64>,
        #[arg(long)]
        mc_step_size: Option<f64>,
        #[arg(long)]
        mc_max_iters: Option<usize>,
        #[arg(long)]
        mc_stop_error: Option<f64>,
        #[arg(long, value_parser = ["als", "gradient"])]
        mc_solver: Option<String>,
    },
    /// Trace ROC curves for both classifiers and write summary.csv.
    Roc {
        #[command(flatten)]
        common: Common,
        /// Evaluate a single theta instead of the configured grid.
        #[arg(long)]
        theta: Option<f64>,
        /// Additionally report rates restricted to unknown cells.
        #[arg(long)]
        unknown_only: bool,
    },
    /// Tabulate simulated throughput against the closed-form model.
    ModelVsSim {
        #[command(flatten)]
        common: Common,
        /// Thetas to evaluate (defaults to the configured grid).
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        /// Access probabilities per theta (defaults to 0.5x, 1x, 2x of
        /// p*(theta)).
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        /// Frames per grid cell.
        #[arg(long, default_value_t = 500)]
        frames: usize,
        /// Forced active population in abstract mode (defaults to
        /// ceil(lambda_in / rho)).
        #[arg(long)]
        population: Option<usize>,
        #[arg(long, value_parser = ["abstract-q", "gscm"], default_value = "abstract-q")]
        mode: String,
    },
    /// Calibrate the inter-RRH distance threshold on a fresh draw.
    CalibrateDthr {
        #[command(flatten)]
        common: Common,
    },
    /// Full pipeline: generate, simulate, classify, evaluate, manifest.
    Run {
        #[command(flatten)]
        common: Common,
    },
}

fn resolve_out(out: &Option<PathBuf>, default_name: &str) -> PathBuf {
    let raw = out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    if raw.is_absolute() {
        return raw;
    }
    match std::env::var_os("CRANRA_OUT") {
        Some(root) => Path::new(&root).join(raw),
        None => raw,
    }
}

fn load(common: &Common) -> cranra::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), cranra::Error> {
    if cli.print_defaults {
        print!("{}", default_config_text());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(cranra::Error::config("a subcommand is required (try --help)"));
    };
    match command {
        Command::Simulate {
            common,
            theta,
            rho,
            lambda_in,
            p,
            frames,
            warmup,
            mode,
            emit_views,
        } => {
            let mut cfg = load(&common)?;
            if let Some(rho) = rho {
                cfg.rho = rho;
            }
            if let Some(lambda_in) = lambda_in {
                cfg.lambda_in = lambda_in;
            }
            if let Some(p) = p {
                cfg.p_override = Some(p);
            }
            if let Some(frames) = frames {
                cfg.frames = frames;
            }
            if let Some(warmup) = warmup {
                cfg.warmup = warmup;
            }
            let out = resolve_out(&common.out, "out-simulate");
            let stats = simulate_experiment(&cfg, theta, mode == "abstract-q", emit_views, &out)?;
            println!(
                "simulated {} frames (warmup {}): lambda_out_hat = {:.3}, lambda_ra_hat = {:.3}, coverage holes = {}",
                stats.rows.len(),
                stats.warmup,
                stats.lambda_out_hat,
                stats.lambda_ra_hat,
                stats.coverage_holes
            );
            println!("artifacts in {}", out.display());
        }
        Command::Classify {
            common,
            input,
            frames,
            window,
            method,
            alpha,
            beta,
            d_thr,
            mc_rank,
            mc_regularization,
            mc_step_size,
            mc_max_iters,
            mc_stop_error,
            mc_solver,
        } => {
            let mut cfg = load(&common)?;
            if let Some(d) = d_thr {
                cfg.d_thr = Some(d);
            }
            if let Some(v) = mc_rank {
                cfg.mc_rank = v;
            }
            if let Some(v) = mc_regularization {
                cfg.mc_regularization = v;
            }
            if let Some(v) = mc_step_size {
                cfg.mc_step_size = v;
            }
            if let Some(v) = mc_max_iters {
                cfg.mc_max_iters = v;
            }
            if let Some(v) = mc_stop_error {
                cfg.mc_stop_error = v;
            }
            if let Some(v) = mc_solver {
                cfg.mc_solver = if v == "gradient" {
                    cranra::classify::SolverMode::Gradient
                } else {
                    cranra::classify::SolverMode::Als
                };
            }
            let frames = match (frames.len(), window) {
                (1, Some(w)) if w > 1 => {
                    let current = frames[0];
                    (current.saturating_sub(w - 1)..=current).collect()
                }
                _ => frames,
            };
            let out = resolve_out(&common.out, "out-classify");
            let method = match method.as_str() {
                "baseline" => FileClassifyMethod::Baseline { alpha },
                _ => FileClassifyMethod::Completion { beta },
            };
            classify_from_files(&cfg, &input, &frames, method, &out)?;
            println!("classified frame {} into {}", frames.last().unwrap(), out.display());
        }
        Command::Roc { common, theta, unknown_only } => {
            let mut cfg = load(&common)?;
            if let Some(theta) = theta {
                cfg.thetas = vec![theta];
            }
            if unknown_only {
                cfg.unknown_only = true;
            }
            let out = resolve_out(&common.out, "out-roc");
            let output = run_experiment(&cfg, &out, false)?;
            for row in &output.summary {
                println!(
                    "{} theta={} window={}: auc={:.4}, p_d@0.05={:.4}",
                    row.method, row.theta, row.window, row.auc, row.detection_at_5pct
                );
            }
            println!("artifacts in {}", output.dir.display());
        }
        Command::ModelVsSim { common, theta, p, frames, population, mode } => {
            let cfg = load(&common)?;
            let thetas = if theta.is_empty() { cfg.thetas.clone() } else { theta };
            let mut cells = Vec::new();
            for &t in &thetas {
                if p.is_empty() {
                    let star = p_star(cfg.rho, cfg.lambda_in, t)?;
                    for q in [0.5 * star, star, (2.0 * star).min(1.0)] {
                        cells.push((t, q));
                    }
                } else {
                    for &q in &p {
                        cells.push((t, q));
                    }
                }
            }
            let out = resolve_out(&common.out, "out-throughput");
            std::fs::create_dir_all(&out)?;
            let rows = if mode == "gscm" {
                let draw = calibration_draw(&cfg)?;
                model_vs_sim_geometric(
                    &cells,
                    &draw.model,
                    cfg.lambda_in,
                    cfg.gamma_db,
                    frames,
                    cfg.warmup,
                    cfg.master_seed,
                )?
            } else {
                let population =
                    population.unwrap_or_else(|| (cfg.lambda_in / cfg.rho).ceil() as usize);
                model_vs_sim_abstract(&cells, cfg.lambda_in, population, frames, cfg.master_seed)?
            };
            io::write_throughput(&out.join("throughput.csv"), &rows)?;
            for row in &rows {
                println!(
                    "theta={} p={:.5}: sim={:.2} model={:.2} (stderr {:.3})",
                    row.theta, row.p, row.lambda_out_sim, row.lambda_out_model, row.stderr
                );
            }
            println!("table in {}", out.join("throughput.csv").display());
        }
        Command::CalibrateDthr { common } => {
            let cfg = load(&common)?;
            let draw = calibration_draw(&cfg)?;
            if draw.threshold.no_multi_rrh_strong {
                println!(
                    "warning: no device is strong to two distinct RRHs on this draw; d_thr = 0"
                );
            }
            println!("d_thr = {}", draw.threshold.d_thr);
            if common.out.is_some() {
                let out = resolve_out(&common.out, "out-calibrate");
                std::fs::create_dir_all(&out)?;
                io::write_layout(&out.join("layout.csv"), draw.model.layout())?;
                io::write_gains(&out.join("gains.csv"), &io::gain_matrix_entries(&draw.gains))?;
                std::fs::write(out.join("dthr.txt"), format!("{}\n", draw.threshold.d_thr))?;
                println!("calibration artifacts in {}", out.display());
            }
        }
        Command::Run { common } => {
            let cfg = load(&common)?;
            let out = resolve_out(&common.out, &cfg.output_dir.clone());
            let output = run_experiment(&cfg, &out, true)?;
            println!("config hash {}", output.config_hash);
            println!("d_thr = {}", output.d_thr);
            for row in &output.summary {
                println!(
                    "{} theta={} window={}: auc={:.4}, p_d@0.05={:.4}",
                    row.method, row.theta, row.window, row.auc, row.detection_at_5pct
                );
            }
            println!("artifacts in {}", output.dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
