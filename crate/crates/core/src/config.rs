//! Experiment configuration: a flat key-value text format.
//!
//! Every key has a default matching the reference operating point
//! (lambda_in 500, rho 0.99, strong threshold -18 dB, theta grid
//! 0.2/0.5/1.0), so an empty file is a valid full configuration. Unknown
//! keys and malformed values are rejected with the key named in the error.
//! The canonical rendering of a config doubles as the manifest body: it
//! reparses to the same config and hashes deterministically.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::classify::{McParams, SolverMode};
use crate::error::Error;
use crate::gscm::{ChannelParams, GeometryConfig};
use crate::ra::{p_star, RaConfig};
use crate::Result;

/// Full harness configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub output_dir: String,
    pub geometry: GeometryConfig,
    pub channel: ChannelParams,
    /// Mean arrivals per frame.
    pub lambda_in: f64,
    /// Delay-target parameter in (0, 1).
    pub rho: f64,
    /// Strong-link threshold, dB.
    pub gamma_db: f64,
    /// Relative RA overheads to evaluate; T = round(theta * lambda_in).
    pub thetas: Vec<f64>,
    /// Fixed access probability; unset means p*(theta).
    pub p_override: Option<f64>,
    /// Evaluation frames per theta.
    pub frames: usize,
    /// Frames simulated before statistics and classification start.
    pub warmup: usize,
    /// Largest frame window for the completion classifier.
    pub window: usize,
    /// Number of alpha values in the baseline sweep.
    pub alpha_steps: usize,
    /// Number of beta values in the completion sweep.
    pub beta_steps: usize,
    pub mc_regularization: f64,
    pub mc_rank: usize,
    pub mc_step_size: f64,
    pub mc_max_iters: usize,
    pub mc_stop_error: f64,
    /// Weak pseudo-observation value; unset means gamma_db.
    pub mc_weak_target_db: Option<f64>,
    pub mc_solver: SolverMode,
    /// Distance threshold for the geographic rule; unset means calibrate.
    pub d_thr: Option<f64>,
    /// Additionally report rates restricted to unknown cells.
    pub unknown_only: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 1,
            output_dir: "out".to_string(),
            geometry: GeometryConfig::default(),
            channel: ChannelParams::default(),
            lambda_in: 500.0,
            rho: 0.99,
            gamma_db: -18.0,
            thetas: vec![0.2, 0.5, 1.0],
            p_override: None,
            frames: 5,
            warmup: 20,
            window: 2,
            alpha_steps: 11,
            beta_steps: 25,
            mc_regularization: 20.0,
            mc_rank: 200,
            mc_step_size: 5e-5,
            mc_max_iters: 1000,
            mc_stop_error: 1e-2,
            mc_weak_target_db: None,
            mc_solver: SolverMode::Als,
            d_thr: None,
            unknown_only: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.channel.validate()?;
        if !(self.lambda_in > 0.0) {
            return Err(Error::config("lambda_in must be > 0"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::config("rho must be in (0, 1)"));
        }
        if !self.gamma_db.is_finite() {
            return Err(Error::config("gamma_db must be finite"));
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::config("theta must list positive values"));
        }
        if let Some(p) = self.p_override {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config("p must be in [0, 1]"));
            }
        }
        if self.frames == 0 {
            return Err(Error::config("frames must be >= 1"));
        }
        if self.window == 0 {
            return Err(Error::config("window must be >= 1"));
        }
        if self.alpha_steps < 2 || self.beta_steps < 2 {
            return Err(Error::config("alpha_steps and beta_steps must be >= 2"));
        }
        if let Some(d) = self.d_thr {
            if !(d >= 0.0) {
                return Err(Error::config("d_thr must be >= 0"));
            }
        }
        self.mc_params().validate()
    }

    /// Completion parameters with the weak target defaulted to gamma.
    pub fn mc_params(&self) -> McParams {
        McParams {
            regularization: self.mc_regularization,
            rank: self.mc_rank,
            step_size: self.mc_step_size,
            max_iters: self.mc_max_iters,
            stop_error: self.mc_stop_error,
            weak_target_db: self.mc_weak_target_db.unwrap_or(self.gamma_db),
            solver: self.mc_solver,
        }
    }

    /// Protocol configuration for one theta, with the access probability
    /// taken from the override or the closed-form operating point.
    pub fn ra_config(&self, theta: f64) -> Result<RaConfig> {
        let slots = ((theta * self.lambda_in).round() as usize).max(1);
        let access_prob = match self.p_override {
            Some(p) => p,
            None => p_star(self.rho, self.lambda_in, theta)?,
        };
        Ok(RaConfig {
            slots,
            access_prob,
            lambda_in: self.lambda_in,
            strong_threshold_db: self.gamma_db,
        })
    }

    /// Canonical key-value rendering; reparses to an equal config.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("write to string");
        kv("master_seed", self.master_seed.to_string());
        kv("output_dir", self.output_dir.clone());
        kv("area_side", self.geometry.area_side.to_string());
        kv("rrh_count", self.geometry.rrh_count.to_string());
        kv("device_count", self.geometry.device_count.to_string());
        kv("scatterer_count", self.geometry.scatterer_count.to_string());
        kv("blocker_count", self.geometry.blocker_count.to_string());
        kv("blocker_radius", self.geometry.blocker_radius.to_string());
        kv("ppp_counts", self.geometry.poisson_counts.to_string());
        kv("antennas", self.channel.antennas.to_string());
        kv("sectors_per_rrh", self.channel.sectors_per_rrh.to_string());
        kv("antenna_spacing", self.channel.antenna_spacing.to_string());
        kv("breakpoint_m", self.channel.breakpoint_m.to_string());
        kv("pathloss_exp", self.channel.pathloss_exp.to_string());
        kv("nlos_attenuation", self.channel.nlos_attenuation.to_string());
        kv("path_prune_floor", self.channel.path_prune_floor.to_string());
        kv("linear_floor", self.channel.linear_floor.to_string());
        kv("lambda_in", self.lambda_in.to_string());
        kv("rho", self.rho.to_string());
        kv("gamma_db", self.gamma_db.to_string());
        let thetas: Vec<String> = self.thetas.iter().map(|t| t.to_string()).collect();
        kv("theta", thetas.join(","));
        if let Some(p) = self.p_override {
            kv("p", p.to_string());
        }
        kv("frames", self.frames.to_string());
        kv("warmup", self.warmup.to_string());
        kv("window", self.window.to_string());
        kv("alpha_steps", self.alpha_steps.to_string());
        kv("beta_steps", self.beta_steps.to_string());
        kv("mc_regularization", self.mc_regularization.to_string());
        kv("mc_rank", self.mc_rank.to_string());
        kv("mc_step_size", self.mc_step_size.to_string());
        kv("mc_max_iters", self.mc_max_iters.to_string());
        kv("mc_stop_error", self.mc_stop_error.to_string());
        if let Some(w) = self.mc_weak_target_db {
            kv("mc_weak_target_db", w.to_string());
        }
        let solver = match self.mc_solver {
            SolverMode::Als => "als",
            SolverMode::Gradient => "gradient",
        };
        kv("mc_solver", solver.to_string());
        if let Some(d) = self.d_thr {
            kv("d_thr", d.to_string());
        }
        kv("unknown_only", self.unknown_only.to_string());
        s
    }

    /// SHA-256 of the canonical rendering, hex-encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value for `{key}`: `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid value for `{key}`: expected true/false, got `{value}`"
        ))),
    }
}

/// Parse configuration text, starting from defaults. Lines are
/// `key = value`; `#` starts a comment line; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "master_seed" => cfg.master_seed = parse_value(key, value)?,
            "output_dir" => cfg.output_dir = value.to_string(),
            "area_side" => cfg.geometry.area_side = parse_value(key, value)?,
            "rrh_count" => cfg.geometry.rrh_count = parse_value(key, value)?,
            "device_count" => cfg.geometry.device_count = parse_value(key, value)?,
            "scatterer_count" => cfg.geometry.scatterer_count = parse_value(key, value)?,
            "blocker_count" => cfg.geometry.blocker_count = parse_value(key, value)?,
            "blocker_radius" => cfg.geometry.blocker_radius = parse_value(key, value)?,
            "ppp_counts" => cfg.geometry.poisson_counts = parse_bool(key, value)?,
            "antennas" => cfg.channel.antennas = parse_value(key, value)?,
            "sectors_per_rrh" => cfg.channel.sectors_per_rrh = parse_value(key, value)?,
            "antenna_spacing" => cfg.channel.antenna_spacing = parse_value(key, value)?,
            "breakpoint_m" => cfg.channel.breakpoint_m = parse_value(key, value)?,
            "pathloss_exp" => cfg.channel.pathloss_exp = parse_value(key, value)?,
            "nlos_attenuation" => cfg.channel.nlos_attenuation = parse_value(key, value)?,
            "path_prune_floor" => cfg.channel.path_prune_floor = parse_value(key, value)?,
            "linear_floor" => cfg.channel.linear_floor = parse_value(key, value)?,
            "lambda_in" => cfg.lambda_in = parse_value(key, value)?,
            "rho" => cfg.rho = parse_value(key, value)?,
            "gamma_db" => cfg.gamma_db = parse_value(key, value)?,
            "theta" => {
                let mut thetas = Vec::new();
                for part in value.split(',') {
                    thetas.push(parse_value::<f64>(key, part.trim())?);
                }
                cfg.thetas = thetas;
            }
            "p" => cfg.p_override = Some(parse_value(key, value)?),
            "frames" => cfg.frames = parse_value(key, value)?,
            "warmup" => cfg.warmup = parse_value(key, value)?,
            "window" => cfg.window = parse_value(key, value)?,
            "alpha_steps" => cfg.alpha_steps = parse_value(key, value)?,
            "beta_steps" => cfg.beta_steps = parse_value(key, value)?,
            "mc_regularization" => cfg.mc_regularization = parse_value(key, value)?,
            "mc_rank" => cfg.mc_rank = parse_value(key, value)?,
            "mc_step_size" => cfg.mc_step_size = parse_value(key, value)?,
            "mc_max_iters" => cfg.mc_max_iters = parse_value(key, value)?,
            "mc_stop_error" => cfg.mc_stop_error = parse_value(key, value)?,
            "mc_weak_target_db" => cfg.mc_weak_target_db = Some(parse_value(key, value)?),
            "mc_solver" => {
                cfg.mc_solver = match value {
                    "als" => SolverMode::Als,
                    "gradient" => SolverMode::Gradient,
                    _ => {
                        return Err(Error::Config(format!(
                            "invalid value for `mc_solver`: expected als/gradient, got `{value}`"
                        )))
                    }
                }
            }
            "d_thr" => cfg.d_thr = Some(parse_value(key, value)?),
            "unknown_only" => cfg.unknown_only = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Load a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text)
}

/// The complete default configuration in canonical form, for
/// `--print-defaults`.
pub fn default_config_text() -> String {
    ExperimentConfig::default().canonical_text()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.lambda_in, 500.0);
        assert_eq!(cfg.rho, 0.99);
        assert_eq!(cfg.gamma_db, -18.0);
        assert_eq!(cfg.thetas, vec![0.2, 0.5, 1.0]);
    }

    #[test]
    fn theta_override_and_comments() {
        let cfg = parse_config("# comment\n\ntheta = 0.2\nframes = 3\n").unwrap();
        assert_eq!(cfg.thetas, vec![0.2]);
        assert_eq!(cfg.frames, 3);
    }

    #[test]
    fn type_error_names_the_key() {
        let err = parse_config("theta = \"abc\"").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("theta"), "{msg}");
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = parse_config("shoe_size = 43").unwrap_err();
        assert!(err.to_string().contains("shoe_size"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let cfg = ExperimentConfig {
            master_seed: 99,
            p_override: Some(0.031),
            d_thr: Some(77.5),
            mc_weak_target_db: Some(-20.0),
            mc_solver: SolverMode::Gradient,
            thetas: vec![0.25, 1.5],
            ..ExperimentConfig::default()
        };
        let text = cfg.canonical_text();
        let reparsed = parse_config(&text).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.config_hash(), cfg.config_hash());
    }

    #[test]
    fn hash_changes_with_any_key() {
        let base = ExperimentConfig::default();
        let other = ExperimentConfig { warmup: 21, ..base.clone() };
        assert_ne!(base.config_hash(), other.config_hash());
    }

    #[test]
    fn ra_config_uses_closed_form_p() {
        let cfg = ExperimentConfig::default();
        let ra = cfg.ra_config(0.2).unwrap();
        assert_eq!(ra.slots, 100);
        let expect = 1.0 - (0.01f64.ln() * 0.01).exp();
        approx::assert_relative_eq!(ra.access_prob, expect, max_relative = 1e-12);
        let overridden =
            ExperimentConfig { p_override: Some(0.123), ..ExperimentConfig::default() };
        approx::assert_relative_eq!(overridden.ra_config(0.2).unwrap().access_prob, 0.123);
    }

    #[test]
    fn weak_target_defaults_to_gamma() {
        let cfg = parse_config("gamma_db = -21").unwrap();
        assert_eq!(cfg.mc_params().weak_target_db, -21.0);
        let cfg = parse_config("gamma_db = -21\nmc_weak_target_db = -25").unwrap();
        assert_eq!(cfg.mc_params().weak_target_db, -25.0);
    }

    #[test]
    fn invalid_semantics_are_rejected() {
        assert!(parse_config("rho = 1.0").is_err());
        assert!(parse_config("theta = -0.2").is_err());
        assert!(parse_config("antennas = 63").is_err());
        assert!(parse_config("window = 0").is_err());
    }
}
