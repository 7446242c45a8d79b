//! Simulated throughput against the rule-of-thumb model.

use crate::gscm::GainModel;
use crate::ra::{model_lambda_out, run_campaign, CampaignMode, RaConfig};
use crate::rng::derive_seed;
use crate::Result;

/// One (theta, p) grid cell of a throughput table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputRow {
    pub theta: f64,
    pub p: f64,
    pub lambda_out_sim: f64,
    pub lambda_out_model: f64,
    /// Standard error of the simulated per-frame detections.
    pub stderr: f64,
}

fn slot_count(theta: f64, lambda_in: f64) -> usize {
    ((theta * lambda_in).round() as usize).max(1)
}

/// Abstract-q grid: the active population is forced to `population` devices
/// every frame and each is detected per slot with probability `p`, which is
/// exactly the rudimentary model behind the closed form.
pub fn model_vs_sim_abstract(
    cells: &[(f64, f64)],
    lambda_in: f64,
    population: usize,
    frames: usize,
    seed: u64,
) -> Result<Vec<ThroughputRow>> {
    let mut rows = Vec::with_capacity(cells.len());
    for (idx, &(theta, p)) in cells.iter().enumerate() {
        let slots = slot_count(theta, lambda_in);
        let config =
            RaConfig { slots, access_prob: p, lambda_in, strong_threshold_db: 0.0 };
        let stats = run_campaign(
            CampaignMode::AbstractFixedPopulation { q: p, population },
            &config,
            frames,
            0,
            derive_seed(seed, &format!("throughput-cell-{idx}")),
            &mut |_| {},
        )?;
        rows.push(ThroughputRow {
            theta,
            p,
            lambda_out_sim: stats.lambda_out_hat,
            lambda_out_model: model_lambda_out(p, slots, population as f64),
            stderr: stats.detection_stderr,
        });
    }
    Ok(rows)
}

/// Geometric-channel grid: full campaigns per cell, with the measured active
/// rate plugged into the model.
#[allow(clippy::too_many_arguments)]
pub fn model_vs_sim_geometric(
    cells: &[(f64, f64)],
    model: &GainModel,
    lambda_in: f64,
    gamma_db: f64,
    frames: usize,
    warmup: usize,
    seed: u64,
) -> Result<Vec<ThroughputRow>> {
    let mut rows = Vec::with_capacity(cells.len());
    for (idx, &(theta, p)) in cells.iter().enumerate() {
        let slots = slot_count(theta, lambda_in);
        let config = RaConfig { slots, access_prob: p, lambda_in, strong_threshold_db: gamma_db };
        let stats = run_campaign(
            CampaignMode::Geometric { model },
            &config,
            frames,
            warmup,
            derive_seed(seed, &format!("throughput-cell-{idx}")),
            &mut |_| {},
        )?;
        rows.push(ThroughputRow {
            theta,
            p,
            lambda_out_sim: stats.lambda_out_hat,
            lambda_out_model: model_lambda_out(p, slots, stats.lambda_ra_hat),
            stderr: stats.detection_stderr,
        });
    }
    Ok(rows)
}
