//! Frame-level protocol simulation and campaign loop.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::central::{merge_reports, CentralView};
use super::report::{DeviceId, RaReport, SlotOutcome};
use crate::error::Error;
use crate::geom::Point;
use crate::gscm::GainModel;
use crate::rng::substream;
use crate::Result;

/// Protocol parameters of one RA campaign.
#[derive(Debug, Clone)]
pub struct RaConfig {
    /// Pilot slots per RA block (T).
    pub slots: usize,
    /// Per-slot access probability (p).
    pub access_prob: f64,
    /// Mean device arrivals per frame.
    pub lambda_in: f64,
    /// Strong-link threshold in dB.
    pub strong_threshold_db: f64,
}

impl RaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::config("slots must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.access_prob) {
            return Err(Error::config(format!(
                "access_prob must be in [0, 1], got {}",
                self.access_prob
            )));
        }
        if !(self.lambda_in > 0.0) {
            return Err(Error::config("lambda_in must be > 0"));
        }
        Ok(())
    }
}

/// An active device waiting to be detected.
#[derive(Debug, Clone)]
pub struct Device {
    pub id: DeviceId,
    pub position: Point,
    /// Ground-truth sector gains in dB; empty in abstract mode.
    pub gains_db: Vec<f64>,
    /// Sectors whose gain meets the strong threshold, ascending.
    pub strong_sectors: Vec<usize>,
}

impl Device {
    pub fn with_gains(id: DeviceId, position: Point, gains_db: Vec<f64>, gamma_db: f64) -> Self {
        let strong_sectors = gains_db
            .iter()
            .enumerate()
            .filter(|(_, g)| **g >= gamma_db)
            .map(|(v, _)| v)
            .collect();
        Device { id, position, gains_db, strong_sectors }
    }
}

/// Queue of active devices at the start of a frame.
#[derive(Debug, Clone, Default)]
pub struct FrameState {
    pub frame: usize,
    pub active: Vec<Device>,
}

/// Draws Poisson arrivals and equips each new device with a fresh unique ID,
/// a uniform position and its ground-truth gain column.
pub struct DeviceSource<'a> {
    model: Option<&'a GainModel>,
    gamma_db: f64,
    area_side: f64,
    next_id: DeviceId,
    /// Devices that arrived with no strong sector anywhere; they can never
    /// be detected under the protocol rules.
    pub coverage_holes: usize,
}

impl<'a> DeviceSource<'a> {
    pub fn geometric(model: &'a GainModel, gamma_db: f64) -> Self {
        DeviceSource {
            area_side: model.layout().area_side,
            model: Some(model),
            gamma_db,
            next_id: 0,
            coverage_holes: 0,
        }
    }

    /// Source for abstract-q campaigns: devices carry no channel state.
    pub fn abstract_source() -> Self {
        DeviceSource { model: None, gamma_db: 0.0, area_side: 0.0, next_id: 0, coverage_holes: 0 }
    }

    /// Poisson(lambda_in) fresh arrivals.
    pub fn arrivals(&mut self, lambda_in: f64, rng: &mut impl Rng) -> Vec<Device> {
        let count = Poisson::new(lambda_in).expect("validated lambda").sample(rng) as usize;
        self.take(count, rng)
    }

    /// Exactly `count` fresh devices.
    pub fn take(&mut self, count: usize, rng: &mut impl Rng) -> Vec<Device> {
        match self.model {
            Some(model) => {
                let specs: Vec<(DeviceId, Point)> = (0..count)
                    .map(|_| {
                        let id = self.next_id;
                        self.next_id += 1;
                        let pos = Point::new(
                            rng.gen::<f64>() * self.area_side,
                            rng.gen::<f64>() * self.area_side,
                        );
                        (id, pos)
                    })
                    .collect();
                // Columns are pure functions of the position, so parallel
                // evaluation is identical to sequential order.
                let devices: Vec<Device> = specs
                    .par_iter()
                    .map(|(id, pos)| {
                        Device::with_gains(*id, *pos, model.gain_column(*pos), self.gamma_db)
                    })
                    .collect();
                self.coverage_holes +=
                    devices.iter().filter(|d| d.strong_sectors.is_empty()).count();
                devices
            }
            None => (0..count)
                .map(|_| {
                    let id = self.next_id;
                    self.next_id += 1;
                    Device {
                        id,
                        position: Point::new(0.0, 0.0),
                        gains_db: Vec::new(),
                        strong_sectors: Vec::new(),
                    }
                })
                .collect(),
        }
    }
}

/// Reference per-sector slot rule: with the given transmitters, a sector is
/// silent without strong transmitters, collides with two or more, and
/// detects a lone strong transmitter with its exact gain. Weak-link
/// transmitters never affect the outcome.
pub fn simulate_slot(transmitters: &[&Device], sector: usize, gamma_db: f64) -> SlotOutcome {
    let mut sole: Option<&Device> = None;
    let mut strong_count = 0usize;
    for device in transmitters {
        if device.gains_db[sector] >= gamma_db {
            strong_count += 1;
            if strong_count > 1 {
                return SlotOutcome::Collision;
            }
            sole = Some(device);
        }
    }
    match sole {
        None => SlotOutcome::Silence,
        Some(device) => {
            SlotOutcome::Detection { device: device.id, gain_db: device.gains_db[sector] }
        }
    }
}

/// Outcome of one simulated frame.
pub struct FrameResult {
    pub report: RaReport,
    pub view: CentralView,
    /// Devices detected this frame, ordered like the view's columns.
    pub detected: Vec<Device>,
    pub arrivals: usize,
    pub next: FrameState,
}

/// Simulate one RA block: Bernoulli pilot activity per (device, slot),
/// per-sector outcomes, report merging and queue update with fresh arrivals.
pub fn simulate_frame(
    state: FrameState,
    config: &RaConfig,
    sectors: usize,
    source: &mut DeviceSource,
    activity_rng: &mut ChaCha8Rng,
    arrivals_rng: &mut ChaCha8Rng,
) -> FrameResult {
    let mut report = RaReport::new(sectors, config.slots);
    // Slot-stamped counters avoid clearing V entries per slot.
    let mut stamp = vec![0u32; sectors];
    let mut count = vec![0u32; sectors];
    let mut sole = vec![0usize; sectors];
    let mut touched: Vec<usize> = Vec::new();
    let mut transmitters: Vec<usize> = Vec::new();
    let mut detected_flag = vec![false; state.active.len()];

    for slot in 0..config.slots {
        let epoch = slot as u32 + 1;
        transmitters.clear();
        for (idx, _) in state.active.iter().enumerate() {
            if activity_rng.gen_bool(config.access_prob) {
                transmitters.push(idx);
            }
        }
        touched.clear();
        for &idx in &transmitters {
            for &v in &state.active[idx].strong_sectors {
                if stamp[v] != epoch {
                    stamp[v] = epoch;
                    count[v] = 1;
                    sole[v] = idx;
                    touched.push(v);
                } else {
                    count[v] += 1;
                }
            }
        }
        for &v in &touched {
            let outcome = if count[v] == 1 {
                let device = &state.active[sole[v]];
                detected_flag[sole[v]] = true;
                SlotOutcome::Detection { device: device.id, gain_db: device.gains_db[v] }
            } else {
                SlotOutcome::Collision
            };
            report.set(slot, v, outcome);
        }
    }

    let view = merge_reports(&report);
    let mut remaining = Vec::with_capacity(state.active.len());
    let mut detected_pool = Vec::new();
    for (idx, device) in state.active.into_iter().enumerate() {
        if detected_flag[idx] {
            detected_pool.push(device);
        } else {
            remaining.push(device);
        }
    }
    // Order detected devices by their view column.
    let mut detected: Vec<Device> = Vec::with_capacity(detected_pool.len());
    for id in &view.detected {
        let pos = detected_pool.iter().position(|d| d.id == *id).expect("detected device");
        detected.push(detected_pool.swap_remove(pos));
    }
    debug_assert!(detected_pool.is_empty());

    let fresh = source.arrivals(config.lambda_in, arrivals_rng);
    let arrivals = fresh.len();
    let mut active = remaining;
    active.extend(fresh);
    FrameResult {
        report,
        view,
        detected,
        arrivals,
        next: FrameState { frame: state.frame + 1, active },
    }
}

/// Detection backend of a campaign.
pub enum CampaignMode<'a> {
    /// Full geometric channel: detection via strong links and collisions.
    Geometric { model: &'a GainModel },
    /// Abstract model: each active device is independently detected with
    /// probability `q` in every slot until its first detection; the queue
    /// evolves as usual.
    AbstractQ { q: f64 },
    /// Abstract model with the active population forced to a fixed size
    /// every frame (no queue dynamics).
    AbstractFixedPopulation { q: f64, population: usize },
}

/// Per-frame bookkeeping row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStatsRow {
    pub frame: usize,
    pub arrivals: usize,
    /// Active devices during the RA block.
    pub active: usize,
    pub detected: usize,
    /// Queue size after removing detections and adding arrivals.
    pub queue_after: usize,
}

/// Campaign aggregates. Rates are averaged over the post-warm-up frames.
#[derive(Debug, Clone)]
pub struct CampaignStats {
    pub rows: Vec<FrameStatsRow>,
    pub warmup: usize,
    pub lambda_out_hat: f64,
    pub lambda_ra_hat: f64,
    /// Standard error of the per-frame detection counts.
    pub detection_stderr: f64,
    pub coverage_holes: usize,
}

impl CampaignStats {
    /// Post-warm-up queue sizes, for stability checks.
    pub fn queue_series(&self) -> Vec<f64> {
        self.rows[self.warmup.min(self.rows.len())..]
            .iter()
            .map(|r| r.queue_after as f64)
            .collect()
    }
}

/// Everything the classification stage needs from one geometric frame.
pub struct FrameRecord {
    pub frame: usize,
    pub report: RaReport,
    pub view: CentralView,
    /// Ground-truth gain columns (dB) of the detected devices, in view
    /// column order.
    pub truth_db: Array2<f64>,
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Run `warmup + frames` RA frames and stream geometric frame records into
/// `sink`. Statistics cover the final `frames` frames only.
///
/// All randomness derives from `(seed, component label, frame index)`
/// substreams, so campaigns with the same seed are reproducible regardless
/// of what the sink does.
pub fn run_campaign(
    mode: CampaignMode,
    config: &RaConfig,
    frames: usize,
    warmup: usize,
    seed: u64,
    sink: &mut dyn FnMut(FrameRecord),
) -> Result<CampaignStats> {
    config.validate()?;
    let total = warmup + frames;
    let mut rows = Vec::with_capacity(total);

    match mode {
        CampaignMode::Geometric { model } => {
            let gamma = config.strong_threshold_db;
            let sectors = model.sector_count();
            let mut source = DeviceSource::geometric(model, gamma);
            let mut state = FrameState::default();
            for f in 0..total {
                let active = state.active.len();
                let mut activity = substream(seed, "activity", f as u64);
                let mut arrivals_rng = substream(seed, "arrivals", f as u64);
                let result =
                    simulate_frame(state, config, sectors, &mut source, &mut activity, &mut arrivals_rng);
                rows.push(FrameStatsRow {
                    frame: f,
                    arrivals: result.arrivals,
                    active,
                    detected: result.detected.len(),
                    queue_after: result.next.active.len(),
                });
                let truth_db = truth_columns(sectors, &result.detected);
                sink(FrameRecord { frame: f, report: result.report, view: result.view, truth_db });
                state = result.next;
            }
            finish(rows, warmup, source.coverage_holes)
        }
        CampaignMode::AbstractQ { q } => {
            validate_q(q)?;
            let mut source = DeviceSource::abstract_source();
            let mut active: Vec<Device> = Vec::new();
            for f in 0..total {
                let mut activity = substream(seed, "abstract-activity", f as u64);
                let mut arrivals_rng = substream(seed, "arrivals", f as u64);
                let before = active.len();
                let detected = abstract_detections(&mut active, q, config.slots, &mut activity);
                let fresh = source.arrivals(config.lambda_in, &mut arrivals_rng);
                let arrivals = fresh.len();
                active.extend(fresh);
                rows.push(FrameStatsRow {
                    frame: f,
                    arrivals,
                    active: before,
                    detected,
                    queue_after: active.len(),
                });
            }
            finish(rows, warmup, 0)
        }
        CampaignMode::AbstractFixedPopulation { q, population } => {
            validate_q(q)?;
            for f in 0..total {
                let mut activity = substream(seed, "abstract-activity", f as u64);
                let mut detected = 0usize;
                for _ in 0..population {
                    for _ in 0..config.slots {
                        if activity.gen_bool(q) {
                            detected += 1;
                            break;
                        }
                    }
                }
                rows.push(FrameStatsRow {
                    frame: f,
                    arrivals: population,
                    active: population,
                    detected,
                    queue_after: 0,
                });
            }
            finish(rows, warmup, 0)
        }
    }
}

fn validate_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::config(format!("q must be in [0, 1], got {q}")));
    }
    Ok(())
}

/// Remove detected devices in place; returns how many were detected.
fn abstract_detections(
    active: &mut Vec<Device>,
    q: f64,
    slots: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut kept = Vec::with_capacity(active.len());
    let mut detected = 0usize;
    for device in active.drain(..) {
        let mut hit = false;
        for _ in 0..slots {
            if rng.gen_bool(q) {
                hit = true;
                break;
            }
        }
        if hit {
            detected += 1;
        } else {
            kept.push(device);
        }
    }
    *active = kept;
    detected
}

fn truth_columns(sectors: usize, detected: &[Device]) -> Array2<f64> {
    let mut truth = Array2::zeros((sectors, detected.len()));
    for (j, device) in detected.iter().enumerate() {
        for v in 0..sectors {
            truth[[v, j]] = device.gains_db[v];
        }
    }
    truth
}

fn finish(rows: Vec<FrameStatsRow>, warmup: usize, coverage_holes: usize) -> Result<CampaignStats> {
    let eval = &rows[warmup.min(rows.len())..];
    let (lambda_out_hat, detection_stderr) =
        mean_and_stderr(eval.iter().map(|r| r.detected as f64));
    let (lambda_ra_hat, _) = mean_and_stderr(eval.iter().map(|r| r.active as f64));
    Ok(CampaignStats { rows, warmup, lambda_out_hat, lambda_ra_hat, detection_stderr, coverage_holes })
}
