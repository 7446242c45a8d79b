//! CSV artifacts and the run manifest.
//!
//! All numeric formatting goes through the shortest round-trip `Display`
//! form, so identical runs produce byte-identical files.

use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::Error;
use crate::eval::{RocCurve, ThroughputRow};
use crate::gscm::{Blocker, NetworkLayout, SectorGainMatrix};
use crate::geom::Point;
use crate::ra::{CampaignStats, DeviceId, RaReport, SlotOutcome};
use crate::Result;
use ndarray::Array2;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

/// `layout.csv`: one row per entity plus an `area` row carrying the side
/// length. RRH rows store their sector orientation in `extra`, blockers
/// their radius.
pub fn write_layout(path: &Path, layout: &NetworkLayout) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["entity", "id", "x", "y", "extra"])?;
    w.write_record(["area", "0", &layout.area_side.to_string(), "0", ""])?;
    for (i, p) in layout.rrh_positions.iter().enumerate() {
        w.write_record([
            "rrh",
            &i.to_string(),
            &p.x.to_string(),
            &p.y.to_string(),
            &layout.sector_orientations[i].to_string(),
        ])?;
    }
    for (i, p) in layout.device_positions.iter().enumerate() {
        w.write_record(["device", &i.to_string(), &p.x.to_string(), &p.y.to_string(), ""])?;
    }
    for (i, p) in layout.scatterer_positions.iter().enumerate() {
        w.write_record(["scatterer", &i.to_string(), &p.x.to_string(), &p.y.to_string(), ""])?;
    }
    for (i, b) in layout.blockers.iter().enumerate() {
        w.write_record([
            "blocker",
            &i.to_string(),
            &b.center.x.to_string(),
            &b.center.y.to_string(),
            &b.radius.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, what: &str) -> Result<T> {
    record
        .get(idx)
        .ok_or_else(|| Error::Config(format!("layout row missing {what}")))?
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {what} in `{record:?}`")))
}

/// Read a layout written by [`write_layout`].
pub fn read_layout(path: &Path) -> Result<NetworkLayout> {
    let mut r = csv::Reader::from_path(path)?;
    let mut layout = NetworkLayout {
        rrh_positions: Vec::new(),
        sector_orientations: Vec::new(),
        device_positions: Vec::new(),
        scatterer_positions: Vec::new(),
        blockers: Vec::new(),
        area_side: 0.0,
    };
    for record in r.records() {
        let record = record?;
        let entity = record.get(0).unwrap_or("");
        let x: f64 = field(&record, 2, "x")?;
        let y: f64 = field(&record, 3, "y")?;
        match entity {
            "area" => layout.area_side = x,
            "rrh" => {
                layout.rrh_positions.push(Point::new(x, y));
                layout.sector_orientations.push(field(&record, 4, "orientation")?);
            }
            "device" => layout.device_positions.push(Point::new(x, y)),
            "scatterer" => layout.scatterer_positions.push(Point::new(x, y)),
            "blocker" => layout.blockers.push(Blocker {
                center: Point::new(x, y),
                radius: field(&record, 4, "radius")?,
            }),
            other => return Err(Error::Config(format!("unknown layout entity `{other}`"))),
        }
    }
    Ok(layout)
}

/// `gains.csv`: ground-truth sector-device gains keyed by global device ID.
pub fn write_gains(path: &Path, entries: &[(usize, DeviceId, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["sector_id", "device_id", "gain_db"])?;
    for (sector, device, gain) in entries {
        w.write_record([&sector.to_string(), &device.to_string(), &gain.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Gain entries of a full matrix over a static device population, with
/// device IDs equal to their layout index.
pub fn gain_matrix_entries(gains: &SectorGainMatrix) -> Vec<(usize, DeviceId, f64)> {
    let mut entries = Vec::with_capacity(gains.sectors() * gains.devices());
    for v in 0..gains.sectors() {
        for k in 0..gains.devices() {
            entries.push((v, k as DeviceId, gains.get(v, k)));
        }
    }
    entries
}

/// `campaign.csv`: one row per simulated frame.
pub fn write_campaign(path: &Path, stats: &CampaignStats) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["frame", "arrivals", "active", "detected", "queue"])?;
    for row in &stats.rows {
        w.write_record([
            &row.frame.to_string(),
            &row.arrivals.to_string(),
            &row.active.to_string(),
            &row.detected.to_string(),
            &row.queue_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `view_<frame>.csv`: the dense per-sector, per-slot report. Silence and
/// collision rows leave the device and gain fields empty.
pub fn write_view(path: &Path, report: &RaReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["slot", "sector", "outcome", "device", "gain_db"])?;
    for (slot, sector, outcome) in report.outcomes() {
        let (kind, device, gain) = match outcome {
            SlotOutcome::Silence => ("silence", String::new(), String::new()),
            SlotOutcome::Collision => ("collision", String::new(), String::new()),
            SlotOutcome::Detection { device, gain_db } => {
                ("detection", device.to_string(), gain_db.to_string())
            }
        };
        w.write_record([&slot.to_string(), &sector.to_string(), kind, &device, &gain])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a view file back into a dense report. Missing cells default to
/// silence; duplicate cells are a malformed report.
pub fn read_view(path: &Path) -> Result<RaReport> {
    let mut r = csv::Reader::from_path(path)?;
    let mut entries: Vec<(usize, usize, SlotOutcome)> = Vec::new();
    let mut slots = 0usize;
    let mut sectors = 0usize;
    for record in r.records() {
        let record = record?;
        let slot: usize = field(&record, 0, "slot")?;
        let sector: usize = field(&record, 1, "sector")?;
        slots = slots.max(slot + 1);
        sectors = sectors.max(sector + 1);
        let outcome = match record.get(2).unwrap_or("") {
            "silence" => SlotOutcome::Silence,
            "collision" => SlotOutcome::Collision,
            "detection" => SlotOutcome::Detection {
                device: field(&record, 3, "device")?,
                gain_db: field(&record, 4, "gain_db")?,
            },
            other => return Err(Error::Config(format!("unknown outcome `{other}`"))),
        };
        // Silence is the default; only keep informative rows as entries so
        // duplicates are still caught through the explicit ones.
        entries.push((slot, sector, outcome));
    }
    RaReport::from_entries(sectors, slots, entries)
}

/// `chat_<frame>.csv`: predicted hypothesis matrix with device IDs and a
/// flag marking pass-through (known) cells.
pub fn write_chat(
    path: &Path,
    chat: &Array2<u8>,
    device_ids: &[DeviceId],
    known: &Array2<bool>,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["sector", "device", "predicted", "known_flag"])?;
    for ((i, j), value) in chat.indexed_iter() {
        let flag = if known[[i, j]] { "1" } else { "0" };
        w.write_record([
            i.to_string().as_str(),
            device_ids[j].to_string().as_str(),
            value.to_string().as_str(),
            flag,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `fit_trace.csv`: solver iterations.
pub fn write_fit_trace(path: &Path, trace: &[crate::classify::FitTracePoint]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iter", "objective", "normalized_error"])?;
    for point in trace {
        w.write_record([
            &point.iter.to_string(),
            &point.objective.to_string(),
            &point.normalized_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `roc_<method>.csv`: control value and the rates it produced.
pub fn write_roc(path: &Path, curve: &RocCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["control", "p_f", "p_d"])?;
    for point in &curve.points {
        w.write_record([
            &point.control.to_string(),
            &point.false_alarm.to_string(),
            &point.detection.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One `summary.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub theta: f64,
    pub window: usize,
    pub auc: f64,
    pub detection_at_5pct: f64,
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["method", "theta", "window", "auc", "p_d_at_pf_0.05"])?;
    for row in rows {
        w.write_record([
            &row.method,
            &row.theta.to_string(),
            &row.window.to_string(),
            &row.auc.to_string(),
            &row.detection_at_5pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `throughput.csv`: the model-versus-simulation table.
pub fn write_throughput(path: &Path, rows: &[ThroughputRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["theta", "p", "lambda_out_sim", "lambda_out_model", "stderr"])?;
    for row in rows {
        w.write_record([
            &row.theta.to_string(),
            &row.p.to_string(),
            &row.lambda_out_sim.to_string(),
            &row.lambda_out_model.to_string(),
            &row.stderr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `manifest.txt`: comment header plus the canonical config, so the file
/// itself reloads as a configuration for replay.
pub fn manifest_text(cfg: &ExperimentConfig, extra: &[(String, String)]) -> String {
    let mut s = String::new();
    s.push_str("# cranra run manifest\n");
    s.push_str(&format!("# version = {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("# config_hash = {}\n", cfg.config_hash()));
    s.push_str(&format!("# master_seed = {}\n", cfg.master_seed));
    for (k, v) in extra {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&cfg.canonical_text());
    s
}

pub fn write_manifest(
    path: &Path,
    cfg: &ExperimentConfig,
    extra: &[(String, String)],
) -> Result<()> {
    std::fs::write(path, manifest_text(cfg, extra))?;
    Ok(())
}
