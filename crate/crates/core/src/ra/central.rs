//! Central-unit view: merged per-sector reports.

use std::collections::{BTreeMap, HashMap};

use super::report::{DeviceId, RaReport, SlotOutcome};

/// Everything the central unit learns from one RA block.
///
/// Detected devices are re-indexed to columns `0..|detected|`, ordered by
/// first detection slot and then by sector index within that slot, so the
/// ordering is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralView {
    pub sectors: usize,
    pub slots: usize,
    /// Device IDs by column.
    pub detected: Vec<DeviceId>,
    /// Per slot, per sector: true when the sector reported silence.
    pub silence: Vec<Vec<bool>>,
    /// Per slot: `(sector, device column)` detections, sector-ascending.
    pub detections_by_slot: Vec<Vec<(usize, usize)>>,
    /// Per device column: sectors that detected it, sorted.
    pub detector_sectors: Vec<Vec<usize>>,
    /// Per device column: slots in which it was detected anywhere, sorted.
    pub detection_slots: Vec<Vec<usize>>,
    /// `(sector, device column) -> exact link gain in dB` for every
    /// detection event.
    pub known_gains: BTreeMap<(usize, usize), f64>,
    column_by_id: HashMap<DeviceId, usize>,
}

impl CentralView {
    pub fn device_count(&self) -> usize {
        self.detected.len()
    }

    pub fn column_of(&self, id: DeviceId) -> Option<usize> {
        self.column_by_id.get(&id).copied()
    }

    /// Sectors that detected a device other than column `col` in `slot`.
    pub fn other_detectors(&self, slot: usize, col: usize) -> impl Iterator<Item = usize> + '_ {
        self.detections_by_slot[slot]
            .iter()
            .filter(move |(_, j)| *j != col)
            .map(|(sector, _)| *sector)
    }
}

/// Merge a dense report into the central-unit view.
pub fn merge_reports(report: &RaReport) -> CentralView {
    let sectors = report.sectors();
    let slots = report.slots();
    let mut detected: Vec<DeviceId> = Vec::new();
    let mut column_by_id: HashMap<DeviceId, usize> = HashMap::new();
    let mut silence = vec![vec![false; sectors]; slots];
    let mut detections_by_slot: Vec<Vec<(usize, usize)>> = vec![Vec::new(); slots];
    let mut detector_sectors: Vec<Vec<usize>> = Vec::new();
    let mut detection_slots: Vec<Vec<usize>> = Vec::new();
    let mut known_gains = BTreeMap::new();

    for (slot, sector, outcome) in report.outcomes() {
        match outcome {
            SlotOutcome::Silence => silence[slot][sector] = true,
            SlotOutcome::Collision => {}
            SlotOutcome::Detection { device, gain_db } => {
                let col = *column_by_id.entry(*device).or_insert_with(|| {
                    detected.push(*device);
                    detector_sectors.push(Vec::new());
                    detection_slots.push(Vec::new());
                    detected.len() - 1
                });
                detections_by_slot[slot].push((sector, col));
                if !detector_sectors[col].contains(&sector) {
                    detector_sectors[col].push(sector);
                }
                if detection_slots[col].last() != Some(&slot) {
                    detection_slots[col].push(slot);
                }
                known_gains.insert((sector, col), *gain_db);
            }
        }
    }
    for list in &mut detector_sectors {
        list.sort_unstable();
    }

    CentralView {
        sectors,
        slots,
        detected,
        silence,
        detections_by_slot,
        detector_sectors,
        detection_slots,
        known_gains,
        column_by_id,
    }
}
