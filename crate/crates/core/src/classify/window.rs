//! Multi-frame windowing: one completion over the devices of several frames.

use std::collections::HashMap;

use super::omega::ObservationSets;
use crate::ra::{CentralView, DeviceId};

/// Observation sets merged over a window of frames.
#[derive(Debug, Clone)]
pub struct WindowStack {
    pub merged: ObservationSets,
    /// Device ID of each merged column.
    pub device_ids: Vec<DeviceId>,
    /// Merged column index of each current-frame column, in the current
    /// view's column order.
    pub current_columns: Vec<usize>,
    /// Cells reported strong in several frames with disagreeing gains.
    /// Devices are stationary, so this should stay zero.
    pub gain_conflicts: usize,
}

/// Stack the views of the last W frames (oldest first, current last).
///
/// A device detected in several frames gets a single column keyed by its ID;
/// its known cells are merged across frames with known-strong entries taking
/// precedence over inferred weaks. Classification downstream is restricted
/// to the current-frame columns via `current_columns`.
pub fn window_stack(frames: &[(&CentralView, &ObservationSets)]) -> WindowStack {
    assert!(!frames.is_empty(), "window needs at least one frame");
    let sectors = frames[0].0.sectors;
    assert!(frames.iter().all(|(v, _)| v.sectors == sectors), "sector count must match");

    let mut device_ids: Vec<DeviceId> = Vec::new();
    let mut column_of: HashMap<DeviceId, usize> = HashMap::new();
    for (view, _) in frames {
        for &id in &view.detected {
            column_of.entry(id).or_insert_with(|| {
                device_ids.push(id);
                device_ids.len() - 1
            });
        }
    }

    let mut merged = ObservationSets::new(sectors, device_ids.len());
    let mut gain_conflicts = 0usize;
    for (view, obs) in frames {
        for (i, j, gain) in obs.strong_entries() {
            let col = column_of[&view.detected[j]];
            if let Some(existing) = merged.strong(i, col) {
                if (existing - gain).abs() > 1e-9 {
                    gain_conflicts += 1;
                }
            }
            merged.insert_strong(i, col, gain);
        }
        for (i, j) in obs.weak_entries() {
            merged.insert_weak(i, col_of(&column_of, view, j));
        }
    }

    let current_view = frames.last().unwrap().0;
    let current_columns = current_view.detected.iter().map(|id| column_of[id]).collect();
    WindowStack { merged, device_ids, current_columns, gain_conflicts }
}

fn col_of(column_of: &HashMap<DeviceId, usize>, view: &CentralView, j: usize) -> usize {
    column_of[&view.detected[j]]
}
