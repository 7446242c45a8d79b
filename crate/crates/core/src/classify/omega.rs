//! Observation sets: cells of the hypothesis matrix known from RA reports.

use ndarray::Array2;

use crate::geom::Point;
use crate::ra::CentralView;

/// Binarize ground-truth gains against the strong threshold.
pub fn hypothesis_matrix(truth_db: &Array2<f64>, gamma_db: f64) -> Array2<u8> {
    truth_db.mapv(|g| u8::from(g >= gamma_db))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Unknown,
    Strong(f64),
    Weak,
}

/// Known-strong cells with their gains and inferred-weak cells over a
/// `sectors x devices` grid.
///
/// Strong entries take precedence: inserting a weak mark over a strong cell
/// is a no-op, inserting a strong value over a weak mark overwrites it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSets {
    sectors: usize,
    devices: usize,
    cells: Vec<Cell>,
    strong_count: usize,
    weak_count: usize,
}

impl ObservationSets {
    pub fn new(sectors: usize, devices: usize) -> Self {
        ObservationSets {
            sectors,
            devices,
            cells: vec![Cell::Unknown; sectors * devices],
            strong_count: 0,
            weak_count: 0,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.sectors, self.devices)
    }

    fn idx(&self, sector: usize, device: usize) -> usize {
        debug_assert!(sector < self.sectors && device < self.devices);
        sector * self.devices + device
    }

    pub fn insert_strong(&mut self, sector: usize, device: usize, gain_db: f64) {
        let idx = self.idx(sector, device);
        match self.cells[idx] {
            Cell::Strong(_) => {}
            Cell::Weak => {
                self.weak_count -= 1;
                self.strong_count += 1;
                self.cells[idx] = Cell::Strong(gain_db);
            }
            Cell::Unknown => {
                self.strong_count += 1;
                self.cells[idx] = Cell::Strong(gain_db);
            }
        }
    }

    pub fn insert_weak(&mut self, sector: usize, device: usize) {
        let idx = self.idx(sector, device);
        if matches!(self.cells[idx], Cell::Unknown) {
            self.weak_count += 1;
            self.cells[idx] = Cell::Weak;
        }
    }

    pub fn strong(&self, sector: usize, device: usize) -> Option<f64> {
        match self.cells[self.idx(sector, device)] {
            Cell::Strong(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_weak(&self, sector: usize, device: usize) -> bool {
        matches!(self.cells[self.idx(sector, device)], Cell::Weak)
    }

    pub fn is_known(&self, sector: usize, device: usize) -> bool {
        !matches!(self.cells[self.idx(sector, device)], Cell::Unknown)
    }

    pub fn strong_count(&self) -> usize {
        self.strong_count
    }

    pub fn weak_count(&self) -> usize {
        self.weak_count
    }

    pub fn known_count(&self) -> usize {
        self.strong_count + self.weak_count
    }

    /// `(sector, device, gain_db)` of every known-strong cell, row-major.
    pub fn strong_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(idx, c)| match c {
            Cell::Strong(g) => Some((idx / self.devices, idx % self.devices, *g)),
            _ => None,
        })
    }

    /// `(sector, device)` of every inferred-weak cell, row-major.
    pub fn weak_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(idx, c)| match c {
            Cell::Weak => Some((idx / self.devices, idx % self.devices)),
            _ => None,
        })
    }

    /// Mask of known cells (true where strong or weak).
    pub fn known_mask(&self) -> Array2<bool> {
        Array2::from_shape_fn((self.sectors, self.devices), |(i, j)| self.is_known(i, j))
    }
}

/// Directly available strong cells: for each detected device, every sector
/// that detected it, with the reported gain.
pub fn known_strong(view: &CentralView) -> Vec<(usize, usize, f64)> {
    view.known_gains.iter().map(|(&(sector, col), &gain)| (sector, col, gain)).collect()
}

/// Weak cells inferred from pilot slots: while device `j` was being detected
/// somewhere in slot `t`, any sector silent in `t` or detecting a different
/// device in `t` must be weak towards `j`. Deduplicated, row-major order.
pub fn pilot_inferred_weak(view: &CentralView) -> Vec<(usize, usize)> {
    let mut mark = vec![false; view.sectors * view.device_count()];
    for col in 0..view.device_count() {
        for &slot in &view.detection_slots[col] {
            for sector in 0..view.sectors {
                if view.silence[slot][sector] {
                    mark[sector * view.device_count() + col] = true;
                }
            }
            for sector in view.other_detectors(slot, col) {
                mark[sector * view.device_count() + col] = true;
            }
        }
    }
    mark.iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(idx, _)| (idx / view.device_count(), idx % view.device_count()))
        .collect()
}

/// Parameters of the geographic weak-link rule.
#[derive(Debug, Clone, Copy)]
pub struct DistanceRule<'a> {
    pub rrh_positions: &'a [Point],
    pub sectors_per_rrh: usize,
    /// Inter-RRH distance beyond which no device can be strong to both.
    pub d_thr: f64,
}

/// Weak cells inferred from geography: for each sector that detected device
/// `j`, all sectors of RRHs farther than `d_thr` from the detecting RRH are
/// weak towards `j`. Sectors of the same RRH are at distance 0.
pub fn distance_inferred_weak(view: &CentralView, rule: &DistanceRule) -> Vec<(usize, usize)> {
    let devices = view.device_count();
    let mut mark = vec![false; view.sectors * devices];
    for col in 0..devices {
        for &detector in &view.detector_sectors[col] {
            let home = detector / rule.sectors_per_rrh;
            for (rrh, pos) in rule.rrh_positions.iter().enumerate() {
                if rule.rrh_positions[home].distance(pos) > rule.d_thr {
                    for s in 0..rule.sectors_per_rrh {
                        mark[(rrh * rule.sectors_per_rrh + s) * devices + col] = true;
                    }
                }
            }
        }
    }
    mark.iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(idx, _)| (idx / devices, idx % devices))
        .collect()
}

/// Compose the known-strong cells with both weak-inference rules.
/// Strong entries win conflicts with the distance rule.
pub fn build_observation_sets(view: &CentralView, rule: Option<&DistanceRule>) -> ObservationSets {
    let mut sets = ObservationSets::new(view.sectors, view.device_count());
    for (sector, col, gain) in known_strong(view) {
        sets.insert_strong(sector, col, gain);
    }
    for (sector, col) in pilot_inferred_weak(view) {
        sets.insert_weak(sector, col);
    }
    if let Some(rule) = rule {
        for (sector, col) in distance_inferred_weak(view, rule) {
            sets.insert_weak(sector, col);
        }
    }
    sets
}
