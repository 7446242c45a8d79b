//! Ground-truth sector gain matrix and distance-threshold calibration.

use ndarray::Array2;
use rayon::prelude::*;

use super::beams::sector_gains_from_paths;
use super::layout::NetworkLayout;
use super::params::ChannelParams;
use super::paths::{los_blocked, PathComponent};
use crate::geom::Point;
use crate::Result;

/// V x K matrix of large-scale sector-device gains in dB.
///
/// Linear gains below the configured floor are clamped before conversion, so
/// every entry is finite; a fully pruned link shows up as a row of floor
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorGainMatrix {
    values_db: Array2<f64>,
    floor_db: f64,
}

impl SectorGainMatrix {
    pub fn from_parts(values_db: Array2<f64>, floor_db: f64) -> Self {
        SectorGainMatrix { values_db, floor_db }
    }

    pub fn sectors(&self) -> usize {
        self.values_db.nrows()
    }

    pub fn devices(&self) -> usize {
        self.values_db.ncols()
    }

    pub fn get(&self, sector: usize, device: usize) -> f64 {
        self.values_db[[sector, device]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values_db
    }

    pub fn floor_db(&self) -> f64 {
        self.floor_db
    }
}

/// Precomputed per-layout state for bulk gain evaluation.
///
/// Caches the scatterer-to-RRH legs and departure angles, which do not
/// depend on device positions, plus exact quick-reject bounds for path
/// pruning so the pathloss power law is only evaluated for components that
/// can survive.
pub struct GainModel {
    layout: NetworkLayout,
    params: ChannelParams,
    /// Flattened RRH-major [rrh * z_count + z] scatterer-to-RRH distances.
    scatterer_leg: Vec<f64>,
    /// Departure angle of each scatterer as seen from each RRH.
    scatterer_angle: Vec<f64>,
    /// Retained reflected path iff (1+d1/eps)(1+d2/eps) <= this bound.
    reflect_bound: f64,
    /// Retained direct path iff (1+d/eps) <= this bound.
    direct_bound: f64,
}

impl GainModel {
    pub fn new(layout: NetworkLayout, params: ChannelParams) -> Result<Self> {
        params.validate()?;
        let z_count = layout.scatterer_positions.len();
        let b_count = layout.rrh_positions.len();
        let mut scatterer_leg = Vec::with_capacity(b_count * z_count);
        let mut scatterer_angle = Vec::with_capacity(b_count * z_count);
        for rrh in &layout.rrh_positions {
            for z in &layout.scatterer_positions {
                scatterer_leg.push(rrh.distance(z));
                scatterer_angle.push(rrh.angle_to(z));
            }
        }
        let (reflect_bound, direct_bound) = if params.path_prune_floor > 0.0 {
            let inv_alpha = 1.0 / params.pathloss_exp;
            (
                (params.nlos_attenuation / params.path_prune_floor).powf(inv_alpha),
                (1.0 / params.path_prune_floor).powf(inv_alpha),
            )
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Ok(GainModel { layout, params, scatterer_leg, scatterer_angle, reflect_bound, direct_bound })
    }

    pub fn layout(&self) -> &NetworkLayout {
        &self.layout
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// Total virtual sectors V = S * B.
    pub fn sector_count(&self) -> usize {
        self.layout.rrh_count() * self.params.sectors_per_rrh
    }

    /// Retained multipath components between one RRH and a device position,
    /// using the cached scatterer legs.
    pub fn link_paths(&self, rrh: usize, device: Point, device_scatterer: &[f64]) -> Vec<PathComponent> {
        let eps = self.params.breakpoint_m;
        let alpha = self.params.pathloss_exp;
        let rrh_pos = self.layout.rrh_positions[rrh];
        let mut paths = Vec::new();

        let d_direct = rrh_pos.distance(&device);
        let direct_factor = 1.0 + d_direct / eps;
        if direct_factor <= self.direct_bound * (1.0 + 1e-12)
            && !los_blocked(rrh_pos, device, &self.layout.blockers)
        {
            let gain = direct_factor.powf(-alpha);
            if gain >= self.params.path_prune_floor {
                paths.push(PathComponent { gain, departure_angle: rrh_pos.angle_to(&device) });
            }
        }

        let z_count = self.layout.scatterer_positions.len();
        let legs = &self.scatterer_leg[rrh * z_count..(rrh + 1) * z_count];
        let angles = &self.scatterer_angle[rrh * z_count..(rrh + 1) * z_count];
        for z in 0..z_count {
            let product = (1.0 + device_scatterer[z] / eps) * (1.0 + legs[z] / eps);
            if product <= self.reflect_bound * (1.0 + 1e-12) {
                let gain = self.params.nlos_attenuation * product.powf(-alpha);
                if gain >= self.params.path_prune_floor {
                    paths.push(PathComponent { gain, departure_angle: angles[z] });
                }
            }
        }
        paths
    }

    /// All V sector gains (dB) for a device at `device`.
    pub fn gain_column(&self, device: Point) -> Vec<f64> {
        let s = self.params.sectors_per_rrh;
        let device_scatterer: Vec<f64> =
            self.layout.scatterer_positions.iter().map(|z| device.distance(z)).collect();
        let mut column = vec![self.params.floor_db(); self.sector_count()];
        for rrh in 0..self.layout.rrh_count() {
            let paths = self.link_paths(rrh, device, &device_scatterer);
            if paths.is_empty() {
                continue;
            }
            let gains = sector_gains_from_paths(
                &paths,
                self.params.antennas,
                s,
                self.params.antenna_spacing,
                self.layout.sector_orientations[rrh],
            );
            for (i, g) in gains.into_iter().enumerate() {
                column[rrh * s + i] = 10.0 * g.max(self.params.linear_floor).log10();
            }
        }
        column
    }

    /// Gain matrix over the layout's static device population.
    ///
    /// Columns are independent and computed in parallel; each column is a
    /// pure function of the layout, so the result is identical to a
    /// sequential evaluation.
    pub fn gain_matrix(&self) -> SectorGainMatrix {
        let devices = &self.layout.device_positions;
        let columns: Vec<Vec<f64>> =
            devices.par_iter().map(|pos| self.gain_column(*pos)).collect();
        let v = self.sector_count();
        let mut values = Array2::zeros((v, devices.len()));
        for (k, col) in columns.iter().enumerate() {
            for (i, g) in col.iter().enumerate() {
                values[[i, k]] = *g;
            }
        }
        SectorGainMatrix::from_parts(values, self.params.floor_db())
    }
}

/// Result of the distance-threshold calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedThreshold {
    /// Smallest inter-RRH distance threshold that produces zero
    /// misclassifications on the calibration draw.
    pub d_thr: f64,
    /// Set when no device was strong to two distinct RRHs, in which case
    /// `d_thr` is 0 and should be treated with care.
    pub no_multi_rrh_strong: bool,
}

/// Calibrate the inter-RRH distance beyond which no device of the
/// calibration draw is strong to both sites.
///
/// Returns the maximum, over devices, of the pairwise distance between RRHs
/// that both own a sector strong (>= `gamma_db`) to the device.
pub fn calibrate_distance_threshold(
    gains: &SectorGainMatrix,
    rrh_positions: &[Point],
    sectors_per_rrh: usize,
    gamma_db: f64,
) -> CalibratedThreshold {
    let mut best = 0.0f64;
    let mut found = false;
    let mut strong_rrhs: Vec<usize> = Vec::new();
    for k in 0..gains.devices() {
        strong_rrhs.clear();
        for v in 0..gains.sectors() {
            if gains.get(v, k) >= gamma_db {
                let rrh = v / sectors_per_rrh;
                if strong_rrhs.last() != Some(&rrh) {
                    strong_rrhs.push(rrh);
                }
            }
        }
        if strong_rrhs.len() >= 2 {
            found = true;
            for a in 0..strong_rrhs.len() {
                for b in a + 1..strong_rrhs.len() {
                    let d = rrh_positions[strong_rrhs[a]].distance(&rrh_positions[strong_rrhs[b]]);
                    best = best.max(d);
                }
            }
        }
    }
    CalibratedThreshold { d_thr: best, no_multi_rrh_strong: !found }
}
