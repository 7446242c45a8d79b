//! Network layout generation.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::TAU;

use super::params::GeometryConfig;
use crate::error::Error;
use crate::geom::Point;
use crate::Result;

/// Circular blocker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blocker {
    pub center: Point,
    pub radius: f64,
}

/// Positions and orientations of every entity in the deployment area.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub rrh_positions: Vec<Point>,
    /// Per-RRH angular offset applied to all departure angles of its links.
    pub sector_orientations: Vec<f64>,
    pub device_positions: Vec<Point>,
    pub scatterer_positions: Vec<Point>,
    pub blockers: Vec<Blocker>,
    pub area_side: f64,
}

impl NetworkLayout {
    pub fn rrh_count(&self) -> usize {
        self.rrh_positions.len()
    }

    /// Distance between two RRH sites.
    pub fn rrh_distance(&self, a: usize, b: usize) -> f64 {
        self.rrh_positions[a].distance(&self.rrh_positions[b])
    }
}

fn count_for(mean: usize, poisson: bool, rng: &mut impl Rng) -> usize {
    if poisson && mean > 0 {
        let dist = Poisson::new(mean as f64).expect("positive mean");
        dist.sample(rng) as usize
    } else {
        mean
    }
}

fn uniform_points(n: usize, side: f64, rng: &mut impl Rng) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect()
}

/// Draw RRHs, scatterers and blockers but no devices.
///
/// Used by the frame simulator, where devices arrive dynamically and get
/// their positions drawn per arrival.
pub fn drop_infrastructure(geometry: &GeometryConfig, rng: &mut impl Rng) -> Result<NetworkLayout> {
    geometry.validate()?;
    let rrh_count = count_for(geometry.rrh_count, geometry.poisson_counts, rng);
    if rrh_count == 0 {
        return Err(Error::config("rrh_count must be >= 1"));
    }
    let rrh_positions = uniform_points(rrh_count, geometry.area_side, rng);
    let sector_orientations = (0..rrh_count).map(|_| rng.gen::<f64>() * TAU).collect();
    let scatterer_count = count_for(geometry.scatterer_count, geometry.poisson_counts, rng);
    let scatterer_positions = uniform_points(scatterer_count, geometry.area_side, rng);
    let blocker_count = count_for(geometry.blocker_count, geometry.poisson_counts, rng);
    let blockers = uniform_points(blocker_count, geometry.area_side, rng)
        .into_iter()
        .map(|center| Blocker { center, radius: geometry.blocker_radius })
        .collect();
    Ok(NetworkLayout {
        rrh_positions,
        sector_orientations,
        device_positions: Vec::new(),
        scatterer_positions,
        blockers,
        area_side: geometry.area_side,
    })
}

/// Draw a complete layout: infrastructure plus a static device population.
///
/// Fixed-count mode places exactly the configured numbers of entities;
/// Poisson mode first draws each count from a Poisson distribution with the
/// configured count as mean. All placements are uniform i.i.d. over the
/// square, and each RRH gets an independent uniform sector orientation.
pub fn drop_entities(geometry: &GeometryConfig, rng: &mut impl Rng) -> Result<NetworkLayout> {
    let mut layout = drop_infrastructure(geometry, rng)?;
    let device_count = count_for(geometry.device_count, geometry.poisson_counts, rng);
    if device_count == 0 {
        return Err(Error::config("device_count must be >= 1"));
    }
    layout.device_positions = uniform_points(device_count, geometry.area_side, rng);
    Ok(layout)
}
