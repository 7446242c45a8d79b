//! Geometric stochastic channel model.
//!
//! Generates a synthetic network layout (RRH sites, devices, scatterers and
//! circular blockers on a square area) and computes the ground-truth
//! sector-device gain matrix: one-bounce multipath components feed a
//! per-link spatial covariance, and each RRH splits its DFT beams equally
//! into virtual sectors whose gains are quadratic forms of that covariance.

mod beams;
mod gain;
mod layout;
mod params;
mod paths;

pub use beams::{beam_powers, path_covariance, sector_gain, sector_gains_from_paths, steering_vector};
pub use gain::{calibrate_distance_threshold, CalibratedThreshold, GainModel, SectorGainMatrix};
pub use layout::{drop_entities, drop_infrastructure, Blocker, NetworkLayout};
pub use params::{ChannelParams, GeometryConfig};
pub use paths::{direct_path_gain, enumerate_paths, los_blocked, reflected_path_gain, PathComponent};
