//! Channel and geometry parameters.

use crate::error::Error;
use crate::Result;

/// Physical parameters of the channel model and the virtual sectorization.
///
/// The shipped defaults are tuned so the gain-versus-distance scatter of a
/// generated network shows a broad spread at equal distances and a strong-link
/// fraction that falls off with distance; they are documented, not normative.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Antennas per uniform linear array (M). Must be divisible by
    /// `sectors_per_rrh`.
    pub antennas: usize,
    /// Virtual sectors per RRH (S).
    pub sectors_per_rrh: usize,
    /// Antenna spacing in wavelengths (dimensionless).
    pub antenna_spacing: f64,
    /// Breakpoint distance of the pathloss transition, meters.
    pub breakpoint_m: f64,
    /// Pathloss exponent.
    pub pathloss_exp: f64,
    /// Attenuation coefficient of one-bounce reflected paths, in (0, 1].
    pub nlos_attenuation: f64,
    /// Linear gain below which a multipath component is discarded.
    pub path_prune_floor: f64,
    /// Linear sector gains below this value are clamped before dB
    /// conversion, so every matrix entry stays finite.
    pub linear_floor: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            antennas: 64,
            sectors_per_rrh: 4,
            antenna_spacing: 0.5,
            breakpoint_m: 10.0,
            pathloss_exp: 3.5,
            nlos_attenuation: 0.3,
            path_prune_floor: 1e-6,
            linear_floor: 1e-12,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.sectors_per_rrh == 0 {
            return Err(Error::config("sectors_per_rrh must be >= 1"));
        }
        if self.antennas == 0 || self.antennas % self.sectors_per_rrh != 0 {
            return Err(Error::config(format!(
                "antennas ({}) must be a positive multiple of sectors_per_rrh ({})",
                self.antennas, self.sectors_per_rrh
            )));
        }
        if !(self.breakpoint_m > 0.0) {
            return Err(Error::config("breakpoint_m must be > 0"));
        }
        if !(self.pathloss_exp > 0.0) {
            return Err(Error::config("pathloss_exp must be > 0"));
        }
        if !(self.nlos_attenuation > 0.0 && self.nlos_attenuation <= 1.0) {
            return Err(Error::config("nlos_attenuation must be in (0, 1]"));
        }
        if !(self.path_prune_floor >= 0.0) {
            return Err(Error::config("path_prune_floor must be >= 0"));
        }
        if !(self.linear_floor > 0.0) {
            return Err(Error::config("linear_floor must be > 0"));
        }
        Ok(())
    }

    /// The dB value every floored entry maps to.
    pub fn floor_db(&self) -> f64 {
        10.0 * self.linear_floor.log10()
    }
}

/// Entity counts and area geometry for a layout draw.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Side length of the square deployment area, meters.
    pub area_side: f64,
    /// Number of RRH sites (B).
    pub rrh_count: usize,
    /// Number of devices for static draws (calibration, scatter plots).
    pub device_count: usize,
    pub scatterer_count: usize,
    pub blocker_count: usize,
    /// Radius of every circular blocker, meters.
    pub blocker_radius: f64,
    /// When true, entity counts are Poisson draws with the configured counts
    /// as means; otherwise counts are taken as-is.
    pub poisson_counts: bool,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            area_side: 316.0,
            rrh_count: 100,
            device_count: 500,
            scatterer_count: 500,
            blocker_count: 200,
            blocker_radius: 2.0,
            poisson_counts: false,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.area_side > 0.0) {
            return Err(Error::config("area_side must be > 0"));
        }
        if !(self.blocker_radius > 0.0) {
            return Err(Error::config("blocker_radius must be > 0"));
        }
        Ok(())
    }
}
