//! Multipath component enumeration and large-scale path gains.

use super::layout::{Blocker, NetworkLayout};
use super::params::ChannelParams;
use crate::geom::{segment_hits_disk, Point};

/// One large-scale multipath component of an RRH-device link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    /// Linear large-scale loss of the component.
    pub gain: f64,
    /// Direction of departure at the RRH, radians in the global frame.
    pub departure_angle: f64,
}

/// True iff the direct segment between `tx` and `rx` is blocked.
///
/// A blocker blocks when its closed disk touches the segment; tangency and
/// endpoints inside the disk count as blocked.
pub fn los_blocked(tx: Point, rx: Point, blockers: &[Blocker]) -> bool {
    debug_assert!(tx != rx, "los_blocked needs two distinct endpoints");
    blockers.iter().any(|b| segment_hits_disk(tx, rx, b.center, b.radius))
}

/// Smooth-transition pathloss of a direct link of length `d`.
pub fn direct_path_gain(d: f64, params: &ChannelParams) -> f64 {
    (1.0 + d / params.breakpoint_m).powf(-params.pathloss_exp)
}

/// One-bounce reflected-path gain: the two leg losses combined with the
/// NLOS attenuation coefficient.
pub fn reflected_path_gain(d_uz: f64, d_zr: f64, params: &ChannelParams) -> f64 {
    params.nlos_attenuation * direct_path_gain(d_uz, params) * direct_path_gain(d_zr, params)
}

/// Enumerate the retained multipath components between RRH `rrh` and device
/// `device` of the layout.
///
/// The direct component is present iff no blocker intersects the segment;
/// every scatterer contributes one reflected component. Components with gain
/// below `path_prune_floor` are removed, the direct one included.
pub fn enumerate_paths(
    layout: &NetworkLayout,
    rrh: usize,
    device: usize,
    params: &ChannelParams,
) -> Vec<PathComponent> {
    let rrh_pos = layout.rrh_positions[rrh];
    let dev_pos = layout.device_positions[device];
    let mut paths = Vec::new();
    if !los_blocked(rrh_pos, dev_pos, &layout.blockers) {
        let gain = direct_path_gain(rrh_pos.distance(&dev_pos), params);
        if gain >= params.path_prune_floor {
            paths.push(PathComponent { gain, departure_angle: rrh_pos.angle_to(&dev_pos) });
        }
    }
    for z in &layout.scatterer_positions {
        let gain = reflected_path_gain(dev_pos.distance(z), z.distance(&rrh_pos), params);
        if gain >= params.path_prune_floor {
            paths.push(PathComponent { gain, departure_angle: rrh_pos.angle_to(z) });
        }
    }
    paths
}
