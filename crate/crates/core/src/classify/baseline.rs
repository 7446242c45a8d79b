//! Alpha-randomized baseline classifier.

use ndarray::Array2;
use rand::Rng;

use super::omega::ObservationSets;

/// Pass known cells through and flip a biased coin on the rest: unknown
/// cells are classified strong with probability `alpha`.
///
/// Draws scan the grid row-major, so a fixed RNG gives a fixed estimate.
pub fn baseline_classify(obs: &ObservationSets, alpha: f64, rng: &mut impl Rng) -> Array2<u8> {
    assert!((0.0..=1.0).contains(&alpha), "alpha must be in [0, 1]");
    let (sectors, devices) = obs.dims();
    let mut chat = Array2::zeros((sectors, devices));
    for i in 0..sectors {
        for j in 0..devices {
            chat[[i, j]] = if obs.strong(i, j).is_some() {
                1
            } else if obs.is_weak(i, j) {
                0
            } else {
                u8::from(rng.gen_bool(alpha))
            };
        }
    }
    chat
}
