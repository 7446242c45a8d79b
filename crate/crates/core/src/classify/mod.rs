//! Strong-link classification from central-unit reports.
//!
//! Detection reports pin some matrix cells exactly: sectors that detected a
//! device know its gain, sectors that were silent (or detected someone else)
//! while the device was being detected must be weak, and sectors of RRHs far
//! from any detecting RRH can be ruled out geometrically. The remaining
//! cells are either coin-flipped (baseline) or predicted by a regularized
//! latent-factor completion of the partially observed gain matrix followed
//! by a threshold test.

mod baseline;
mod mc;
mod omega;
mod window;

pub use baseline::baseline_classify;
pub use mc::{
    initial_factors, mc_classify, mc_fit, mc_fit_with, FactorPair, FitTracePoint, McFit,
    McParams, SolverMode,
};
pub use omega::{
    build_observation_sets, distance_inferred_weak, hypothesis_matrix, known_strong,
    pilot_inferred_weak, DistanceRule, ObservationSets,
};
pub use window::{window_stack, WindowStack};
