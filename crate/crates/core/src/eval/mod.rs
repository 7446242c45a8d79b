//! Classifier and throughput evaluation.

mod rates;
mod roc;
mod throughput;

pub use rates::{average_rates, linear_trend, masked_rates, rates, FrameRates, RateAverage};
pub use roc::{roc_from_points, roc_sweep, RocCurve, RocPoint};
pub use throughput::{model_vs_sim_abstract, model_vs_sim_geometric, ThroughputRow};
