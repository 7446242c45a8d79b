//! Slotted random-access protocol simulation.
//!
//! Active devices transmit pilots in each of the T slots of an RA block with
//! probability p. A sector detects a device in a slot when it is the only
//! strong-linked transmitter there; the central unit merges per-sector
//! reports into the detected set, the silence sets and the per-device
//! detector sets. Detected devices leave the queue, the rest stay active.

mod central;
mod model;
mod report;
mod sim;

pub use central::{merge_reports, CentralView};
pub use model::{model_lambda_out, p_star};
pub use report::{DeviceId, RaReport, SlotOutcome};
pub use sim::{
    run_campaign, simulate_frame, simulate_slot, CampaignMode, CampaignStats, Device,
    DeviceSource, FrameRecord, FrameResult, FrameState, FrameStatsRow, RaConfig,
};
