//! Per-sector, per-slot RA block reports.

use crate::error::Error;
use crate::Result;

/// Globally unique device identifier.
pub type DeviceId = u64;

/// What one sector observed in one pilot slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlotOutcome {
    /// No strong-linked device transmitted.
    Silence,
    /// Two or more strong-linked devices transmitted.
    Collision,
    /// Exactly one strong-linked device transmitted; its ID and exact link
    /// gain are recovered.
    Detection { device: DeviceId, gain_db: f64 },
}

/// Dense grid of outcomes for one RA block: `slots x sectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct RaReport {
    sectors: usize,
    slots: usize,
    grid: Vec<SlotOutcome>,
}

impl RaReport {
    /// All-silence report.
    pub fn new(sectors: usize, slots: usize) -> Self {
        RaReport { sectors, slots, grid: vec![SlotOutcome::Silence; sectors * slots] }
    }

    /// Build from explicit `(slot, sector, outcome)` entries. Cells not
    /// mentioned stay silent; a sector reporting twice for the same slot is
    /// a malformed report.
    pub fn from_entries(
        sectors: usize,
        slots: usize,
        entries: impl IntoIterator<Item = (usize, usize, SlotOutcome)>,
    ) -> Result<Self> {
        let mut report = RaReport::new(sectors, slots);
        let mut seen = vec![false; sectors * slots];
        for (slot, sector, outcome) in entries {
            if slot >= slots || sector >= sectors {
                return Err(Error::MalformedReport(format!(
                    "entry (slot {slot}, sector {sector}) outside a {slots}x{sectors} report"
                )));
            }
            let idx = slot * sectors + sector;
            if seen[idx] {
                return Err(Error::MalformedReport(format!(
                    "sector {sector} reported two outcomes for slot {slot}"
                )));
            }
            seen[idx] = true;
            report.grid[idx] = outcome;
        }
        Ok(report)
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn get(&self, slot: usize, sector: usize) -> &SlotOutcome {
        &self.grid[slot * self.sectors + sector]
    }

    pub fn set(&mut self, slot: usize, sector: usize, outcome: SlotOutcome) {
        self.grid[slot * self.sectors + sector] = outcome;
    }

    /// Iterate `(slot, sector, outcome)` in slot-major order.
    pub fn outcomes(&self) -> impl Iterator<Item = (usize, usize, &SlotOutcome)> {
        self.grid
            .iter()
            .enumerate()
            .map(move |(i, o)| (i / self.sectors, i % self.sectors, o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_entries_rejects_double_report() {
        let entries = vec![
            (0, 1, SlotOutcome::Collision),
            (0, 1, SlotOutcome::Silence),
        ];
        let err = RaReport::from_entries(2, 2, entries).unwrap_err();
        assert!(matches!(err, Error::MalformedReport(_)));
    }

    #[test]
    fn spatial_reuse_is_valid() {
        // Two sectors detecting different devices in the same slot is fine.
        let entries = vec![
            (0, 0, SlotOutcome::Detection { device: 7, gain_db: -10.0 }),
            (0, 1, SlotOutcome::Detection { device: 9, gain_db: -12.0 }),
        ];
        let report = RaReport::from_entries(2, 1, entries).unwrap();
        assert!(matches!(report.get(0, 0), SlotOutcome::Detection { device: 7, .. }));
        assert!(matches!(report.get(0, 1), SlotOutcome::Detection { device: 9, .. }));
    }

    #[test]
    fn out_of_range_entry_is_malformed() {
        let err = RaReport::from_entries(2, 2, vec![(2, 0, SlotOutcome::Collision)]).unwrap_err();
        assert!(matches!(err, Error::MalformedReport(_)));
    }
}
