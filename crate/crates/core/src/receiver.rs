//! Access-point SIC receiver.
//!
//! Decoding is peeling on the device/slot bipartite graph. A replica alone
//! in its slot is decoded when its SNR in that slot reaches the threshold.
//! The device's replicas are then cancelled from every slot, which may
//! expose new singletons. Cancellation is ideal, capture is not modelled,
//! and a device counts once however many of its replicas are decodable.
//!
//! Each pass decodes every singleton visible at the start of the pass, then
//! cancels. The decoded set at the fixed point does not depend on the order
//! slots are scanned in.

use std::fmt::Write as _;

use crate::access::AccessDecision;
use crate::channel::SnrMatrix;
use crate::{Error, Result};

/// Devices with an undecoded replica in each slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotOccupancy {
    devices: usize,
    slots: Vec<Vec<usize>>,
}

impl SlotOccupancy {
    /// Builds an occupancy directly from per-slot device lists.
    pub fn from_slots(devices: usize, mut slots: Vec<Vec<usize>>) -> Result<Self> {
        for (s, members) in slots.iter_mut().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.last().is_some_and(|&k| k >= devices) {
                return Err(Error::Dimension(format!("slot {s} names a device outside 0..{devices}")));
            }
        }
        Ok(Self { devices, slots })
    }

    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, s: usize) -> &[usize] {
        &self.slots[s]
    }

    /// Replicas summed over slots.
    pub fn total_replicas(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }
}

/// Inverts per-device slot sets into per-slot device sets.
pub fn build_occupancy(decision: &AccessDecision) -> SlotOccupancy {
    let mut slots = vec![Vec::new(); decision.slots()];
    for (k, set) in decision.iter().enumerate() {
        for &s in set {
            slots[s].push(k);
        }
    }
    SlotOccupancy {
        devices: decision.devices(),
        slots,
    }
}

/// One successful decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEvent {
    /// 1-based pass number.
    pub iteration: usize,
    pub slot: usize,
    pub device: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Decoded device indices, ascending.
    pub decoded: Vec<usize>,
    /// Number of productive passes.
    pub iterations: usize,
    pub trace: Vec<DecodeEvent>,
}

impl DecodeResult {
    /// The trace as `iter,slot,device` lines, one per decode event.
    pub fn trace_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.trace {
            let _ = writeln!(out, "{},{},{}", e.iteration, e.slot, e.device);
        }
        out
    }
}

/// Number of successful access attempts `A`.
pub fn count_successes(result: &DecodeResult) -> usize {
    result.decoded.len()
}

fn check_dims(occupancy: &SlotOccupancy, snr: &SnrMatrix) -> Result<()> {
    if snr.devices() != occupancy.devices || snr.slots() != occupancy.slots.len() {
        return Err(Error::Dimension(format!(
            "occupancy is {}x{}, SNR matrix is {}x{}",
            occupancy.devices,
            occupancy.slots.len(),
            snr.devices(),
            snr.slots()
        )));
    }
    Ok(())
}

/// Runs SIC to its fixed point, scanning slots in index order.
pub fn sic_decode(occupancy: &SlotOccupancy, snr: &SnrMatrix, threshold: f64) -> Result<DecodeResult> {
    let order: Vec<usize> = (0..occupancy.slots.len()).collect();
    sic_decode_with_order(occupancy, snr, threshold, &order)
}

/// Runs SIC scanning slots in `scan_order` (a permutation of `0..S`).
///
/// The order only decides which slot is credited when a device is a
/// passing singleton in several slots of the same pass.
pub fn sic_decode_with_order(
    occupancy: &SlotOccupancy,
    snr: &SnrMatrix,
    threshold: f64,
    scan_order: &[usize],
) -> Result<DecodeResult> {
    check_dims(occupancy, snr)?;
    let mut seen = vec![false; occupancy.slots.len()];
    for &s in scan_order {
        if s >= seen.len() || std::mem::replace(&mut seen[s], true) {
            return Err(Error::Dimension("scan order is not a permutation of the slots".into()));
        }
    }
    if seen.iter().any(|v| !v) {
        return Err(Error::Dimension("scan order is not a permutation of the slots".into()));
    }

    let mut remaining = occupancy.slots.clone();
    let mut decoded = vec![false; occupancy.devices];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let mut newly = Vec::new();
        for &s in scan_order {
            if let [k] = remaining[s][..] {
                if !decoded[k] && snr.get(k, s) >= threshold {
                    decoded[k] = true;
                    newly.push((s, k));
                }
            }
        }
        if newly.is_empty() {
            break;
        }
        iterations += 1;
        trace.extend(newly.iter().map(|&(slot, device)| DecodeEvent {
            iteration: iterations,
            slot,
            device,
        }));
        for members in &mut remaining {
            members.retain(|&k| !decoded[k]);
        }
    }

    Ok(DecodeResult {
        decoded: (0..occupancy.devices).filter(|&k| decoded[k]).collect(),
        iterations,
        trace,
    })
}

/// Devices decodable without any cancellation: those with at least one
/// passing replica that is alone in its slot.
pub fn singleton_successes(occupancy: &SlotOccupancy, snr: &SnrMatrix, threshold: f64) -> Result<usize> {
    check_dims(occupancy, snr)?;
    let mut ok = vec![false; occupancy.devices];
    for (s, members) in occupancy.slots.iter().enumerate() {
        if let [k] = members[..] {
            ok[k] |= snr.get(k, s) >= threshold;
        }
    }
    Ok(ok.iter().filter(|&&v| v).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(devices: usize, slots: &[&[usize]]) -> SlotOccupancy {
        SlotOccupancy::from_slots(devices, slots.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn occupancy_inverts_decision() {
        let d = AccessDecision::new(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(build_occupancy(&d), occ(2, &[&[0], &[1]]));
        let d = AccessDecision::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let o = build_occupancy(&d);
        assert_eq!(o, occ(2, &[&[0, 1], &[0, 1]]));
        assert_eq!(o.total_replicas(), d.total_replicas());
    }

    #[test]
    fn peeling_chain() {
        let o = occ(3, &[&[0], &[0, 1], &[1, 2], &[2]]);
        let snr = SnrMatrix::filled(3, 4, 10.0);
        let r = sic_decode(&o, &snr, 1.0).unwrap();
        assert_eq!(r.decoded, vec![0, 1, 2]);
        assert_eq!(r.iterations, 2);
        assert_eq!(count_successes(&r), 3);
        assert_eq!(r.trace_lines(), "1,0,0\n1,3,2\n2,1,1\n");
    }

    #[test]
    fn stopping_set() {
        let o = occ(2, &[&[0, 1], &[0, 1]]);
        let r = sic_decode(&o, &SnrMatrix::filled(2, 2, 10.0), 1.0).unwrap();
        assert_eq!(count_successes(&r), 0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn threshold_gate() {
        let o = occ(1, &[&[0], &[]]);
        let snr = SnrMatrix::from_rows(&[vec![0.5, 100.0]]).unwrap();
        assert_eq!(count_successes(&sic_decode(&o, &snr, 1.0).unwrap()), 0);
        assert_eq!(count_successes(&sic_decode(&o, &snr, 0.5).unwrap()), 1);
    }

    #[test]
    fn failing_gate_blocks_chain() {
        // Device 0 cannot be decoded, so device 1 stays buried under it.
        let o = occ(2, &[&[0], &[0, 1]]);
        let snr = SnrMatrix::from_rows(&[vec![0.1, 0.1], vec![9.0, 9.0]]).unwrap();
        let r = sic_decode(&o, &snr, 1.0).unwrap();
        assert!(r.decoded.is_empty());
        assert_eq!(singleton_successes(&o, &snr, 1.0).unwrap(), 0);
    }

    #[test]
    fn bad_inputs() {
        let o = occ(2, &[&[0], &[1]]);
        assert!(sic_decode(&o, &SnrMatrix::filled(2, 3, 1.0), 1.0).is_err());
        assert!(sic_decode_with_order(&o, &SnrMatrix::filled(2, 2, 1.0), 1.0, &[0, 0]).is_err());
        assert!(sic_decode_with_order(&o, &SnrMatrix::filled(2, 2, 1.0), 1.0, &[0]).is_err());
        assert!(SlotOccupancy::from_slots(1, vec![vec![1]]).is_err());
    }
}
