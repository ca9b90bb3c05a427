//! Test-only oracles, independent of the library's decoder.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

/// A random-access instance: per-slot device lists and per (device, slot)
/// pass/fail gates.
#[derive(Debug, Clone)]
pub struct Instance {
    pub devices: usize,
    pub slots: Vec<Vec<usize>>,
    /// `pass[k][s]`: device `k` clears the threshold in slot `s`.
    pub pass: Vec<Vec<bool>>,
}

impl Instance {
    pub fn random<R: Rng>(rng: &mut R, max_devices: usize, max_slots: usize, pass_prob: f64) -> Self {
        let devices = rng.random_range(1..=max_devices);
        let slot_count = rng.random_range(1..=max_slots);
        let mut slots = vec![Vec::new(); slot_count];
        for k in 0..devices {
            // Nonempty random subset.
            let mask = rng.random_range(1u32..(1 << slot_count));
            for (s, members) in slots.iter_mut().enumerate() {
                if mask >> s & 1 == 1 {
                    members.push(k);
                }
            }
        }
        let pass = (0..devices)
            .map(|_| (0..slot_count).map(|_| rng.random_bool(pass_prob)).collect())
            .collect();
        Self { devices, slots, pass }
    }

    /// SNR grid encoding the gates: 2.0 passes a threshold of 1.0, 0.5 fails it.
    pub fn snr_rows(&self) -> Vec<Vec<f64>> {
        self.pass
            .iter()
            .map(|row| row.iter().map(|&p| if p { 2.0 } else { 0.5 }).collect())
            .collect()
    }
}

/// Every terminal decoded set reachable by any schedule of single decodes.
///
/// A move decodes one device that is the only undecoded member of some slot
/// and passes its gate there. States are bitmasks of decoded devices.
pub fn terminal_states(inst: &Instance) -> BTreeSet<u64> {
    let mut seen = HashSet::new();
    let mut terminals = BTreeSet::new();
    let mut stack = vec![0u64];
    while let Some(state) = stack.pop() {
        if !seen.insert(state) {
            continue;
        }
        let mut moved = false;
        for (s, members) in inst.slots.iter().enumerate() {
            let live: Vec<usize> = members.iter().copied().filter(|&k| state >> k & 1 == 0).collect();
            if live.len() == 1 && inst.pass[live[0]][s] {
                moved = true;
                stack.push(state | 1 << live[0]);
            }
        }
        if !moved {
            terminals.insert(state);
        }
    }
    terminals
}

pub fn mask_of(devices: &[usize]) -> u64 {
    devices.iter().fold(0, |m, &k| m | 1 << k)
}

/// Lower and upper bounds of a mean ± half-width interval.
pub fn interval(mean: f64, half: f64) -> (f64, f64) {
    (mean - half, mean + half)
}
