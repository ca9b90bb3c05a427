//! Successive interference cancellation on a hand-built collision pattern.
//! Device 0 is alone in slot 0; cancelling it frees slot 1 for device 1,
//! which in turn frees slot 2.

use ris_ra::channel::SnrMatrix;
use ris_ra::receiver::{sic_decode, singleton_successes, SlotOccupancy};

fn main() -> ris_ra::Result<()> {
    let occupancy = SlotOccupancy::from_slots(4, vec![vec![0], vec![0, 1], vec![1, 2], vec![2, 3], vec![3]])?;
    // Device 3 is too weak in slot 4 to be decoded there.
    let mut snr = vec![vec![10.0; 5]; 4];
    snr[3][4] = 0.1;
    let snr = SnrMatrix::from_rows(&snr)?;

    let result = sic_decode(&occupancy, &snr, 1.0)?;
    println!("without SIC: {} decoded", singleton_successes(&occupancy, &snr, 1.0)?);
    println!("with SIC:    {:?} decoded in {} passes", result.decoded, result.iterations);
    print!("iter,slot,device\n{}", result.trace_lines());
    Ok(())
}
