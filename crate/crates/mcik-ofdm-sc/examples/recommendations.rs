//! The detector decision matrix across modulation orders and CSI models.
//!
//! The trade is always BER against complexity: the ML detector searches all
//! `2^p1 · M^K` candidates, the greedy detector ranks `N` energies.  The
//! high-SNR analysis collapses the BER side into one number (the SNR gain
//! `Δ`), which makes the decision mechanical:
//!
//! * perfect CSI — ML pays off for BPSK/QPSK, is pointless from 8-PSK up;
//! * MMSE-tracked error — the crossover drops to QPSK;
//! * fixed error — the greedy detector wins outright (lower floor, lower cost).
//!
//! Run with: `cargo run --example recommendations`

use mcik_ofdm_sc::analytics::recommend_detector;
use mcik_ofdm_sc::config::{CsiModel, SystemConfig};

fn main() {
    let models = [
        ("perfect", CsiModel::Perfect),
        ("mmse", CsiModel::MmseVariable),
        ("fixed:0.1", CsiModel::Fixed(0.1)),
    ];

    println!(
        "{:<11} {:>3} | {:>4} | {:>8} | {:>8} {:>8}",
        "csi", "M", "pick", "gain dB", "ml ops", "gd ops"
    );
    println!("{}", "-".repeat(56));
    for (name, csi) in models {
        for m in [2usize, 4, 8, 16] {
            let cfg = SystemConfig::new(4, 2, m, 4, csi).unwrap();
            let rec = recommend_detector(&cfg);
            println!(
                "{:<11} {:>3} | {:>4} | {:>8} | {:>8} {:>8}",
                name,
                m,
                rec.detector.to_string(),
                rec.gain_db.map_or("-".into(), |g| format!("{g:.3}")),
                rec.complexity.ml,
                rec.complexity.gd,
            );
        }
        println!("{}", "-".repeat(56));
    }

    let focus = SystemConfig::new(2, 1, 2, 8, CsiModel::Perfect).unwrap();
    let rec = recommend_detector(&focus);
    println!("\nclose-up on (2,1,2) with L = 8, perfect CSI:");
    println!("  pick: {}", rec.detector);
    println!("  {}", rec.rationale);
}
