//! Monte-Carlo waterfall of the greedy detector under the three CSI models.
//!
//! Reproduces the canonical comparison: (4,1,4), two SC branches, greedy
//! detection.  Perfect CSI falls fastest; MMSE estimation costs a fixed
//! SNR offset but keeps the slope; fixed `ε² = 0.05` bends into its floor.
//! Each printed point pairs the measured BER (with its 95% interval) and
//! the closed-form value — they track within Monte-Carlo noise.
//!
//! Run with: `cargo run --release --example waterfall`

use mcik_ofdm_sc::config::{CsiModel, SystemConfig};
use mcik_ofdm_sc::engine::{run_point, DetectorChoice, StopRule};

fn main() {
    let models = [
        ("perfect", CsiModel::Perfect),
        ("fixed:0.05", CsiModel::Fixed(0.05)),
        ("mmse", CsiModel::MmseVariable),
    ];
    let stop = StopRule {
        min_bit_errors: 300,
        max_frames: 2_000_000,
    };

    println!(
        "{:<12} {:>4} | {:>11} {:>9} | {:>11} | {:>8}",
        "csi", "dB", "sim ber", "ci95", "theory ber", "frames"
    );
    println!("{}", "-".repeat(68));
    for (name, csi) in models {
        let cfg = SystemConfig::new(4, 1, 4, 2, csi).unwrap();
        for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
            let pt = run_point(&cfg, db, DetectorChoice::Gd, 1, &stop);
            let gd = pt.gd.expect("gd requested");
            println!(
                "{:<12} {:>4} | {:>11.4e} {:>9.1e} | {:>11.4e} | {:>8}",
                name, db, gd.ber, gd.ci95, pt.theory.ber_gd, gd.frames
            );
        }
        println!("{}", "-".repeat(68));
    }
    println!("the bound is a union bound: it sits slightly above the measurement");
    println!("at low SNR and converges onto it as the BER falls.");
}
