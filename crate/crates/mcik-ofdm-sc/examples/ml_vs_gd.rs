//! ML-versus-greedy gap as diversity grows: theory and a paired simulation.
//!
//! For (2,1,2) with perfect CSI the two detectors share the diversity
//! order `L`, so their high-SNR curves are parallel and the gap is a pure
//! SNR shift `Δ₁ = (10/L) log₁₀(1 + η₁)`.  As `L` grows the gap shrinks
//! toward `10 log₁₀ 2 ≈ 3.01 dB` for BPSK — and the greedy detector costs
//! a fraction of the ML complexity the whole time.
//!
//! The paired simulation runs both detectors on identical noise and
//! channels, so the measured ordering at a single SNR is essentially free
//! of common randomness.
//!
//! Run with: `cargo run --release --example ml_vs_gd`

use mcik_ofdm_sc::analytics::{ber_gd, ber_ml, coding_gain_perfect};
use mcik_ofdm_sc::config::{CsiModel, SystemConfig};
use mcik_ofdm_sc::engine::{run_point, DetectorChoice, StopRule};

fn main() {
    println!("theory: (2,1,2), perfect CSI");
    println!(
        "{:>3} | {:>12} {:>12} @ 15 dB | {:>9} {:>13}",
        "L", "ber_ml", "ber_gd", "gap dB", "large-L limit"
    );
    for l in [1usize, 2, 4, 8] {
        let cfg = SystemConfig::new(2, 1, 2, l, CsiModel::Perfect).unwrap();
        let gain = coding_gain_perfect(&cfg);
        println!(
            "{:>3} | {:>12.4e} {:>12.4e}         | {:>9.3} {:>13.3}",
            l,
            ber_ml(&cfg, 15.0),
            ber_gd(&cfg, 15.0),
            gain.db,
            gain.large_l_limit_db
        );
    }

    println!("\npaired simulation at 10 dB (same channels and noise for both):");
    let stop = StopRule {
        min_bit_errors: 400,
        max_frames: 4_000_000,
    };
    println!(
        "{:>3} | {:>11} {:>11} | {:>11} {:>11} | {:>8}",
        "L", "sim ml", "sim gd", "theory ml", "theory gd", "frames"
    );
    for l in [1usize, 2, 4] {
        let cfg = SystemConfig::new(2, 1, 2, l, CsiModel::Perfect).unwrap();
        let pt = run_point(&cfg, 10.0, DetectorChoice::Both, 3, &stop);
        let (ml, gd) = (pt.ml.unwrap(), pt.gd.unwrap());
        println!(
            "{:>3} | {:>11.4e} {:>11.4e} | {:>11.4e} {:>11.4e} | {:>8}",
            l, ml.ber, gd.ber, pt.theory.ber_ml, pt.theory.ber_gd, ml.frames
        );
        assert!(ml.ber <= gd.ber, "ML must not lose under perfect CSI");
    }
    println!("\nthe ML edge is real but bounded; eight branches buy back most of it.");
}
