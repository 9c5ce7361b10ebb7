//! Closed-form BER curves for one configuration under all three CSI models.
//!
//! The same (4,1,4,2) system is evaluated with perfect estimates, a fixed
//! estimation error `ε² = 0.05`, and the MMSE error `ε² = 1/(1+γ₀)` that
//! shrinks with SNR.  Perfect and MMSE keep the full diversity slope
//! (factor `10^L` per decade); fixed `ε²` flattens into an error floor.
//!
//! Run with: `cargo run --example theory_curves`

use mcik_ofdm_sc::analytics::{asymptote, theory_point};
use mcik_ofdm_sc::config::{db_to_linear, CsiModel, SystemConfig};
use mcik_ofdm_sc::detectors::DetectorKind;

fn main() {
    let models = [
        ("perfect", CsiModel::Perfect),
        ("fixed:0.05", CsiModel::Fixed(0.05)),
        ("mmse", CsiModel::MmseVariable),
    ];

    for (name, csi) in models {
        let cfg = SystemConfig::new(4, 1, 4, 2, csi).unwrap();
        let floor_or_slope = match csi {
            CsiModel::Fixed(_) => "floor".to_string(),
            _ => format!("slope 10^{} per decade", cfg.l),
        };
        println!("\n(4,1,4,2) csi = {name}  [{floor_or_slope}]");
        println!(
            "{:>6} {:>10} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "dB", "eps2", "sep", "iep_ml", "iep_gd", "ber_ml", "ber_gd"
        );
        for db in (0..=40).step_by(5) {
            let pt = theory_point(&cfg, db as f64);
            println!(
                "{:>6} {:>10.3e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
                db, pt.eps2, pt.sep, pt.iep_ml, pt.iep_gd, pt.ber_ml, pt.ber_gd
            );
        }
        let am = asymptote(DetectorKind::Ml, &cfg);
        let ag = asymptote(DetectorKind::Gd, &cfg);
        println!(
            "asymptote at 40 dB: ml {:.4e}, gd {:.4e}",
            am.value(db_to_linear(40.0)),
            ag.value(db_to_linear(40.0))
        );
    }
}
