//! Walk through the derived parameters of a few MCIK-OFDM configurations.
//!
//! For a cluster of `N` subcarriers with `K` active, the index selector
//! carries `p1 = floor(log2 C(N,K))` bits and the PSK payload `p2 = K log2 M`
//! bits, for `p = p1 + p2` per cluster.  The table below also shows the
//! per-cluster complex-operation counts of the two detectors — the `M^K`
//! factor in the ML column is the whole motivation for the greedy detector.
//!
//! Run with: `cargo run --example derived_parameters`

use mcik_ofdm_sc::config::{CsiModel, SystemConfig};
use mcik_ofdm_sc::detectors::complexity;

fn main() {
    let configs = [
        (2, 1, 2),
        (2, 1, 4),
        (4, 1, 4),
        (4, 2, 2),
        (4, 2, 4),
        (4, 2, 8),
        (4, 3, 4),
        (8, 4, 16),
    ];

    println!(
        "{:>2} {:>2} {:>3} | {:>3} {:>3} {:>3} | {:>9} {:>5} {:>3} | {:>8} {:>8}",
        "N", "K", "M", "p1", "p2", "p", "rho", "xi", "eta", "ml ops", "gd ops"
    );
    println!("{}", "-".repeat(78));
    for (n, k, m) in configs {
        let cfg = SystemConfig::new(n, k, m, 1, CsiModel::Perfect).expect("valid config");
        let d = cfg.derive();
        let ops = complexity(&cfg);
        println!(
            "{:>2} {:>2} {:>3} | {:>3} {:>3} {:>3} | {:>9.6} {:>5} {:>3} | {:>8} {:>8}",
            n,
            k,
            m,
            d.index_bits,
            d.symbol_bits,
            d.total_bits,
            d.sin2_pi_m,
            d.sep_weight,
            d.index_weight,
            ops.ml,
            ops.gd,
        );
    }

    println!();
    let cfg = SystemConfig::new(4, 2, 8, 2, CsiModel::Perfect).unwrap();
    let d = cfg.derive();
    println!(
        "example (4,2,8): {} clusters/symbol x {} bits = {} bits per OFDM symbol",
        cfg.g,
        d.total_bits,
        cfg.g as u32 * d.total_bits
    );
    println!(
        "power reallocation: inactive subcarriers donate their energy, so each \
         active one runs at gamma_bar = (N/K) * gamma0 = {}x the per-subcarrier SNR",
        d.power_ratio
    );
}
