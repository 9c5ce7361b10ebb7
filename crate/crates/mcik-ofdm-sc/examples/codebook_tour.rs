//! Tour of the index codebook and the bit <-> cluster mapping.
//!
//! The codebook is the first `2^p1` K-subsets of `{1..N}` in lexicographic
//! order.  Encoding splits the `p` input bits into an index rank and `K`
//! Gray-labeled PSK positions; decoding inverts both, and an out-of-codebook
//! detected set (possible for the greedy detector) is demapped to the
//! nearest legal subset by intersection size.
//!
//! Run with: `cargo run --example codebook_tour`

use mcik_ofdm_sc::codec::{encode, gray_label, IndexCodebook};
use mcik_ofdm_sc::config::{CsiModel, SystemConfig};

fn main() {
    let cfg = SystemConfig::new(4, 2, 4, 1, CsiModel::Perfect).unwrap();
    let params = cfg.derive();
    let book = IndexCodebook::build(cfg.n, cfg.k);

    println!(
        "codebook for (N,K) = (4,2): C(4,2) = 6 subsets, keep 2^{} = {}",
        params.index_bits,
        book.len()
    );
    for (rank, set) in book.iter() {
        println!("  rank {rank} = {set:?}");
    }

    println!("\nGray labels for M = 4 (adjacent positions differ in one bit):");
    for pos in 0..4 {
        println!(
            "  position {pos} (phase {:>5.1} deg) -> label {:02b}",
            90.0 * pos as f64,
            gray_label(pos)
        );
    }

    let bits = [1, 0, 0, 1, 1, 1];
    let (sym, signal) = encode(&bits, &book, &params).unwrap();
    println!("\nencode {bits:?}:");
    println!(
        "  index bits [1,0] -> rank {} -> active set {:?}",
        sym.rank, sym.indices
    );
    for (slot, &alpha) in sym.indices.iter().enumerate() {
        let x = signal.samples[alpha - 1];
        println!(
            "  slot {slot} on subcarrier {alpha}: x = {:+.3}{:+.3}j",
            x.re, x.im
        );
    }
    println!(
        "  cluster energy = {} (always K: unit-energy PSK on K subcarriers)",
        signal.energy()
    );

    // The greedy detector can hand back any K-subset; show the demap rule.
    println!("\ndemap of illegal sets (nearest codebook subset by intersection):");
    for probe in [vec![3usize, 4], vec![2, 4]] {
        let rank = book.demap(&probe).unwrap();
        println!("  {probe:?} -> rank {rank} = {:?}", book.subset(rank));
    }
}
