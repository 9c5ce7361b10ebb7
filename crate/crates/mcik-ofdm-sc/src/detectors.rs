//! The two post-combining detectors and their bookkeeping.
//!
//! **ML**: jointly minimizes `Σ_α |y(α) − ĥ(α)x(α)|²` over every legal
//! codebook rank × PSK symbol combination. Because the squared norm splits
//! per subcarrier, the search precomputes an `N×M` metric table plus the
//! per-subcarrier best symbol, and then only scores the `2^{p1}` supports —
//! `O(NM + 2^{p1}K)` per cluster instead of `O(2^{p1}M^K·N)`, with bit-exact
//! equality to the brute-force search (same additions, reordered around a
//! shared constant `Σ|y|²`).
//!
//! **GD** (greedy): declares the `K` largest received energies `|y(α)|²`
//! active, then demodulates each declared subcarrier independently. Its
//! detected set can fall outside the codebook; the codec's demap rule turns
//! it back into index bits.
//!
//! Both detectors are deterministic: every floating-point tie breaks to the
//! lowest rank / symbol / subcarrier.

use std::fmt;

use crate::channel::CombinedObservation;
use crate::codec::{decode_bits, psk_point, IndexCodebook};
use crate::config::{DerivedParams, SystemConfig};

/// Which detector produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Ml,
    Gd,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorKind::Ml => "ml",
            DetectorKind::Gd => "gd",
        })
    }
}

/// A detector's verdict for one cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionResult {
    pub detector: DetectorKind,
    /// Detected active set θ̂, sorted, 1-based. Always a codebook member for
    /// ML; any K-subset for GD.
    pub indices: Vec<usize>,
    /// Detected PSK angular positions, aligned with `indices`.
    pub symbols: Vec<usize>,
}

/// Detection-op counts per cluster (the complexity yardstick used when
/// recommending a detector): `ML = N + 2·C·M^K` with `C = 2^{p1}`,
/// `GD = 2N + 2KM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ComplexityCount {
    pub ml: u64,
    pub gd: u64,
}

/// Evaluates the complexity formulas for a configuration.
pub fn complexity(cfg: &SystemConfig) -> ComplexityCount {
    let d = cfg.derive();
    let c = 1u64 << d.index_bits;
    let m = cfg.m as u64;
    ComplexityCount {
        ml: cfg.n as u64 + 2 * c * m.pow(cfg.k as u32),
        gd: 2 * cfg.n as u64 + 2 * cfg.k as u64 * m,
    }
}

/// Per-subcarrier demodulation table: best PSK position and the support
/// "gain" (best metric minus the cost of leaving the subcarrier idle).
fn per_subcarrier_best(obs: &CombinedObservation, m: usize) -> (Vec<usize>, Vec<f64>) {
    let n = obs.subcarriers();
    let mut best_sym = vec![0usize; n];
    let mut gain = vec![0f64; n];
    for i in 0..n {
        let idle = obs.y[i].norm_sqr();
        let mut best = f64::INFINITY;
        let mut sym = 0usize;
        for s in 0..m {
            let metric = (obs.y[i] - obs.est[i] * psk_point(m, s)).norm_sqr();
            if metric < best {
                best = metric;
                sym = s;
            }
        }
        best_sym[i] = sym;
        gain[i] = best - idle;
    }
    (best_sym, gain)
}

/// Joint maximum-likelihood detection over the full candidate space.
pub fn ml_detect(
    obs: &CombinedObservation,
    book: &IndexCodebook,
    params: &DerivedParams,
) -> DetectionResult {
    debug_assert_eq!(obs.subcarriers(), book.subcarriers());
    let (best_sym, gain) = per_subcarrier_best(obs, params.psk_order);
    let mut best_rank = 0usize;
    let mut best_score = f64::INFINITY;
    for (rank, set) in book.iter() {
        let score: f64 = set.iter().map(|&alpha| gain[alpha - 1]).sum();
        if score < best_score {
            best_score = score;
            best_rank = rank;
        }
    }
    let indices = book.subset(best_rank).to_vec();
    let symbols = indices.iter().map(|&alpha| best_sym[alpha - 1]).collect();
    DetectionResult {
        detector: DetectorKind::Ml,
        indices,
        symbols,
    }
}

/// Greedy detection: top-`K` energies, then per-subcarrier ML demodulation.
pub fn gd_detect(obs: &CombinedObservation, params: &DerivedParams) -> DetectionResult {
    let n = obs.subcarriers();
    let k = active_count(params, n);
    let mut order: Vec<usize> = (0..n).collect();
    // Stable ordering: descending energy, ties to the lowest subcarrier.
    order.sort_by(|&a, &b| {
        obs.y[b]
            .norm_sqr()
            .partial_cmp(&obs.y[a].norm_sqr())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut indices: Vec<usize> = order[..k].iter().map(|&i| i + 1).collect();
    indices.sort_unstable();

    let m = params.psk_order;
    let symbols = indices
        .iter()
        .map(|&alpha| {
            let i = alpha - 1;
            let mut best = f64::INFINITY;
            let mut sym = 0usize;
            for s in 0..m {
                let metric = (obs.y[i] - obs.est[i] * psk_point(m, s)).norm_sqr();
                if metric < best {
                    best = metric;
                    sym = s;
                }
            }
            sym
        })
        .collect();
    DetectionResult {
        detector: DetectorKind::Gd,
        indices,
        symbols,
    }
}

/// K recovered from the derived bit budget (`p2 / m` bits per symbol).
fn active_count(params: &DerivedParams, n: usize) -> usize {
    let k = (params.symbol_bits / params.bits_per_symbol) as usize;
    debug_assert!(k >= 1 && k <= n);
    k
}

/// Decodes a detection into bits and counts Hamming errors against the
/// transmitted word, split into (index-bit errors, symbol-bit errors).
pub fn count_bit_errors(
    tx_bits: &[u8],
    det: &DetectionResult,
    book: &IndexCodebook,
    params: &DerivedParams,
) -> (u64, u64) {
    let bits = decode_bits(&det.indices, &det.symbols, book, params)
        .expect("detector output is always a K-subset");
    debug_assert_eq!(bits.len(), tx_bits.len());
    let p1 = params.index_bits as usize;
    let index_errors = tx_bits[..p1]
        .iter()
        .zip(&bits[..p1])
        .filter(|(a, b)| a != b)
        .count() as u64;
    let symbol_errors = tx_bits[p1..]
        .iter()
        .zip(&bits[p1..])
        .filter(|(a, b)| a != b)
        .count() as u64;
    (index_errors, symbol_errors)
}
