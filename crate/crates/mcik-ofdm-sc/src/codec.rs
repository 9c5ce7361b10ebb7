//! Bit ↔ cluster-signal mapping: the index codebook and the Gray-labeled PSK
//! constellation.
//!
//! Per cluster, the first `p1` bits select one of `2^{p1}` legal K-subsets of
//! `{1..N}` (the *index symbol* θ), and the remaining `p2 = K·log2(M)` bits
//! modulate M-PSK symbols placed on the chosen subcarriers in ascending index
//! order. Subcarrier indices are 1-based throughout the public API (slot `α`
//! lives at array position `α − 1`).
//!
//! Conventions this module pins down (the underlying scheme leaves them open):
//!
//! * Codebook order: lexicographic over sorted index tuples, keeping the first
//!   `2^{p1}` subsets — the standard combinatorial-number-system ranking.
//! * Bit groups are big-endian (MSB first) when converted to ranks/labels.
//! * PSK labeling is binary-reflected Gray: the point at angle `2πs/M`
//!   carries the label `s ^ (s >> 1)`, so angular neighbours differ in
//!   exactly one bit.
//! * A detected subcarrier set outside the codebook (possible for the greedy
//!   detector when `C(N,K) > 2^{p1}`) demaps to the legal subset with the
//!   largest intersection, ties broken by lowest rank.

use num_complex::Complex64;

use crate::config::{binomial, unit_phasor, DerivedParams};
use crate::{Error, Result};

/// One legal active-subcarrier choice: the set θ and its codebook rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSymbol {
    /// Sorted 1-based subcarrier indices, `|θ| = K`.
    pub indices: Vec<usize>,
    /// Position in the codebook, `0 ≤ rank < 2^{p1}`.
    pub rank: usize,
}

/// The `2^{p1}` legal K-subsets of `{1..N}` with rank ↔ subset maps in both
/// directions. Immutable after construction; share freely across workers.
#[derive(Debug, Clone)]
pub struct IndexCodebook {
    n: usize,
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl IndexCodebook {
    /// Enumerates K-subsets of `{1..N}` in lexicographic order and keeps the
    /// first `2^{floor(log2 C(N,K))}`.
    pub fn build(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "need 1 <= K <= N, got K={k}, N={n}");
        let legal = 1usize << (binomial(n as u64, k as u64) as f64).log2().floor() as u32;
        let mut sets = Vec::with_capacity(legal);
        let mut current: Vec<usize> = (1..=k).collect();
        loop {
            sets.push(current.clone());
            if sets.len() == legal || !next_combination(&mut current, n) {
                break;
            }
        }
        debug_assert_eq!(sets.len(), legal);
        IndexCodebook { n, k, sets }
    }

    /// Number of codewords, `2^{p1}` (never zero — the `K = N` book still
    /// holds its single full-set codeword).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    /// Index bits `p1` carried by a codeword.
    pub fn index_bits(&self) -> u32 {
        self.sets.len().trailing_zeros()
    }

    /// Subcarriers per cluster this book was built for.
    pub fn subcarriers(&self) -> usize {
        self.n
    }

    /// Active subcarriers per cluster.
    pub fn active(&self) -> usize {
        self.k
    }

    /// The sorted subset at `rank`. Panics if `rank ≥ len()`.
    pub fn subset(&self, rank: usize) -> &[usize] {
        &self.sets[rank]
    }

    /// Exact rank of a sorted legal subset, `None` if outside the codebook.
    pub fn rank(&self, set: &[usize]) -> Option<usize> {
        // Lexicographic construction order makes the table binary-searchable.
        self.sets.binary_search_by(|s| s.as_slice().cmp(set)).ok()
    }

    /// Rank for *any* K-subset: the exact rank when legal, otherwise the rank
    /// of the legal subset sharing the most indices (ties → lowest rank).
    pub fn demap(&self, set: &[usize]) -> Result<usize> {
        if set.len() != self.k {
            return Err(Error::WrongCardinality {
                expected: self.k,
                got: set.len(),
            });
        }
        if let Some(rank) = self.rank(set) {
            return Ok(rank);
        }
        let mut best = (0usize, 0usize); // (rank, overlap)
        for (rank, legal) in self.sets.iter().enumerate() {
            let overlap = legal.iter().filter(|i| set.contains(i)).count();
            if overlap > best.1 {
                best = (rank, overlap);
            }
        }
        Ok(best.0)
    }

    /// Iterates `(rank, subset)` pairs in rank order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.sets.iter().enumerate().map(|(r, s)| (r, s.as_slice()))
    }
}

/// Advances `current` (sorted, 1-based, values ≤ n) to the next K-subset in
/// lexicographic order; false once exhausted.
fn next_combination(current: &mut [usize], n: usize) -> bool {
    let k = current.len();
    for i in (0..k).rev() {
        if current[i] < n - (k - 1 - i) {
            current[i] += 1;
            for j in i + 1..k {
                current[j] = current[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The M-PSK point at angular position `s`: `e^{j·2πs/M}`, unit magnitude.
pub fn psk_point(m: usize, position: usize) -> Complex64 {
    debug_assert!(position < m);
    unit_phasor(2.0 * std::f64::consts::PI * position as f64 / m as f64)
}

/// Gray label carried by angular position `s` (binary-reflected code).
pub fn gray_label(position: usize) -> usize {
    position ^ (position >> 1)
}

/// Inverse of [`gray_label`]: the angular position that carries `label`
/// (prefix-xor of the label bits).
pub fn gray_position(label: usize) -> usize {
    let mut p = label;
    let mut s = 1;
    while s < usize::BITS as usize {
        p ^= p >> s;
        s <<= 1;
    }
    debug_assert_eq!(gray_label(p), label);
    p
}

/// Big-endian bits → integer.
pub fn bits_to_value(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| {
        debug_assert!(b <= 1);
        (acc << 1) | b as usize
    })
}

/// Integer → big-endian bits of the given width.
pub fn value_to_bits(value: usize, width: usize, out: &mut Vec<u8>) {
    for i in (0..width).rev() {
        out.push(((value >> i) & 1) as u8);
    }
}

/// One cluster's frequency-domain transmit vector: exactly `K` entries are
/// nonzero, each of unit magnitude (`E_s = 1`), so `Σ|x(α)|² = K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSignal {
    /// `samples[α − 1]` is the amplitude on subcarrier `α`.
    pub samples: Vec<Complex64>,
}

impl ClusterSignal {
    /// Total transmit energy `Σ|x(α)|²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Maps `p = p1 + p2` bits to the index symbol and the modulated cluster.
///
/// The first `p1` bits pick the codebook rank; the remaining bits, in `K`
/// groups of `log2(M)`, pick Gray-labeled PSK points placed on the active
/// subcarriers in ascending order.
pub fn encode(
    bits: &[u8],
    book: &IndexCodebook,
    params: &DerivedParams,
) -> Result<(IndexSymbol, ClusterSignal)> {
    let p = params.total_bits as usize;
    if bits.len() != p {
        return Err(Error::BitLength {
            expected: p,
            got: bits.len(),
        });
    }
    let p1 = params.index_bits as usize;
    let rank = bits_to_value(&bits[..p1]);
    let indices = book.subset(rank).to_vec();

    let mut samples = vec![Complex64::new(0.0, 0.0); book.subcarriers()];
    let m_bits = params.bits_per_symbol as usize;
    for (slot, &alpha) in indices.iter().enumerate() {
        let group = &bits[p1 + slot * m_bits..p1 + (slot + 1) * m_bits];
        let position = gray_position(bits_to_value(group));
        samples[alpha - 1] = psk_point(params.psk_order, position);
    }
    Ok((IndexSymbol { indices, rank }, ClusterSignal { samples }))
}

/// Recovers the `p`-bit vector from a detected subcarrier set and the PSK
/// positions detected on it (ascending subcarrier order). Out-of-codebook
/// sets go through [`IndexCodebook::demap`].
pub fn decode_bits(
    detected_set: &[usize],
    detected_positions: &[usize],
    book: &IndexCodebook,
    params: &DerivedParams,
) -> Result<Vec<u8>> {
    let rank = book.demap(detected_set)?;
    let mut bits = Vec::with_capacity(params.total_bits as usize);
    value_to_bits(rank, params.index_bits as usize, &mut bits);
    for &pos in detected_positions {
        value_to_bits(gray_label(pos), params.bits_per_symbol as usize, &mut bits);
    }
    Ok(bits)
}
