//! Link-level simulation and closed-form BER analysis for MCIK-OFDM with
//! selection-combining (SC) reception.
//!
//! MCIK-OFDM (multicarrier index keying, also known as OFDM-IM) splits each
//! OFDM symbol into `G` clusters of `N` subcarriers and activates only `K` of
//! them per cluster. The *choice* of active subcarriers carries
//! `p1 = floor(log2 C(N,K))` index bits; the `K` active subcarriers carry
//! `p2 = K·log2(M)` ordinary M-PSK bits. The receiver has `L` antennas and
//! performs per-subcarrier selection combining on the *estimated* channel
//! gains, so channel-estimation error (variance `ε²`) degrades both the
//! combining and the detection.
//!
//! The crate answers one practical question from both directions at once:
//! *how much BER do you give up by replacing the joint maximum-likelihood
//! detector with the cheap greedy energy detector, under realistic CSI?*
//!
//! * Monte-Carlo: [`engine::run_point`] simulates the exact link
//!   (encode → fade → combine → detect → count bit errors) with
//!   deterministic, parallel, counter-seeded random streams.
//! * Closed forms: [`analytics`] evaluates the average SEP/IEP/BER
//!   expressions, their high-SNR asymptotes, error floors under fixed `ε²`,
//!   and the ML-over-GD coding gains `Δ1`/`Δ2` with their large-`L` limits.
//!
//! The two routes cross-validate each other; the `acceptance` integration
//! test drives the full comparison grid.
//!
//! # Module map
//!
//! | module | contents |
//! |---|---|
//! | [`config`] | system parameters `(N,K,M,L,G)`, CSI models, derived scalars |
//! | [`codec`] | index codebook (combinadic ranking), Gray-labeled PSK, bit mapping |
//! | [`channel`] | Rayleigh SIMO sampling with estimate/error split, SC combining |
//! | [`detectors`] | ML and greedy detectors, bit-error counting, complexity counts |
//! | [`analytics`] | closed-form SEP/IEP/BER, MGFs, asymptotes, coding gains, guidelines |
//! | [`engine`] | deterministic parallel Monte-Carlo BER estimation |
//! | [`cli`] | `theory`/`simulate`/`recommend`/`validate` commands, CSV/JSON output |
//!
//! # Quick start
//!
//! ```
//! use mcik_ofdm_sc::config::{CsiModel, SystemConfig};
//! use mcik_ofdm_sc::analytics;
//!
//! // (N,K,M) = (4,1,4), two receive antennas, perfect CSI.
//! let cfg = SystemConfig::new(4, 1, 4, 2, CsiModel::Perfect).unwrap();
//! let point = analytics::theory_point(&cfg, 10.0);
//! assert!(point.ber_gd > point.ber_ml);
//! ```
//!
//! Runnable walkthroughs live in `examples/` (one per capability); the `mcik`
//! binary exposes the same machinery as a four-subcommand CLI.

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod config;
pub mod detectors;
pub mod engine;

use thiserror::Error;

/// Crate-wide error type. Math kernels panic on contract violations (documented
/// per function); everything user-facing — configuration, parsing, I/O —
/// reports through this enum instead.
#[derive(Debug, Error)]
pub enum Error {
    /// A system-parameter constraint was violated (K > N, M not a power of
    /// two, ε² outside [0,1), ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A bit vector had the wrong length for the configured cluster.
    #[error("expected {expected} bits, got {got}")]
    BitLength { expected: usize, got: usize },
    /// An index set had the wrong cardinality.
    #[error("expected a {expected}-subset, got {got} indices")]
    WrongCardinality { expected: usize, got: usize },
    /// A malformed config document / CLI value.
    #[error("parse error: {0}")]
    Parse(String),
    /// An invalid SNR grid or stop rule.
    #[error("invalid range: {0}")]
    InvalidRange(String),
    /// Validation suite failure (see the printed report for details).
    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
