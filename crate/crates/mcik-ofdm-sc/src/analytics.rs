//! Closed-form error-rate analysis for MCIK-OFDM with selection combining.
//!
//! Everything in this module is deterministic arithmetic: no sampling, no
//! state.  The Monte-Carlo engine cross-checks itself against these curves,
//! and the acceptance suite checks the curves against the engine, so the two
//! halves of the crate keep each other honest.
//!
//! # Model recap
//!
//! With `L`-branch selection combining and estimation-error variance `ε²`,
//! the selected estimated gain `ν̂ = max_l |ĥ_l|²` has MGF
//!
//! ```text
//! M_ν̂(t) = L! / ∏_{l=1..L} (l − (1−ε²) t),
//! ```
//!
//! and the true gain `ν = |h|²` on the selected branch is conditionally
//! noncentral with `E{M_ν|ν̂}(t) = e^{ν̂ t/(1−ε² t)} / (1−ε² t)`.  Averaging a
//! two-point exponential bound on `Q(x)` against these MGFs yields the
//! average symbol- and index-error probabilities below; both are ordinary
//! rational functions of the per-active-subcarrier SNR `γ̄ = (N/K)·γ₀`.
//!
//! The detectors are compared through a weighted bit-error composition
//!
//! ```text
//! P_b ≈ [ (η p₁ + m)·P̄_I / 2 + K·P̄_M ] / p,      η = 2 for N = 2 else 1,
//! ```
//!
//! where `P̄_I` is the detector-specific index error probability and `P̄_M`
//! the per-active-subcarrier PSK symbol error probability.
//!
//! # High-SNR structure
//!
//! Under perfect or MMSE-tracked CSI both detectors achieve full diversity
//! `L`, so each BER curve collapses onto a power law `coeff / γ₀^L`; under a
//! fixed `ε² > 0` both saturate at an SNR-independent floor, with the ML
//! floor sitting exactly one index-error term above the GD floor.  The
//! [`Asymptote`] type captures both regimes, [`asymptote_set`] exposes the
//! individual constants, and [`recommend_detector`] turns the high-SNR gap
//! and the operation counts into an engineering recommendation.
//!
//! Probabilities are *not* clamped to `[0, 1]`: the closed forms are unions
//! bounds and may exceed one at very low SNR.  Callers that need a
//! probability should treat values above one as "bound is vacuous here".

use serde::Serialize;

use crate::config::{binomial, DerivedParams, SystemConfig};
use crate::detectors::{complexity, ComplexityCount, DetectorKind};

/// ln(L!) − Σ_{l=1..L} ln(l + c), i.e. ln( L! / ∏ (l + c) ), for c ≥ 0.
///
/// Working term-by-term in the log domain keeps L = 64 well inside f64
/// range (64! overflows f64 by itself) and keeps relative error at a few
/// ulps independent of L.
fn ln_fact_over_prod(l: usize, c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    (1..=l)
        .map(|i| {
            let i = i as f64;
            i.ln() - (i + c).ln()
        })
        .sum()
}

/// ln ∏_{l=1..L} (1 + c/l) for c ≥ 0, via `ln_1p` so small c stays exact.
fn ln_prod_one_plus(l: usize, c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    (1..=l).map(|i| (c / i as f64).ln_1p()).sum()
}

/// Neumaier-compensated sum after sorting by descending magnitude.
///
/// The alternating binomial sums in the greedy index-error expression and
/// in the `ω`/`ψ` constants cancel heavily for large N − K; summing big
/// terms first with a Kahan-Neumaier carry keeps the result accurate to a
/// few ulps of the *true* sum rather than of the largest term.
fn compensated_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("non-NaN terms"));
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for &t in terms.iter() {
        let s = sum + t;
        carry += if sum.abs() >= t.abs() {
            (sum - s) + t
        } else {
            (t - s) + sum
        };
        sum = s;
    }
    sum + carry
}

fn check_inputs(gamma_bar: f64, eps2: f64, l: usize) {
    assert!(
        gamma_bar > 0.0,
        "average SNR must be positive, got {gamma_bar}"
    );
    assert!(
        (0.0..1.0).contains(&eps2),
        "estimation error variance must lie in [0, 1), got {eps2}"
    );
    assert!(l >= 1, "at least one diversity branch is required");
}

/// Average M-PSK symbol error probability per active subcarrier.
///
/// ```text
/// P̄_M ≈ (ξ/12) { L!/∏[l + (1−ε²)ργ̄/(1+ε²γ̄)]  +  3·L!/∏[l + 4(1−ε²)ργ̄/(3(1+ε²γ̄))] },
/// ```
/// with `ρ = sin²(π/M)` and `ξ = 1` for BPSK, `ξ = 2` otherwise.
pub fn avg_sep_psk(gamma_bar: f64, eps2: f64, l: usize, m: usize) -> f64 {
    check_inputs(gamma_bar, eps2, l);
    assert!(
        m >= 2 && m.is_power_of_two(),
        "PSK order must be a power of two >= 2, got {m}"
    );
    let rho = (std::f64::consts::PI / m as f64).sin().powi(2);
    let xi = if m == 2 { 1.0 } else { 2.0 };
    let base = (1.0 - eps2) * rho * gamma_bar / (1.0 + eps2 * gamma_bar);
    let t1 = ln_fact_over_prod(l, base).exp();
    let t2 = ln_fact_over_prod(l, 4.0 * base / 3.0).exp();
    xi / 12.0 * (t1 + 3.0 * t2)
}

/// Average index error probability of the maximum-likelihood detector.
///
/// Union bound over the `Ψ₁ = K(N−K)` dominant active/inactive swaps:
///
/// ```text
/// P̄_I ≈ (Ψ₁/12) { (L!)²/∏[l + (1−ε²)γ̄/(4+2ε²γ̄)]²  +  3(L!)²/∏[l + 2(1−ε²)γ̄/(6+3ε²γ̄)]² }.
/// ```
pub fn avg_iep_ml(gamma_bar: f64, eps2: f64, l: usize, n: usize, k: usize) -> f64 {
    check_inputs(gamma_bar, eps2, l);
    assert!(k >= 1 && k <= n, "need 1 <= K <= N");
    let psi1 = (k * (n - k)) as f64;
    let c1 = (1.0 - eps2) * gamma_bar / (4.0 + 2.0 * eps2 * gamma_bar);
    let c2 = 2.0 * (1.0 - eps2) * gamma_bar / (6.0 + 3.0 * eps2 * gamma_bar);
    let t1 = (2.0 * ln_fact_over_prod(l, c1)).exp();
    let t2 = (2.0 * ln_fact_over_prod(l, c2)).exp();
    psi1 / 12.0 * (t1 + 3.0 * t2)
}

/// Average index error probability of the greedy (energy-ranking) detector.
///
/// Exact order-statistics expansion over the N − K inactive subcarriers:
///
/// ```text
/// P̄_I = K Σ_{i=1}^{N−K} (−1)^{i+1} C(N−K, i) · L! /
///        { (i + 1 + i ε² γ̄) · ∏_{l=1..L}[ l + (1−ε²) i γ̄ / (i + 1 + i ε² γ̄) ] }.
/// ```
///
/// For L = 1 the ε² dependence cancels term by term, so single-branch
/// greedy index detection is provably insensitive to estimation error.
pub fn avg_iep_gd(gamma_bar: f64, eps2: f64, l: usize, n: usize, k: usize) -> f64 {
    check_inputs(gamma_bar, eps2, l);
    assert!(k >= 1 && k <= n, "need 1 <= K <= N");
    let mut terms: Vec<f64> = (1..=(n - k))
        .map(|i| {
            let fi = i as f64;
            let denom0 = fi + 1.0 + fi * eps2 * gamma_bar;
            let c = (1.0 - eps2) * fi * gamma_bar / denom0;
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial((n - k) as u64, i as u64) as f64
                * (ln_fact_over_prod(l, c) - denom0.ln()).exp()
        })
        .collect();
    k as f64 * compensated_sum(&mut terms)
}

/// Weighted composition of index and symbol error rates into a BER.
///
/// `P_b ≈ [ (η p₁ + m)·iep/2 + K·sep ] / p`.  Exposed so that callers (and
/// the self-validation command) can verify that [`ber_ml`]/[`ber_gd`] are
/// exactly this composition of their published ingredients.
pub fn compose_ber(iep: f64, sep: f64, params: &DerivedParams) -> f64 {
    let k = params.symbol_bits as f64 / params.bits_per_symbol as f64;
    let weight = params.index_error_bit_weight() as f64;
    (weight * iep / 2.0 + k * sep) / params.total_bits as f64
}

fn gamma_bar_and_eps2(cfg: &SystemConfig, gamma0_db: f64) -> (f64, f64) {
    (cfg.snr_to_active(gamma0_db), cfg.epsilon2_at(gamma0_db))
}

/// Closed-form BER of the ML detector at `γ₀` (dB per subcarrier).
pub fn ber_ml(cfg: &SystemConfig, gamma0_db: f64) -> f64 {
    let p = cfg.derive();
    let (gb, e2) = gamma_bar_and_eps2(cfg, gamma0_db);
    compose_ber(
        avg_iep_ml(gb, e2, cfg.l, cfg.n, cfg.k),
        avg_sep_psk(gb, e2, cfg.l, cfg.m),
        &p,
    )
}

/// Closed-form BER of the greedy detector at `γ₀` (dB per subcarrier).
pub fn ber_gd(cfg: &SystemConfig, gamma0_db: f64) -> f64 {
    let p = cfg.derive();
    let (gb, e2) = gamma_bar_and_eps2(cfg, gamma0_db);
    compose_ber(
        avg_iep_gd(gb, e2, cfg.l, cfg.n, cfg.k),
        avg_sep_psk(gb, e2, cfg.l, cfg.m),
        &p,
    )
}

/// One row of a theory sweep: every closed-form quantity at a single SNR.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoryPoint {
    /// Per-subcarrier SNR in dB (the sweep axis).
    pub gamma0_db: f64,
    /// The same SNR in linear units.
    pub gamma0: f64,
    /// Per-active-subcarrier SNR `γ̄ = (N/K)·γ₀`.
    pub gamma_bar: f64,
    /// Estimation error variance in effect at this SNR.
    pub eps2: f64,
    /// Average M-PSK symbol error probability per active subcarrier.
    pub sep: f64,
    /// Average index error probability, ML detector.
    pub iep_ml: f64,
    /// Average index error probability, greedy detector.
    pub iep_gd: f64,
    /// Bit error rate, ML detector.
    pub ber_ml: f64,
    /// Bit error rate, greedy detector.
    pub ber_gd: f64,
}

/// Evaluates every closed form at one SNR point.
pub fn theory_point(cfg: &SystemConfig, gamma0_db: f64) -> TheoryPoint {
    let p = cfg.derive();
    let (gb, e2) = gamma_bar_and_eps2(cfg, gamma0_db);
    let sep = avg_sep_psk(gb, e2, cfg.l, cfg.m);
    let iep_ml = avg_iep_ml(gb, e2, cfg.l, cfg.n, cfg.k);
    let iep_gd = avg_iep_gd(gb, e2, cfg.l, cfg.n, cfg.k);
    TheoryPoint {
        gamma0_db,
        gamma0: crate::config::db_to_linear(gamma0_db),
        gamma_bar: gb,
        eps2: e2,
        sep,
        iep_ml,
        iep_gd,
        ber_ml: compose_ber(iep_ml, sep, &p),
        ber_gd: compose_ber(iep_gd, sep, &p),
    }
}

// ---------------------------------------------------------------------------
// Moment generating functions
// ---------------------------------------------------------------------------

/// MGF of the selected *estimated* channel gain `ν̂ = max_l |ĥ_l|²`:
/// `M(t) = L! / ∏_{l=1..L} (l − (1−ε²)t)` for `t < 1/(1−ε²)`.
pub fn mgf_selected_est_gain(t: f64, eps2: f64, l: usize) -> f64 {
    assert!(
        (0.0..1.0).contains(&eps2),
        "estimation error variance must lie in [0, 1)"
    );
    assert!(l >= 1, "at least one diversity branch is required");
    assert!(
        (1.0 - eps2) * t < 1.0,
        "MGF diverges for t >= 1/(1 - eps2); got t = {t}"
    );
    if t <= 0.0 {
        ln_fact_over_prod(l, -(1.0 - eps2) * t).exp()
    } else {
        // For 0 < t < 1/(1−ε²) the factors (l − (1−ε²)t) stay positive but
        // the first one may be < 1, so work with the direct product.
        (1..=l)
            .map(|i| i as f64 / (i as f64 - (1.0 - eps2) * t))
            .product()
    }
}

/// Conditional MGF of the true gain `ν = |h|²` given the estimated gain:
/// `M(t | ν̂) = exp(ν̂ t / (1 − ε² t)) / (1 − ε² t)` for `t < 1/ε²`.
///
/// `h = ĥ + e` with independent `e ~ CN(0, ε²)`, so given `ĥ` the true gain
/// is noncentral-χ² with two degrees of freedom and noncentrality `ν̂/ε²`.
pub fn mgf_true_gain_given_est(t: f64, est_gain: f64, eps2: f64) -> f64 {
    assert!(
        (0.0..1.0).contains(&eps2),
        "estimation error variance must lie in [0, 1)"
    );
    assert!(est_gain >= 0.0, "channel power gain cannot be negative");
    assert!(
        eps2 * t < 1.0,
        "conditional MGF diverges for t >= 1/eps2; got t = {t}"
    );
    let denom = 1.0 - eps2 * t;
    (est_gain * t / denom).exp() / denom
}

/// MGF of the true gain on the selected branch, marginalised over selection:
/// `M(t) = M_ν̂( t/(1−ε²t) · (1−ε²) ... )` composed in closed form,
///
/// ```text
/// M_ν(t) = L! / { (1 − ε² t) · ∏_{l=1..L} ( l − (1−ε²)t/(1−ε²t) ) }.
/// ```
///
/// At `ε² = 0` this reduces bit-for-bit to [`mgf_selected_est_gain`].
pub fn mgf_true_gain(t: f64, eps2: f64, l: usize) -> f64 {
    assert!(
        (0.0..1.0).contains(&eps2),
        "estimation error variance must lie in [0, 1)"
    );
    assert!(l >= 1, "at least one diversity branch is required");
    assert!(eps2 * t < 1.0, "MGF diverges for t >= 1/eps2; got t = {t}");
    let inner = (1.0 - eps2) * t / (1.0 - eps2 * t);
    assert!(inner < 1.0, "MGF diverges: effective argument {inner} >= 1");
    let scale = -(1.0 - eps2 * t).ln();
    if inner <= 0.0 {
        (ln_fact_over_prod(l, -inner) + scale).exp()
    } else {
        let prod: f64 = (1..=l).map(|i| i as f64 / (i as f64 - inner)).product();
        prod * scale.exp()
    }
}

// ---------------------------------------------------------------------------
// High-SNR asymptotes
// ---------------------------------------------------------------------------

/// High-SNR behaviour of a BER curve: a diversity-`L` power law under
/// perfect or MMSE CSI, an SNR-independent floor under fixed `ε²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Asymptote {
    /// `BER ≈ coeff / γ₀^L`, stored as `ln coeff` so that extreme L and M
    /// stay representable.
    PowerLaw { ln_coeff: f64, diversity: usize },
    /// `BER → value` as `γ₀ → ∞`.
    Floor { value: f64 },
}

impl Asymptote {
    /// Evaluates the asymptote at a linear SNR `γ₀ > 0`.
    pub fn value(&self, gamma0: f64) -> f64 {
        assert!(gamma0 > 0.0, "SNR must be positive");
        match *self {
            Asymptote::PowerLaw {
                ln_coeff,
                diversity,
            } => (ln_coeff - diversity as f64 * gamma0.ln()).exp(),
            Asymptote::Floor { value } => value,
        }
    }

    /// The power-law coefficient `coeff` (or the floor value).
    pub fn coefficient(&self) -> f64 {
        match *self {
            Asymptote::PowerLaw { ln_coeff, .. } => ln_coeff.exp(),
            Asymptote::Floor { value } => value,
        }
    }

    /// Diversity order: `L` for power laws, 0 for floors.
    pub fn diversity(&self) -> usize {
        match *self {
            Asymptote::PowerLaw { diversity, .. } => diversity,
            Asymptote::Floor { .. } => 0,
        }
    }
}

/// ln Υ where `Υ = K^{L+1} L! / (2 p N^L)` is the common prefactor of every
/// full-diversity asymptote.
fn ln_upsilon(cfg: &SystemConfig, p: &DerivedParams) -> f64 {
    let l = cfg.l as f64;
    let ln_fact: f64 = (1..=cfg.l).map(|i| (i as f64).ln()).sum();
    (l + 1.0) * (cfg.k as f64).ln() + ln_fact
        - (2.0 * p.total_bits as f64).ln()
        - l * (cfg.n as f64).ln()
}

/// `Ω = 1 + 3^{L+1}/4^L`, the two-term bound weight that multiplies the
/// symbol-error part of each asymptote.
fn big_omega(l: usize) -> f64 {
    1.0 + 3.0f64.powi(l as i32 + 1) / 4.0f64.powi(l as i32)
}

/// `ω = Σ_{i=1}^{N−K} (−1)^{i+1} C(N−K,i) (1+i)^{L−1} / i^L` (perfect CSI).
fn omega_sum(n: usize, k: usize, l: usize) -> f64 {
    let mut terms: Vec<f64> = (1..=(n - k))
        .map(|i| {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial((n - k) as u64, i as u64) as f64 * (1.0 + i as f64).powi(l as i32 - 1)
                / (i as f64).powi(l as i32)
        })
        .collect();
    compensated_sum(&mut terms)
}

/// `ψ = Σ_{i=1}^{N−K} (−1)^{i+1} C(N−K,i) (i+1+iN/K)^{L−1} / i^L` (MMSE CSI).
fn psi_sum(n: usize, k: usize, l: usize) -> f64 {
    let ratio = n as f64 / k as f64;
    let mut terms: Vec<f64> = (1..=(n - k))
        .map(|i| {
            let fi = i as f64;
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial((n - k) as u64, i as u64) as f64
                * (fi + 1.0 + fi * ratio).powi(l as i32 - 1)
                / fi.powi(l as i32)
        })
        .collect();
    compensated_sum(&mut terms)
}

/// ln(a + b) given ln a and ln b, without leaving the log domain.
fn ln_add(ln_a: f64, ln_b: f64) -> f64 {
    let (hi, lo) = if ln_a >= ln_b {
        (ln_a, ln_b)
    } else {
        (ln_b, ln_a)
    };
    hi + (lo - hi).exp().ln_1p()
}

/// High-SNR asymptote for one detector under the configuration's CSI model.
///
/// * Perfect CSI:  `ML ≈ Υ·ξΩ/(6ρ^L) / γ₀^L`, the greedy adds `Υ(ηp₁+m)ω`.
/// * MMSE CSI:     same with `Ω → Ω(1+N/K)^L` and `ω → ψ` — an SNR penalty
///   but full diversity retained.
/// * Fixed ε²:     both floors; the ML floor exceeds the greedy floor by the
///   residual index-error term [`ml_floor_excess`].
pub fn asymptote(detector: DetectorKind, cfg: &SystemConfig) -> Asymptote {
    use crate::config::CsiModel;
    let p = cfg.derive();
    match cfg.csi {
        CsiModel::Fixed(eps2) => Asymptote::Floor {
            value: error_floor(detector, cfg, eps2),
        },
        CsiModel::Perfect | CsiModel::MmseVariable => {
            let l = cfg.l;
            let mmse = matches!(cfg.csi, CsiModel::MmseVariable);
            let rho = p.sin2_pi_m;
            let xi = p.sep_weight;
            // ln of the symbol-error bracket ξΩ/(6ρ^L), plus (1+N/K)^L under MMSE.
            let mut ln_sep = (xi * big_omega(l) / 6.0).ln() - l as f64 * rho.ln();
            if mmse {
                ln_sep += l as f64 * (1.0 + cfg.n as f64 / cfg.k as f64).ln();
            }
            let ln_bracket = match detector {
                DetectorKind::Ml => ln_sep,
                DetectorKind::Gd => {
                    if cfg.n == cfg.k {
                        ln_sep
                    } else {
                        let idx = if mmse {
                            psi_sum(cfg.n, cfg.k, l)
                        } else {
                            omega_sum(cfg.n, cfg.k, l)
                        };
                        ln_add(ln_sep, (p.index_error_bit_weight() as f64 * idx).ln())
                    }
                }
            };
            Asymptote::PowerLaw {
                ln_coeff: ln_upsilon(cfg, &p) + ln_bracket,
                diversity: l,
            }
        }
    }
}

/// Error floor of a detector under fixed estimation error `ε² > 0`.
///
/// The common (symbol-error) part is
///
/// ```text
/// (Kξ/12p) { 1/∏[1 + (1−ε²)ρ/(lε²)]  +  3/∏[1 + 4(1−ε²)ρ/(3lε²)] },
/// ```
///
/// and the ML detector adds [`ml_floor_excess`] on top.
pub fn error_floor(detector: DetectorKind, cfg: &SystemConfig, eps2: f64) -> f64 {
    assert!(
        eps2 > 0.0 && eps2 < 1.0,
        "a floor exists only for fixed eps2 in (0, 1)"
    );
    let p = cfg.derive();
    let rho = p.sin2_pi_m;
    let ratio = (1.0 - eps2) / eps2;
    let t1 = (-ln_prod_one_plus(cfg.l, ratio * rho)).exp();
    let t2 = (-ln_prod_one_plus(cfg.l, 4.0 * ratio * rho / 3.0)).exp();
    let sep_floor = cfg.k as f64 * p.sep_weight / (12.0 * p.total_bits as f64) * (t1 + 3.0 * t2);
    match detector {
        DetectorKind::Gd => sep_floor,
        DetectorKind::Ml => sep_floor + ml_floor_excess(cfg, eps2),
    }
}

/// The residual ML index-error floor term
///
/// ```text
/// A₁ = (Ψ̃₁/24p) { 1/∏[1 + (1−ε²)/(2lε²)]²  +  3/∏[1 + 2(1−ε²)/(3lε²)]² },
/// ```
///
/// with `Ψ̃₁ = K(N−K)(ηp₁+m)`.  This is exactly `error_floor(ML) −
/// error_floor(GD)`, and it is why the greedy detector wins outright under
/// fixed estimation error: its index floor decays away while the ML keeps
/// a residual index-confusion term.
pub fn ml_floor_excess(cfg: &SystemConfig, eps2: f64) -> f64 {
    assert!(
        eps2 > 0.0 && eps2 < 1.0,
        "a floor exists only for fixed eps2 in (0, 1)"
    );
    let p = cfg.derive();
    let ratio = (1.0 - eps2) / eps2;
    let t1 = (-2.0 * ln_prod_one_plus(cfg.l, ratio / 2.0)).exp();
    let t2 = (-2.0 * ln_prod_one_plus(cfg.l, 2.0 * ratio / 3.0)).exp();
    p.weighted_pairs() as f64 / (24.0 * p.total_bits as f64) * (t1 + 3.0 * t2)
}

/// Every constant entering the high-SNR story for one configuration.
///
/// `delta1_db`/`delta2_db` are the SNR gains of the ML over the greedy
/// detector (perfect / MMSE CSI); the `*_limit_db` fields are their exact
/// large-L limits, to which they converge as diversity grows.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoteSet {
    pub upsilon: f64,
    pub big_omega: f64,
    pub omega: f64,
    pub psi: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta1_db: f64,
    pub delta2_db: f64,
    pub delta1_limit_db: f64,
    pub delta2_limit_db: f64,
}

/// Computes the full constant set behind [`asymptote`] and the coding gains.
pub fn asymptote_set(cfg: &SystemConfig) -> AsymptoteSet {
    let p = cfg.derive();
    let l = cfg.l;
    let rho = p.sin2_pi_m;
    let xi = p.sep_weight;
    let weight = p.index_error_bit_weight() as f64;
    let omega = omega_sum(cfg.n, cfg.k, l);
    let psi = psi_sum(cfg.n, cfg.k, l);
    let big_om = big_omega(l);
    let nk = cfg.n as f64 / cfg.k as f64;
    let eta1 = 6.0 * weight * omega * rho.powi(l as i32) / (xi * big_om);
    let eta2 = 6.0 * psi * weight * rho.powi(l as i32) / (xi * big_om * (1.0 + nk).powi(l as i32));
    // Large-L geometry of the gap: ω ≈ β₁ λ₁^{...}, ψ ≈ β₂ λ₂^{...} keep only
    // the i = 1 terms, giving the closed-form limits below.
    let lambda1 = 2.0 * rho;
    let lambda2 = rho * (1.0 + cfg.k as f64 / (cfg.n + cfg.k) as f64);
    let beta1 = 3.0 * weight * (cfg.n - cfg.k) as f64 / (xi * big_om);
    let beta2 = 6.0 * weight * (cfg.n - cfg.k) as f64 / (xi * big_om * (2.0 + nk));
    AsymptoteSet {
        upsilon: ln_upsilon(cfg, &p).exp(),
        big_omega: big_om,
        omega,
        psi,
        eta1,
        eta2,
        lambda1,
        lambda2,
        beta1,
        beta2,
        delta1_db: 10.0 / l as f64 * eta1.ln_1p() / std::f64::consts::LN_10,
        delta2_db: 10.0 / l as f64 * eta2.ln_1p() / std::f64::consts::LN_10,
        delta1_limit_db: delta1_limit_db(cfg.m),
        delta2_limit_db: delta2_limit_db(cfg),
    }
}

fn delta1_limit_db(m: usize) -> f64 {
    // λ₁ = 2 sin²(π/M): equals 2 at BPSK (gap → 10 log₁₀ 2), equals 1 at
    // QPSK (gap → 0 through the η^{1/L} root), and < 1 beyond (gap → 0).
    if m == 2 {
        10.0 * 2.0f64.log10()
    } else {
        0.0
    }
}

fn delta2_limit_db(cfg: &SystemConfig) -> f64 {
    if cfg.m == 2 {
        10.0 * (1.0 + cfg.k as f64 / (cfg.n + cfg.k) as f64).log10()
    } else {
        0.0
    }
}

/// SNR gain of the detector comparison, in dB, for one CSI regime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CodingGain {
    /// Exact gain at this configuration's diversity order.
    pub db: f64,
    /// Large-L limit of the gain.
    pub large_l_limit_db: f64,
}

/// SNR advantage of the ML over the greedy detector under perfect CSI:
/// `Δ₁ = (10/L)·log₁₀(1 + η₁)` with `η₁ = 6(ηp₁+m)ωρ^L/(ξΩ)`.
pub fn coding_gain_perfect(cfg: &SystemConfig) -> CodingGain {
    let set = asymptote_set(cfg);
    CodingGain {
        db: set.delta1_db,
        large_l_limit_db: set.delta1_limit_db,
    }
}

/// SNR advantage of the ML over the greedy detector under MMSE CSI:
/// `Δ₂ = (10/L)·log₁₀(1 + η₂)` with `η₂ = 6ψ(ηp₁+m)ρ^L/(ξΩ(1+N/K)^L)`.
pub fn coding_gain_mmse(cfg: &SystemConfig) -> CodingGain {
    let set = asymptote_set(cfg);
    CodingGain {
        db: set.delta2_db,
        large_l_limit_db: set.delta2_limit_db,
    }
}

/// Outcome of the detector trade-off analysis for one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Recommendation {
    /// The detector this configuration should run.
    pub detector: DetectorKind,
    /// Sentence explaining the call.
    pub rationale: String,
    /// ML-over-greedy SNR gain in dB, where a power-law gap exists.
    pub gain_db: Option<f64>,
    /// Large-L limit of that gain.
    pub gain_limit_db: Option<f64>,
    /// Complex-operation counts per cluster for both detectors.
    pub complexity: ComplexityCount,
}

/// Picks a detector for the configuration from the high-SNR analysis.
///
/// * Fixed `ε²`: the greedy detector, unconditionally — it reaches a lower
///   error floor *and* costs less.
/// * Perfect CSI: the ML advantage `Δ₁` shrinks with `M`; from 8-PSK up the
///   gap is negligible against the `M^K` complexity blow-up, so the greedy
///   detector is preferred, otherwise the ML.
/// * MMSE CSI: estimation error already erodes the ML edge (`Δ₂ < Δ₁`), so
///   the crossover moves down to 4-PSK.
pub fn recommend_detector(cfg: &SystemConfig) -> Recommendation {
    use crate::config::CsiModel;
    let complexity = complexity(cfg);
    match cfg.csi {
        CsiModel::Fixed(eps2) => {
            let ml = error_floor(DetectorKind::Ml, cfg, eps2);
            let gd = error_floor(DetectorKind::Gd, cfg, eps2);
            Recommendation {
                detector: DetectorKind::Gd,
                rationale: format!(
                    "under fixed estimation error eps2 = {eps2} the greedy detector \
                     reaches a lower error floor ({gd:.3e} vs {ml:.3e} for the ML) at \
                     {} instead of {} complex operations per cluster",
                    complexity.gd, complexity.ml
                ),
                gain_db: None,
                gain_limit_db: None,
                complexity,
            }
        }
        CsiModel::Perfect => {
            let gain = coding_gain_perfect(cfg);
            let (detector, rationale) = if cfg.m >= 8 {
                (
                    DetectorKind::Gd,
                    format!(
                        "with perfect CSI and {}-PSK the ML advantage is only {:.2} dB, \
                         not worth {} vs {} complex operations per cluster",
                        cfg.m, gain.db, complexity.ml, complexity.gd
                    ),
                )
            } else {
                (
                    DetectorKind::Ml,
                    format!(
                        "with perfect CSI and {}-PSK the ML detector is {:.2} dB better \
                         at the same diversity order (large-L limit {:.2} dB)",
                        cfg.m, gain.db, gain.large_l_limit_db
                    ),
                )
            };
            Recommendation {
                detector,
                rationale,
                gain_db: Some(gain.db),
                gain_limit_db: Some(gain.large_l_limit_db),
                complexity,
            }
        }
        CsiModel::MmseVariable => {
            let gain = coding_gain_mmse(cfg);
            let (detector, rationale) = if cfg.m >= 4 {
                (
                    DetectorKind::Gd,
                    format!(
                        "under MMSE estimation with {}-PSK the residual ML advantage is \
                         {:.2} dB, not worth {} vs {} complex operations per cluster",
                        cfg.m, gain.db, complexity.ml, complexity.gd
                    ),
                )
            } else {
                (
                    DetectorKind::Ml,
                    format!(
                        "under MMSE estimation with BPSK the ML detector keeps a {:.2} dB \
                         edge (large-L limit {:.2} dB)",
                        gain.db, gain.large_l_limit_db
                    ),
                )
            };
            Recommendation {
                detector,
                rationale,
                gain_db: Some(gain.db),
                gain_limit_db: Some(gain.large_l_limit_db),
                complexity,
            }
        }
    }
}
