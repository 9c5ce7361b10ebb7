//! System parameters and every derived scalar the rest of the crate consumes.
//!
//! A cluster groups `N` subcarriers of which `K` are active. Per cluster the
//! transmitter sends `p = p1 + p2` bits with
//!
//! ```text
//! p1 = floor(log2 C(N,K))      index bits (choice of active subcarriers)
//! p2 = K·log2(M)               M-PSK bits on the active subcarriers
//! ```
//!
//! SNR conventions (the source of most off-by-`N/K` bugs, so fixed here once):
//! the x-axis everywhere is `γ0 = Es/N0`, the average SNR *per subcarrier*.
//! Because idle subcarriers donate their power to the active ones, the SNR
//! *per active subcarrier* is `γ̄ = φ·γ0` with `φ = N/K`. All closed forms in
//! [`crate::analytics`] take `γ̄`; [`SystemConfig::snr_to_active`] is the one
//! conversion point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Total subcarriers per OFDM symbol (`N_c`); the default cluster count is
/// `N_c / N`.
pub const TOTAL_SUBCARRIERS: usize = 128;

/// Binomial coefficient `C(n, k)` in `u64` (exact for every configuration this
/// crate accepts; panics on overflow in debug builds like any Rust integer op).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        // Multiply before dividing: (acc * (n-i)) is always divisible by (i+1)
        // because acc holds C(n, i) and C(n, i+1) is an integer.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Channel-state-information quality at the receiver.
///
/// The estimation error `e = h − ĥ` has variance `ε²`; the estimate `ĥ` has
/// variance `1 − ε²` and is independent of `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CsiModel {
    /// `ε² = 0`: the receiver knows the channel exactly.
    Perfect,
    /// SNR-independent error variance (e.g. a fixed-quality estimator);
    /// produces BER floors. Value must lie in `[0, 1)`.
    Fixed(f64),
    /// MMSE estimation from pilots: `ε² = 1/(1 + γ0)` with `γ0` the *linear*
    /// per-subcarrier SNR. Strictly decreasing in `γ0`, bounded in `(0, 1]`.
    MmseVariable,
}

impl CsiModel {
    /// Resolves the error variance `ε²` at linear SNR `γ0 ≥ 0`.
    pub fn epsilon2(&self, gamma0: f64) -> f64 {
        match self {
            CsiModel::Perfect => 0.0,
            CsiModel::Fixed(v) => *v,
            CsiModel::MmseVariable => 1.0 / (1.0 + gamma0),
        }
    }

    fn validate(&self) -> Result<()> {
        if let CsiModel::Fixed(v) = self {
            if !(0.0..1.0).contains(v) {
                return Err(Error::InvalidConfig(format!(
                    "fixed CSI error variance must lie in [0,1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CsiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsiModel::Perfect => write!(f, "perfect"),
            CsiModel::Fixed(v) => write!(f, "fixed:{v}"),
            CsiModel::MmseVariable => write!(f, "mmse"),
        }
    }
}

impl FromStr for CsiModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let model = match s {
            "perfect" => CsiModel::Perfect,
            "mmse" => CsiModel::MmseVariable,
            _ => match s.strip_prefix("fixed:") {
                Some(v) => {
                    let v: f64 = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad fixed-CSI variance {v:?}")))?;
                    CsiModel::Fixed(v)
                }
                None => {
                    return Err(Error::Parse(format!(
                        "unknown CSI model {s:?} (expected perfect | fixed:<v> | mmse)"
                    )))
                }
            },
        };
        model.validate()?;
        Ok(model)
    }
}

impl Serialize for CsiModel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CsiModel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The complete MCIK-OFDM-SC system description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    /// Subcarriers per cluster (`N ≥ 2`).
    pub n: usize,
    /// Active subcarriers per cluster (`1 ≤ K ≤ N`).
    pub k: usize,
    /// PSK order (`M ∈ {2,4,8,...}`).
    pub m: usize,
    /// Receive antennas / SC branches (`L ≥ 1`).
    pub l: usize,
    /// Clusters per OFDM symbol; defaults to `N_c/N = 128/N`.
    pub g: usize,
    /// Channel-knowledge model.
    pub csi: CsiModel,
}

impl SystemConfig {
    /// Builds a configuration with the default cluster count `128/N`
    /// (at least 1), validating all invariants.
    pub fn new(n: usize, k: usize, m: usize, l: usize, csi: CsiModel) -> Result<Self> {
        let g = (TOTAL_SUBCARRIERS / n).max(1);
        Self { n, k, m, l, g, csi }.validated()
    }

    /// Same, with an explicit cluster count.
    pub fn with_clusters(
        n: usize,
        k: usize,
        m: usize,
        l: usize,
        g: usize,
        csi: CsiModel,
    ) -> Result<Self> {
        Self { n, k, m, l, g, csi }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "need N >= 2 subcarriers, got {}",
                self.n
            )));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= K <= N, got K={} with N={}",
                self.k, self.n
            )));
        }
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "PSK order must be a power of two >= 2, got {}",
                self.m
            )));
        }
        if self.l == 0 {
            return Err(Error::InvalidConfig(
                "need at least one receive antenna".into(),
            ));
        }
        if self.g == 0 {
            return Err(Error::InvalidConfig(
                "need at least one cluster per symbol".into(),
            ));
        }
        self.csi.validate()?;
        Ok(self)
    }

    /// All derived scalars. Pure: equal configs give equal outputs.
    pub fn derive(&self) -> DerivedParams {
        let p1 = (binomial(self.n as u64, self.k as u64) as f64)
            .log2()
            .floor() as u32;
        let m_bits = self.m.trailing_zeros(); // log2(M), M validated power of two
        let p2 = self.k as u32 * m_bits;
        DerivedParams {
            index_bits: p1,
            symbol_bits: p2,
            total_bits: p1 + p2,
            bits_per_symbol: m_bits,
            psk_order: self.m,
            power_ratio: self.n as f64 / self.k as f64,
            sin2_pi_m: {
                let s = (std::f64::consts::PI / self.m as f64).sin();
                s * s
            },
            sep_weight: if self.m == 2 { 1.0 } else { 2.0 },
            index_weight: if self.n == 2 { 2 } else { 1 },
            active_inactive_pairs: (self.k * (self.n - self.k)) as u32,
        }
    }

    /// Converts the x-axis SNR `γ0` (dB, per subcarrier) to the *linear* SNR
    /// per active subcarrier, `γ̄ = (N/K)·10^(γ0/10)`.
    pub fn snr_to_active(&self, gamma0_db: f64) -> f64 {
        (self.n as f64 / self.k as f64) * db_to_linear(gamma0_db)
    }

    /// `ε²` at the given dB SNR under this config's CSI model.
    pub fn epsilon2_at(&self, gamma0_db: f64) -> f64 {
        self.csi.epsilon2(db_to_linear(gamma0_db))
    }
}

impl FromStr for SystemConfig {
    /// Parses either a JSON document or a `key=value` list with fields
    /// `n, k, m, l, g, csi`; `n`, `k`, `m` are required, `l` defaults to 1,
    /// `g` to `128/N`, `csi` to `perfect`.
    ///
    /// ```
    /// use mcik_ofdm_sc::config::{CsiModel, SystemConfig};
    /// let a: SystemConfig = "n=4 k=2 m=4 l=3 csi=fixed:0.2".parse().unwrap();
    /// let b: SystemConfig = r#"{"n":4,"k":2,"m":4,"l":3,"csi":"fixed:0.2"}"#.parse().unwrap();
    /// assert_eq!(a, b);
    /// assert_eq!(a.csi, CsiModel::Fixed(0.2));
    /// ```
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw: RawConfig = if s.trim_start().starts_with('{') {
            serde_json::from_str(s)?
        } else {
            RawConfig::from_pairs(s)?
        };
        raw.build()
    }
}

/// Loosely-typed parse target; converted through the validating constructors.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    k: usize,
    m: usize,
    l: Option<usize>,
    g: Option<usize>,
    csi: Option<CsiModel>,
}

impl RawConfig {
    fn from_pairs(s: &str) -> Result<Self> {
        let (mut n, mut k, mut m) = (None, None, None);
        let mut raw = RawConfig {
            n: 0,
            k: 0,
            m: 0,
            l: None,
            g: None,
            csi: None,
        };
        for token in s
            .split([' ', '\t', '\n', ',', ';'])
            .filter(|t| !t.is_empty())
        {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {token:?}")))?;
            let uint = |v: &str| -> Result<usize> {
                v.parse()
                    .map_err(|_| Error::Parse(format!("bad integer for {key}: {v:?}")))
            };
            match key {
                "n" => n = Some(uint(value)?),
                "k" => k = Some(uint(value)?),
                "m" => m = Some(uint(value)?),
                "l" => raw.l = Some(uint(value)?),
                "g" => raw.g = Some(uint(value)?),
                "csi" => raw.csi = Some(value.parse()?),
                _ => return Err(Error::Parse(format!("unknown config field {key:?}"))),
            }
        }
        raw.n = n.ok_or_else(|| Error::Parse("missing field n".into()))?;
        raw.k = k.ok_or_else(|| Error::Parse("missing field k".into()))?;
        raw.m = m.ok_or_else(|| Error::Parse("missing field m".into()))?;
        Ok(raw)
    }

    fn build(self) -> Result<SystemConfig> {
        let csi = self.csi.unwrap_or(CsiModel::Perfect);
        let l = self.l.unwrap_or(1);
        match self.g {
            Some(g) => SystemConfig::with_clusters(self.n, self.k, self.m, l, g, csi),
            None => SystemConfig::new(self.n, self.k, self.m, l, csi),
        }
    }
}

/// Scalars derived from a [`SystemConfig`], in the crate's naming:
/// `p1/p2/p` → `index_bits/symbol_bits/total_bits`, `m` → `bits_per_symbol`,
/// `φ` → `power_ratio`, `ρ` → `sin2_pi_m`, `ξ` → `sep_weight`,
/// `η` → `index_weight`, `Ψ1` → `active_inactive_pairs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Index bits per cluster, `p1 = floor(log2 C(N,K))`.
    pub index_bits: u32,
    /// PSK bits per cluster, `p2 = K·log2(M)`.
    pub symbol_bits: u32,
    /// Total bits per cluster, `p = p1 + p2`.
    pub total_bits: u32,
    /// Bits per PSK symbol, `log2(M)`.
    pub bits_per_symbol: u32,
    /// The PSK order `M` itself (duplicated here so detectors and codec never
    /// need the full config).
    pub psk_order: usize,
    /// Power reallocation ratio `φ = N/K`.
    pub power_ratio: f64,
    /// `ρ = sin²(π/M)`, the PSK minimum-angle term in the SEP bound.
    pub sin2_pi_m: f64,
    /// `ξ`: 1 for BPSK, 2 for higher-order PSK (two nearest neighbours).
    pub sep_weight: f64,
    /// `η`: 2 when `N = 2` (an index error there flips the single index bit
    /// with certainty), 1 otherwise.
    pub index_weight: u32,
    /// `Ψ1 = K(N−K)`, the number of (active, inactive) subcarrier pairings
    /// driving ML index errors.
    pub active_inactive_pairs: u32,
}

impl DerivedParams {
    /// The index-error bit weight `η·p1 + m` appearing in the BER composition.
    pub fn index_error_bit_weight(&self) -> u32 {
        self.index_weight * self.index_bits + self.bits_per_symbol
    }

    /// `Ψ̃1 = Ψ1·(η·p1 + m)`, the weighted pairing count of the ML BER bound.
    pub fn weighted_pairs(&self) -> u32 {
        self.active_inactive_pairs * self.index_error_bit_weight()
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10·log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Unit-magnitude complex exponential `e^{jθ}` (used by the PSK constellation
/// and handy for tests).
pub fn unit_phasor(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(3, 7), 0);
    }

    #[test]
    fn derive_4_1_4() {
        let cfg = SystemConfig::new(4, 1, 4, 1, CsiModel::Perfect).unwrap();
        let d = cfg.derive();
        assert_eq!(d.index_bits, 2);
        assert_eq!(d.symbol_bits, 2);
        assert_eq!(d.total_bits, 4);
        assert_eq!(d.power_ratio, 4.0);
        assert_relative_eq!(d.sin2_pi_m, 0.5, epsilon = 1e-15);
        assert_eq!(d.sep_weight, 2.0);
        assert_eq!(d.index_weight, 1);
        assert_eq!(cfg.g, 32);
    }

    #[test]
    fn derive_2_1_2() {
        let d = SystemConfig::new(2, 1, 2, 1, CsiModel::Perfect)
            .unwrap()
            .derive();
        assert_eq!(d.index_bits, 1);
        assert_eq!(d.symbol_bits, 1);
        assert_eq!(d.index_weight, 2);
        assert_eq!(d.sep_weight, 1.0);
        assert_relative_eq!(d.sin2_pi_m, 1.0, epsilon = 1e-15);
        assert_eq!(d.active_inactive_pairs, 1);
    }

    #[test]
    fn derive_4_2_8() {
        // C(4,2) = 6 so p1 = floor(log2 6) = 2; with m = 3: Ψ̃1 = 4·(2+3) = 20.
        let d = SystemConfig::new(4, 2, 8, 1, CsiModel::Perfect)
            .unwrap()
            .derive();
        assert_eq!(d.index_bits, 2);
        assert_eq!(d.symbol_bits, 6);
        assert_eq!(d.weighted_pairs(), 20);
    }

    #[test]
    fn k_equals_n_has_no_index_bits() {
        let d = SystemConfig::new(4, 4, 4, 1, CsiModel::Perfect)
            .unwrap()
            .derive();
        assert_eq!(d.index_bits, 0);
        assert_eq!(d.active_inactive_pairs, 0);
        assert_eq!(d.total_bits, 8);
    }

    #[test]
    fn snr_to_active_scales_by_power_ratio() {
        let cfg = SystemConfig::new(4, 1, 4, 1, CsiModel::Perfect).unwrap();
        assert_relative_eq!(cfg.snr_to_active(10.0), 40.0, epsilon = 1e-12);
        let cfg = SystemConfig::new(2, 1, 2, 1, CsiModel::Perfect).unwrap();
        assert_relative_eq!(cfg.snr_to_active(0.0), 2.0, epsilon = 1e-12);
        let cfg = SystemConfig::new(4, 4, 4, 1, CsiModel::Perfect).unwrap();
        assert_relative_eq!(cfg.snr_to_active(10.0), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn epsilon_resolution() {
        assert_eq!(CsiModel::Perfect.epsilon2(123.0), 0.0);
        assert_eq!(CsiModel::Fixed(0.2).epsilon2(100.0), 0.2);
        assert_relative_eq!(CsiModel::MmseVariable.epsilon2(9.0), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn mmse_epsilon_strictly_decreasing_and_bounded() {
        let mut last = CsiModel::MmseVariable.epsilon2(0.0);
        assert!(last <= 1.0);
        for i in 1..200 {
            let g = i as f64 * 0.5;
            let e = CsiModel::MmseVariable.epsilon2(g);
            assert!(e < last, "not decreasing at γ0 = {g}");
            assert!(e > 0.0);
            last = e;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SystemConfig::new(4, 5, 4, 1, CsiModel::Perfect).is_err());
        assert!(SystemConfig::new(4, 0, 4, 1, CsiModel::Perfect).is_err());
        assert!(SystemConfig::new(4, 1, 3, 1, CsiModel::Perfect).is_err());
        assert!(SystemConfig::new(4, 1, 4, 0, CsiModel::Perfect).is_err());
        assert!(SystemConfig::new(1, 1, 2, 1, CsiModel::Perfect).is_err());
        assert!(SystemConfig::new(4, 1, 4, 1, CsiModel::Fixed(1.0)).is_err());
        assert!(SystemConfig::new(4, 1, 4, 1, CsiModel::Fixed(-0.1)).is_err());
        assert!(SystemConfig::new(4, 1, 4, 1, CsiModel::Fixed(0.999)).is_ok());
    }

    #[test]
    fn parse_key_value_and_json_agree() {
        let kv: SystemConfig = "n=4 k=1 m=4 l=2 csi=mmse".parse().unwrap();
        let js: SystemConfig = r#"{"n":4,"k":1,"m":4,"l":2,"csi":"mmse"}"#.parse().unwrap();
        assert_eq!(kv, js);
        assert_eq!(kv.g, 32);
        assert_eq!(kv.csi, CsiModel::MmseVariable);
    }

    #[test]
    fn parse_defaults_and_overrides() {
        let cfg: SystemConfig = "n=2 k=1 m=2".parse().unwrap();
        assert_eq!((cfg.l, cfg.g), (1, 64));
        assert_eq!(cfg.csi, CsiModel::Perfect);
        let cfg: SystemConfig = "n=2,k=1,m=2,g=10,csi=fixed:0.05".parse().unwrap();
        assert_eq!(cfg.g, 10);
        assert_eq!(cfg.csi, CsiModel::Fixed(0.05));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("n=4 k=1".parse::<SystemConfig>().is_err()); // missing m
        assert!("n=4 k=1 m=4 q=7".parse::<SystemConfig>().is_err()); // unknown key
        assert!("n=4 k=1 m=4 csi=sloppy".parse::<SystemConfig>().is_err());
        assert!("n=4 k=1 m=4 csi=fixed:1.25"
            .parse::<SystemConfig>()
            .is_err());
        assert!(r#"{"n":4,"k":1,"m":4,"csi":"fixed:1.25"}"#.parse::<SystemConfig>().is_err());
    }

    #[test]
    fn csi_display_roundtrip() {
        for csi in [
            CsiModel::Perfect,
            CsiModel::Fixed(0.2),
            CsiModel::MmseVariable,
        ] {
            let back: CsiModel = csi.to_string().parse().unwrap();
            assert_eq!(back, csi);
        }
    }
}
