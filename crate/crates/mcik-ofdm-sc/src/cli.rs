//! Command-line front end: plot-ready tables and reports over the library.
//!
//! Four subcommands map onto the crate's capabilities:
//!
//! * `theory`    — tabulate the closed-form curves over an SNR grid;
//! * `simulate`  — Monte-Carlo BER sweep with theory overlay columns;
//! * `recommend` — detector recommendation for a configuration;
//! * `validate`  — fast internal consistency checks, nonzero exit on failure.
//!
//! Every data file opens with a `# manifest: {...}` comment carrying the
//! exact configuration, seed, grid, and stop rule that produced it, so any
//! output can be reproduced from its own first line.  Manifests contain
//! **no timestamps or host information**: two identical invocations emit
//! byte-identical files, which is load-bearing for the reproducibility
//! checks in the test suite.
//!
//! CSV is the primary format (BER-vs-SNR curves feed any plotting tool);
//! `--format json` mirrors the same rows plus the manifest as one object.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    self, asymptote, ber_gd, ber_ml, error_floor, mgf_selected_est_gain, mgf_true_gain,
    ml_floor_excess, recommend_detector, theory_point,
};
use crate::config::{db_to_linear, CsiModel, SystemConfig};
use crate::detectors::DetectorKind;
use crate::engine::{empirical_mgf, run_point, sweep, DetectorChoice, StopRule};
use crate::{Error, Result};

/// Link-level simulator and closed-form BER toolkit for MCIK-OFDM with
/// selection combining.
#[derive(Debug, Parser)]
#[command(name = "mcik", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate closed-form SEP/IEP/BER curves and their asymptotes.
    Theory(TheoryArgs),
    /// Monte-Carlo BER sweep with closed-form overlay columns.
    Simulate(SimulateArgs),
    /// Recommend a detector for a configuration.
    Recommend(RecommendArgs),
    /// Run fast internal consistency checks (nonzero exit on failure).
    Validate(ValidateArgs),
}

/// System configuration flags shared by all data-producing subcommands.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Subcarriers per cluster (N >= 2).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Active subcarriers per cluster (1 <= K <= N).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// PSK order (power of two >= 2).
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Selection-combining branches (receive antennas).
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// CSI model: perfect | fixed:<variance> | mmse.
    #[arg(long, default_value = "perfect")]
    pub csi: String,
}

impl ConfigArgs {
    pub fn to_config(&self) -> Result<SystemConfig> {
        SystemConfig::new(self.n, self.k, self.m, self.l, self.csi.parse()?)
    }
}

/// SNR sweep axis: per-subcarrier SNR γ₀ in dB, inclusive endpoints.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// First γ₀ grid point in dB.
    #[arg(long = "snr-start", default_value_t = 0.0)]
    pub snr_start: f64,
    /// Last γ₀ grid point in dB (included when the step lands on it).
    #[arg(long = "snr-stop", default_value_t = 40.0)]
    pub snr_stop: f64,
    /// Grid step in dB.
    #[arg(long = "snr-step", default_value_t = 5.0)]
    pub snr_step: f64,
}

impl GridArgs {
    pub fn to_grid(&self) -> Result<SnrGrid> {
        SnrGrid::new(self.snr_start, self.snr_stop, self.snr_step)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output path (stdout when omitted); parent directories are created.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Detector(s) to simulate: ml | gd | both.
    #[arg(long, default_value = "both")]
    pub detector: String,
    /// Master RNG seed; every frame stream is derived from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-detector bit-error target before a point stops.
    #[arg(long = "min-errors", default_value_t = 200)]
    pub min_errors: u64,
    /// Hard frame cap per SNR point.
    #[arg(long = "max-frames", default_value_t = 10_000_000)]
    pub max_frames: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output path (stdout when omitted); parent directories are created.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Seed for the statistical checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path for the report (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An inclusive dB grid `start, start+step, ..` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl SnrGrid {
    pub fn new(start_db: f64, stop_db: f64, step_db: f64) -> Result<Self> {
        if !(start_db.is_finite() && stop_db.is_finite() && step_db.is_finite()) {
            return Err(Error::InvalidRange("SNR grid values must be finite".into()));
        }
        if step_db <= 0.0 {
            return Err(Error::InvalidRange(format!(
                "SNR step must be positive, got {step_db}"
            )));
        }
        if stop_db < start_db {
            return Err(Error::InvalidRange(format!(
                "SNR range is empty: start {start_db} dB > stop {stop_db} dB"
            )));
        }
        let grid = SnrGrid {
            start_db,
            stop_db,
            step_db,
        };
        if grid.len() > 10_000 {
            return Err(Error::InvalidRange(format!(
                "SNR grid has {} points; refusing more than 10000",
                grid.len()
            )));
        }
        Ok(grid)
    }

    /// Number of grid points (endpoint included when the step lands on it;
    /// the tiny slack absorbs decimal-step rounding like 0.1).
    pub fn len(&self) -> usize {
        ((self.stop_db - self.start_db) / self.step_db + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a valid grid always contains at least `start_db`
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start_db + i as f64 * self.step_db)
            .collect()
    }
}

/// Reproduction recipe embedded in every data file.
///
/// Contains everything needed to regenerate the file — and deliberately
/// nothing else: no timestamps, no hostnames, so that reruns are
/// byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: SystemConfig,
    pub derived: crate::config::DerivedParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<SnrGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<StopRule>,
}

impl RunManifest {
    fn new(command: &'static str, cfg: &SystemConfig) -> Self {
        RunManifest {
            tool: "mcik",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: *cfg,
            derived: cfg.derive(),
            grid: None,
            detector: None,
            seed: None,
            stop: None,
        }
    }
}

#[derive(Serialize)]
struct TheoryRow {
    gamma0_db: f64,
    eps2: f64,
    pm: f64,
    iep_ml: f64,
    iep_gd: f64,
    ber_ml: f64,
    ber_gd: f64,
    asym_ml: f64,
    asym_gd: f64,
}

#[derive(Serialize)]
struct SimRow {
    gamma0_db: f64,
    detector: DetectorKind,
    ber: f64,
    index_ber: f64,
    symbol_ber: f64,
    ci95: f64,
    frames: u64,
    bit_errors: u64,
    theory_ber: f64,
    theory_asym: f64,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    manifest: &'a RunManifest,
    rows: &'a [T],
}

/// Probability columns: fixed scientific notation, 10 significant decimals
/// — stable across platforms and precise enough to round-trip a BER.
fn fmt_p(v: f64) -> String {
    format!("{v:.10e}")
}

fn write_manifest_line(w: &mut dyn Write, manifest: &RunManifest) -> Result<()> {
    writeln!(w, "# manifest: {}", serde_json::to_string(manifest)?)?;
    Ok(())
}

/// Tabulates the closed forms over the grid.
///
/// Columns: `gamma0_db, eps2, pm, iep_ml, iep_gd, ber_ml, ber_gd, asym_ml,
/// asym_gd`.  Under fixed ε² the asymptote columns are the (constant)
/// error floors.
pub fn cmd_theory(
    cfg: &SystemConfig,
    grid: &SnrGrid,
    format: OutputFormat,
    w: &mut dyn Write,
) -> Result<()> {
    let mut manifest = RunManifest::new("theory", cfg);
    manifest.grid = Some(*grid);
    let asym_ml = asymptote(DetectorKind::Ml, cfg);
    let asym_gd = asymptote(DetectorKind::Gd, cfg);
    let rows: Vec<TheoryRow> = grid
        .points()
        .into_iter()
        .map(|db| {
            let pt = theory_point(cfg, db);
            TheoryRow {
                gamma0_db: db,
                eps2: pt.eps2,
                pm: pt.sep,
                iep_ml: pt.iep_ml,
                iep_gd: pt.iep_gd,
                ber_ml: pt.ber_ml,
                ber_gd: pt.ber_gd,
                asym_ml: asym_ml.value(pt.gamma0),
                asym_gd: asym_gd.value(pt.gamma0),
            }
        })
        .collect();
    match format {
        OutputFormat::Csv => {
            write_manifest_line(w, &manifest)?;
            writeln!(
                w,
                "gamma0_db,eps2,pm,iep_ml,iep_gd,ber_ml,ber_gd,asym_ml,asym_gd"
            )?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.gamma0_db,
                    fmt_p(r.eps2),
                    fmt_p(r.pm),
                    fmt_p(r.iep_ml),
                    fmt_p(r.iep_gd),
                    fmt_p(r.ber_ml),
                    fmt_p(r.ber_gd),
                    fmt_p(r.asym_ml),
                    fmt_p(r.asym_gd),
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(
                &mut *w,
                &Report {
                    manifest: &manifest,
                    rows: &rows,
                },
            )?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Runs the Monte-Carlo sweep and writes one row per (SNR point, detector),
/// with the matching closed-form BER and asymptote as overlay columns.
pub fn cmd_simulate(
    cfg: &SystemConfig,
    grid: &SnrGrid,
    choice: DetectorChoice,
    seed: u64,
    stop: &StopRule,
    format: OutputFormat,
    w: &mut dyn Write,
) -> Result<()> {
    let mut manifest = RunManifest::new("simulate", cfg);
    manifest.grid = Some(*grid);
    manifest.detector = Some(choice.to_string());
    manifest.seed = Some(seed);
    manifest.stop = Some(*stop);

    let asym_ml = asymptote(DetectorKind::Ml, cfg);
    let asym_gd = asymptote(DetectorKind::Gd, cfg);
    let points = sweep(cfg, &grid.points(), choice, seed, stop);
    let mut rows = Vec::new();
    for pt in &points {
        let g = db_to_linear(pt.gamma0_db);
        if let Some(est) = pt.ml {
            rows.push(sim_row(&est, pt.theory.ber_ml, asym_ml.value(g)));
        }
        if let Some(est) = pt.gd {
            rows.push(sim_row(&est, pt.theory.ber_gd, asym_gd.value(g)));
        }
    }
    match format {
        OutputFormat::Csv => {
            write_manifest_line(w, &manifest)?;
            writeln!(
                w,
                "gamma0_db,detector,ber,index_ber,symbol_ber,ci95,frames,bit_errors,theory_ber,theory_asym"
            )?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.gamma0_db,
                    r.detector,
                    fmt_p(r.ber),
                    fmt_p(r.index_ber),
                    fmt_p(r.symbol_ber),
                    fmt_p(r.ci95),
                    r.frames,
                    r.bit_errors,
                    fmt_p(r.theory_ber),
                    fmt_p(r.theory_asym),
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(
                &mut *w,
                &Report {
                    manifest: &manifest,
                    rows: &rows,
                },
            )?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn sim_row(est: &crate::engine::BerEstimate, theory_ber: f64, theory_asym: f64) -> SimRow {
    SimRow {
        gamma0_db: est.gamma0_db,
        detector: est.detector,
        ber: est.ber,
        index_ber: est.index_ber,
        symbol_ber: est.symbol_ber,
        ci95: est.ci95,
        frames: est.frames,
        bit_errors: est.bit_errors,
        theory_ber,
        theory_asym,
    }
}

/// Prints the detector recommendation as text or JSON.
pub fn cmd_recommend(cfg: &SystemConfig, format: ReportFormat, w: &mut dyn Write) -> Result<()> {
    let rec = recommend_detector(cfg);
    match format {
        ReportFormat::Text => {
            let d = cfg.derive();
            writeln!(
                w,
                "configuration: N={} K={} M={} L={} csi={} ({} bits/cluster: {} index + {} modulation)",
                cfg.n, cfg.k, cfg.m, cfg.l, cfg.csi, d.total_bits, d.index_bits, d.symbol_bits
            )?;
            writeln!(w, "recommended detector: {}", rec.detector)?;
            writeln!(w, "rationale: {}", rec.rationale)?;
            if let (Some(gain), Some(limit)) = (rec.gain_db, rec.gain_limit_db) {
                writeln!(
                    w,
                    "ml-over-gd gain: {gain:.3} dB (large-L limit {limit:.3} dB)"
                )?;
            }
            writeln!(
                w,
                "complexity: ml {} ops/cluster, gd {} ops/cluster",
                rec.complexity.ml, rec.complexity.gd
            )?;
        }
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct RecReport<'a> {
                manifest: &'a RunManifest,
                recommendation: &'a analytics::Recommendation,
            }
            let manifest = RunManifest::new("recommend", cfg);
            serde_json::to_writer_pretty(
                &mut *w,
                &RecReport {
                    manifest: &manifest,
                    recommendation: &rec,
                },
            )?;
            writeln!(w)?;
        }
    }
    Ok(())
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Fast internal consistency checks: closed forms against their own
/// structure and against short simulations.  One line per check; returns
/// [`Error::ValidationFailed`] (nonzero process exit) if any fails.
pub fn cmd_validate(seed: u64, w: &mut dyn Write) -> Result<()> {
    let checks = vec![
        check_mgf_against_simulation(seed),
        check_gd_iep_single_branch_invariance(),
        check_detectors_coincide_when_all_active(seed),
        check_theory_against_quick_simulation(seed),
        check_mgf_reduction_at_zero_error(),
        check_ber_composition_exactness(),
        check_floor_difference_is_ml_excess(),
    ];
    let total = checks.len();
    let mut failed = 0usize;
    for c in &checks {
        if c.pass {
            writeln!(w, "[validate] {:<38} ok   ({})", c.name, c.detail)?;
        } else {
            failed += 1;
            writeln!(w, "[validate] {:<38} FAIL ({})", c.name, c.detail)?;
        }
    }
    writeln!(w, "[validate] {}/{} checks passed", total - failed, total)?;
    if failed > 0 {
        return Err(Error::ValidationFailed { failed, total });
    }
    Ok(())
}

/// 100k-draw empirical MGFs of ν̂ and ν against the closed forms, 2% rel.
fn check_mgf_against_simulation(seed: u64) -> Check {
    let ts = [-2.0, -1.0, -0.5];
    let mut worst = 0.0f64;
    for &(eps2, l) in &[(0.0, 1usize), (0.0, 4), (0.2, 1), (0.2, 4)] {
        let est = empirical_mgf(eps2, l, &ts, 100_000, seed);
        for (i, &t) in ts.iter().enumerate() {
            let re = (est.est_gain[i] / mgf_selected_est_gain(t, eps2, l) - 1.0).abs();
            let rt = (est.true_gain[i] / mgf_true_gain(t, eps2, l) - 1.0).abs();
            worst = worst.max(re).max(rt);
        }
    }
    Check {
        name: "mgf-vs-simulation",
        pass: worst < 0.02,
        detail: format!("max rel err {worst:.2e}, tolerance 2.0e-2"),
    }
}

/// With one branch the greedy IEP must not depend on ε² at all.
fn check_gd_iep_single_branch_invariance() -> Check {
    let mut worst = 0.0f64;
    for &(n, k) in &[(2usize, 1usize), (4, 2), (8, 3)] {
        for &gb in &[1.0, 10.0, 100.0] {
            let reference = analytics::avg_iep_gd(gb, 0.0, 1, n, k);
            for &e2 in &[0.1, 0.3, 0.5, 0.9] {
                let v = analytics::avg_iep_gd(gb, e2, 1, n, k);
                worst = worst.max((v / reference - 1.0).abs());
            }
        }
    }
    Check {
        name: "gd-iep-L1-eps2-invariance",
        pass: worst < 1e-12,
        detail: format!("max rel deviation {worst:.2e}, tolerance 1.0e-12"),
    }
}

/// With K = N there are no index decisions: ML and GD must agree bit for
/// bit on every frame.
fn check_detectors_coincide_when_all_active(seed: u64) -> Check {
    let cfg = SystemConfig::new(4, 4, 4, 2, CsiModel::Perfect).expect("valid");
    let stop = StopRule {
        min_bit_errors: u64::MAX,
        max_frames: 4096,
    };
    let pt = run_point(&cfg, 5.0, DetectorChoice::Both, seed, &stop);
    let (ml, gd) = (pt.ml.unwrap(), pt.gd.unwrap());
    let pass = ml.bit_errors == gd.bit_errors
        && ml.index_bit_errors == gd.index_bit_errors
        && ml.symbol_bit_errors == gd.symbol_bit_errors;
    Check {
        name: "K-equals-N-detector-equivalence",
        pass,
        detail: format!(
            "ml {} vs gd {} bit errors over {} frames",
            ml.bit_errors, gd.bit_errors, ml.frames
        ),
    }
}

/// A short paired simulation must land within a factor two of the bounds.
fn check_theory_against_quick_simulation(seed: u64) -> Check {
    let cfg = SystemConfig::new(2, 1, 2, 2, CsiModel::Perfect).expect("valid");
    let stop = StopRule {
        min_bit_errors: 300,
        max_frames: 2_000_000,
    };
    let pt = run_point(&cfg, 5.0, DetectorChoice::Both, seed, &stop);
    let rm = pt.ml.unwrap().ber / ber_ml(&cfg, 5.0);
    let rg = pt.gd.unwrap().ber / ber_gd(&cfg, 5.0);
    let pass = (0.5..2.0).contains(&rm) && (0.5..2.0).contains(&rg);
    Check {
        name: "theory-vs-simulation",
        pass,
        detail: format!("sim/theory ratios ml {rm:.3}, gd {rg:.3}, window [0.5, 2.0)"),
    }
}

/// At ε² = 0 the true-gain MGF must collapse onto the estimated-gain MGF
/// exactly (bitwise), since ν ≡ ν̂.
fn check_mgf_reduction_at_zero_error() -> Check {
    let mut pass = true;
    for l in 1..=8 {
        for &t in &[-4.0, -1.0, -0.1, 0.0] {
            if mgf_true_gain(t, 0.0, l).to_bits() != mgf_selected_est_gain(t, 0.0, l).to_bits() {
                pass = false;
            }
        }
    }
    Check {
        name: "mgf-eps2-zero-reduction",
        pass,
        detail: "bitwise over t in [-4, 0], L in 1..=8".into(),
    }
}

/// `ber_*` must be the exact weighted composition of its own ingredients.
fn check_ber_composition_exactness() -> Check {
    let mut pass = true;
    for csi in [
        CsiModel::Perfect,
        CsiModel::Fixed(0.1),
        CsiModel::MmseVariable,
    ] {
        let cfg = SystemConfig::new(4, 2, 4, 3, csi).expect("valid");
        let p = cfg.derive();
        for db in [0.0, 10.0, 25.0] {
            let gb = cfg.snr_to_active(db);
            let e2 = cfg.epsilon2_at(db);
            let sep = analytics::avg_sep_psk(gb, e2, cfg.l, cfg.m);
            let ml =
                analytics::compose_ber(analytics::avg_iep_ml(gb, e2, cfg.l, cfg.n, cfg.k), sep, &p);
            let gd =
                analytics::compose_ber(analytics::avg_iep_gd(gb, e2, cfg.l, cfg.n, cfg.k), sep, &p);
            if ml.to_bits() != ber_ml(&cfg, db).to_bits()
                || gd.to_bits() != ber_gd(&cfg, db).to_bits()
            {
                pass = false;
            }
        }
    }
    Check {
        name: "ber-composition-exactness",
        pass,
        detail: "bitwise across 3 CSI models x 3 SNRs".into(),
    }
}

/// The two fixed-ε² floors must differ by exactly the ML excess term.
fn check_floor_difference_is_ml_excess() -> Check {
    let cfg = SystemConfig::new(4, 2, 2, 4, CsiModel::Fixed(0.2)).expect("valid");
    let diff = error_floor(DetectorKind::Ml, &cfg, 0.2) - error_floor(DetectorKind::Gd, &cfg, 0.2);
    let a1 = ml_floor_excess(&cfg, 0.2);
    let rel = (diff / a1 - 1.0).abs();
    Check {
        name: "floor-difference-is-ml-excess",
        pass: rel < 1e-12,
        detail: format!("rel deviation {rel:.2e}, tolerance 1.0e-12"),
    }
}

/// Opens the output target, creating parent directories for file paths.
fn with_output(path: &Option<PathBuf>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            let mut file = io::BufWriter::new(fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Theory(a) => {
            let cfg = a.config.to_config()?;
            let grid = a.grid.to_grid()?;
            with_output(&a.out, |w| cmd_theory(&cfg, &grid, a.format, w))
        }
        Command::Simulate(a) => {
            let cfg = a.config.to_config()?;
            let grid = a.grid.to_grid()?;
            let choice: DetectorChoice = a.detector.parse()?;
            if a.min_errors == 0 || a.max_frames == 0 {
                return Err(Error::InvalidRange(
                    "--min-errors and --max-frames must be positive".into(),
                ));
            }
            let stop = StopRule {
                min_bit_errors: a.min_errors,
                max_frames: a.max_frames,
            };
            with_output(&a.out, |w| {
                cmd_simulate(&cfg, &grid, choice, a.seed, &stop, a.format, w)
            })
        }
        Command::Recommend(a) => {
            let cfg = a.config.to_config()?;
            with_output(&a.out, |w| cmd_recommend(&cfg, a.format, w))
        }
        Command::Validate(a) => with_output(&a.out, |w| cmd_validate(a.seed, w)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, m: usize, l: usize, csi: CsiModel) -> SystemConfig {
        SystemConfig::new(n, k, m, l, csi).unwrap()
    }

    fn lines(buf: &[u8]) -> Vec<String> {
        String::from_utf8(buf.to_vec())
            .unwrap()
            .lines()
            .map(str::to_owned)
            .collect()
    }

    #[test]
    fn grid_is_inclusive_and_counts_correctly() {
        let g = SnrGrid::new(0.0, 40.0, 5.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.points().first().copied(), Some(0.0));
        assert_eq!(g.points().last().copied(), Some(40.0));

        // A step that does not land on the stop simply stops short of it.
        let g = SnrGrid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.points().last().unwrap() < &1.0);

        // Decimal steps must not lose the endpoint to float rounding.
        let g = SnrGrid::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
    }

    #[test]
    fn grid_rejects_bad_ranges() {
        assert!(SnrGrid::new(0.0, 10.0, 0.0).is_err());
        assert!(SnrGrid::new(0.0, 10.0, -1.0).is_err());
        assert!(SnrGrid::new(10.0, 0.0, 1.0).is_err());
        assert!(SnrGrid::new(0.0, f64::INFINITY, 1.0).is_err());
        assert!(SnrGrid::new(0.0, 10_000.0, 0.5).is_err());
    }

    #[test]
    fn theory_csv_has_exact_schema_and_monotone_bers() {
        let c = cfg(4, 1, 4, 2, CsiModel::Perfect);
        let grid = SnrGrid::new(0.0, 40.0, 5.0).unwrap();
        let mut buf = Vec::new();
        cmd_theory(&c, &grid, OutputFormat::Csv, &mut buf).unwrap();
        let ls = lines(&buf);
        assert!(ls[0].starts_with("# manifest: {"));
        assert_eq!(
            ls[1],
            "gamma0_db,eps2,pm,iep_ml,iep_gd,ber_ml,ber_gd,asym_ml,asym_gd"
        );
        assert_eq!(ls.len(), 2 + 9);
        let col =
            |line: &str, i: usize| -> f64 { line.split(',').nth(i).unwrap().parse().unwrap() };
        for pair in ls[2..].windows(2) {
            assert!(col(&pair[1], 5) < col(&pair[0], 5), "ber_ml not monotone");
            assert!(col(&pair[1], 6) < col(&pair[0], 6), "ber_gd not monotone");
        }
    }

    #[test]
    fn theory_fixed_csi_emits_constant_floor_columns() {
        let c = cfg(4, 2, 2, 4, CsiModel::Fixed(0.2));
        let grid = SnrGrid::new(0.0, 30.0, 10.0).unwrap();
        let mut buf = Vec::new();
        cmd_theory(&c, &grid, OutputFormat::Csv, &mut buf).unwrap();
        let ls = lines(&buf);
        let asym_ml: Vec<&str> = ls[2..]
            .iter()
            .map(|l| l.split(',').nth(7).unwrap())
            .collect();
        let asym_gd: Vec<&str> = ls[2..]
            .iter()
            .map(|l| l.split(',').nth(8).unwrap())
            .collect();
        assert!(
            asym_ml.windows(2).all(|w| w[0] == w[1]),
            "ML floor not constant: {asym_ml:?}"
        );
        assert!(
            asym_gd.windows(2).all(|w| w[0] == w[1]),
            "GD floor not constant: {asym_gd:?}"
        );
    }

    #[test]
    fn theory_k_equals_n_zeroes_iep_columns() {
        let c = cfg(4, 4, 4, 2, CsiModel::Perfect);
        let grid = SnrGrid::new(0.0, 20.0, 10.0).unwrap();
        let mut buf = Vec::new();
        cmd_theory(&c, &grid, OutputFormat::Csv, &mut buf).unwrap();
        for line in &lines(&buf)[2..] {
            let mut cols = line.split(',');
            assert_eq!(cols.nth(3).unwrap(), "0.0000000000e0", "iep_ml");
            assert_eq!(cols.next().unwrap(), "0.0000000000e0", "iep_gd");
        }
    }

    #[test]
    fn theory_manifest_round_trips_as_json() {
        let c = cfg(2, 1, 2, 1, CsiModel::MmseVariable);
        let grid = SnrGrid::new(5.0, 15.0, 5.0).unwrap();
        let mut buf = Vec::new();
        cmd_theory(&c, &grid, OutputFormat::Csv, &mut buf).unwrap();
        let first = lines(&buf)[0].clone();
        let json = first.strip_prefix("# manifest: ").unwrap();
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        assert_eq!(v["tool"], "mcik");
        assert_eq!(v["command"], "theory");
        assert_eq!(v["config"]["n"], 2);
        assert_eq!(v["config"]["csi"], "mmse");
        assert_eq!(v["grid"]["step_db"], 5.0);
        assert_eq!(v["derived"]["total_bits"], 2);
    }

    #[test]
    fn simulate_csv_is_deterministic_and_schema_stable() {
        let c = cfg(2, 1, 2, 1, CsiModel::Perfect);
        let grid = SnrGrid::new(0.0, 5.0, 5.0).unwrap();
        let stop = StopRule {
            min_bit_errors: 50,
            max_frames: 20_000,
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        cmd_simulate(
            &c,
            &grid,
            DetectorChoice::Both,
            9,
            &stop,
            OutputFormat::Csv,
            &mut a,
        )
        .unwrap();
        cmd_simulate(
            &c,
            &grid,
            DetectorChoice::Both,
            9,
            &stop,
            OutputFormat::Csv,
            &mut b,
        )
        .unwrap();
        assert_eq!(a, b, "same seed must reproduce byte-identical output");
        let ls = lines(&a);
        assert_eq!(
            ls[1],
            "gamma0_db,detector,ber,index_ber,symbol_ber,ci95,frames,bit_errors,theory_ber,theory_asym"
        );
        // 2 grid points x 2 detectors.
        assert_eq!(ls.len(), 2 + 4);
        assert!(ls[2].split(',').nth(1) == Some("ml"));
        assert!(ls[3].split(',').nth(1) == Some("gd"));
    }

    #[test]
    fn simulate_json_carries_manifest_and_rows() {
        let c = cfg(2, 1, 2, 1, CsiModel::Perfect);
        let grid = SnrGrid::new(3.0, 3.0, 1.0).unwrap();
        let stop = StopRule {
            min_bit_errors: 20,
            max_frames: 10_000,
        };
        let mut buf = Vec::new();
        cmd_simulate(
            &c,
            &grid,
            DetectorChoice::Gd,
            2,
            &stop,
            OutputFormat::Json,
            &mut buf,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["manifest"]["seed"], 2);
        assert_eq!(v["manifest"]["detector"], "gd");
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
        assert_eq!(v["rows"][0]["detector"], "gd");
        assert!(v["rows"][0]["ber"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn recommend_text_mentions_detector_and_complexity() {
        let mut buf = Vec::new();
        cmd_recommend(
            &cfg(2, 1, 2, 8, CsiModel::Perfect),
            ReportFormat::Text,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("recommended detector: ml"), "{text}");
        assert!(text.contains("ops/cluster"), "{text}");
        assert!(text.contains("large-L limit"), "{text}");

        let mut buf = Vec::new();
        cmd_recommend(
            &cfg(4, 2, 8, 4, CsiModel::Perfect),
            ReportFormat::Json,
            &mut buf,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["recommendation"]["detector"], "gd");
        assert!(v["recommendation"]["complexity"]["ml"].as_u64().unwrap() > 0);
    }

    #[test]
    fn config_args_surface_clean_errors() {
        let bad_csi = ConfigArgs {
            n: 4,
            k: 1,
            m: 4,
            l: 2,
            csi: "fixed:1.5".into(),
        };
        let err = bad_csi.to_config().unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("1.5"),
            "error should name the offending value: {msg}"
        );

        let bad_k = ConfigArgs {
            n: 2,
            k: 3,
            m: 2,
            l: 1,
            csi: "perfect".into(),
        };
        assert!(bad_k.to_config().is_err());
    }
}
