//! Run configuration, report bundles and the CSV/JSON artifacts written by
//! the `fock-lab` binary.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analytics::{
    adjudicate_overlap, fit_overlap_coefficients, husimi_grid, GaussianCoefficients, OverlapAdjudicationRow,
    OverlapMode, QGrid,
};
use crate::error::FockError;
use crate::experiments::{caves_limit_study, fidelity_nondecreasing, yuen_limit_study, LimitStudyRow};
use crate::fock::{FockDim, StateVector, Tolerances};
use crate::states::{
    caves_state, coherent_state, momentum_eigenstate, position_eigenstate, yuen_state, PositionForm,
};
use crate::verify::{
    integrate_disentangle_ode, ode_order_check, verify_bogoliubov_with, verify_commutator_a2_n,
    verify_disentangle_with, verify_main_text_variant_with, verify_shift_identity_with,
    verify_similarity_scaling_with, verify_squeeze_factorization_with, Interior, OdeOrderReport, VariantReport,
    VariantWinner, VerificationReport, VerifyOptions,
};

pub const DEFAULT_LEVELS: usize = 128;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
/// Squeezing grid for the squeeze-based identities.
pub const VERIFY_R: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
/// Squeezing grid for the disentangling identities.
pub const DISENTANGLE_R: [f64; 7] = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
/// Basis size used for the disentangling identities, whose entries grow like e^{|r|N}.
pub const DISENTANGLE_LEVELS: usize = 32;
pub const SHIFT_DEGREE: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::InvalidDimension(_) | FockError::DimensionMismatch { .. } | FockError::InvalidParameter { .. } => {
                CliError::Usage(e.to_string())
            }
            FockError::TruncationInsufficient { .. }
            | FockError::NonConvergence(_)
            | FockError::ZeroNorm
            | FockError::Unnormalized(_) => CliError::Failed(e.to_string()),
        }
    }
}

/// Keys accepted in a TOML config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_levels: Option<usize>,
    pub interior_buffer: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub expm_tol: Option<f64>,
    pub compare_tol: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub levels: Option<usize>,
    pub buffer: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_levels: FockDim,
    pub interior_buffer: usize,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, overrides: &Overrides) -> Result<Self, CliError> {
        let dim = FockDim::new(overrides.levels.or(file.n_levels).unwrap_or(DEFAULT_LEVELS))?;
        let defaults = Tolerances::for_dim(dim);
        let buffer = overrides.buffer.or(file.interior_buffer).unwrap_or(defaults.interior_buffer);
        let tolerances = Tolerances::new(
            file.expm_tol.unwrap_or(defaults.expm_tol),
            file.compare_tol.unwrap_or(defaults.compare_tol),
            buffer,
            dim,
        )?;
        let output_dir = overrides
            .out
            .clone()
            .or_else(|| file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        Ok(RunConfig {
            n_levels: dim,
            interior_buffer: buffer,
            tolerances,
            output_dir,
        })
    }

    pub fn from_sources(config: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let file = match config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::resolve(&file, overrides)
    }

    fn verify_options(&self, dim: FockDim, interior: Interior) -> VerifyOptions {
        let mut tol = self.tolerances;
        if dim != self.n_levels {
            tol.interior_buffer = dim.default_buffer();
        }
        VerifyOptions {
            interior,
            threshold: self.tolerances.compare_tol,
            tol,
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.output_dir)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", self.output_dir.display())))?;
        let path = self.output_dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// A scalar check: passes when `value ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSummary {
    pub r_max: f64,
    pub step: f64,
    pub f: f64,
    pub g: f64,
    pub g_exact: f64,
    pub order: OdeOrderReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientFit {
    pub alpha: f64,
    pub r: f64,
    pub fitted: GaussianCoefficients,
    pub corrected: GaussianCoefficients,
    pub printed: GaussianCoefficients,
}

impl CoefficientFit {
    fn deviation(a: &GaussianCoefficients, b: &GaussianCoefficients) -> f64 {
        (a.quadratic - b.quadratic)
            .abs()
            .max((a.linear - b.linear).abs())
            .max((a.constant - b.constant).abs())
    }

    pub fn corrected_dev(&self) -> f64 {
        Self::deviation(&self.fitted, &self.corrected)
    }

    pub fn printed_dev(&self) -> f64 {
        Self::deviation(&self.fitted, &self.printed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HusimiSummary {
    pub x: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
    pub argmax_re: f64,
    pub argmax_im: f64,
    pub max_value: f64,
    /// Peak location after a continuous search along Re β.
    pub refined_re: f64,
    pub refined_max: f64,
    pub ridge_re: f64,
    pub max_column_spread: f64,
}

impl HusimiSummary {
    pub fn from_grid(grid: &QGrid) -> Self {
        let peak = grid.argmax();
        let refined = grid.refine_peak();
        HusimiSummary {
            x: grid.x_param,
            re_min: grid.re_range.0,
            re_max: grid.re_range.1,
            im_min: grid.im_range.0,
            im_max: grid.im_range.1,
            n_re: grid.n_re,
            n_im: grid.n_im,
            argmax_re: peak.re,
            argmax_im: peak.im,
            max_value: peak.value,
            refined_re: refined.re,
            refined_max: refined.value,
            ridge_re: grid.x_param / SQRT_2,
            max_column_spread: grid.max_column_spread(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verification: Vec<VerificationReport>,
    /// Same identities on the fixed half-basis interior; not part of pass/fail.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub informational: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub main_text_variants: Vec<VariantReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub main_text_winner: Option<VariantWinner>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub overlap_adjudication: Vec<OverlapAdjudicationRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub overlap_coefficients: Vec<CoefficientFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub yuen_rows: Vec<LimitStudyRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caves_rows: Vec<LimitStudyRow>,
    /// Squeezing values left out of the center and invariance checks because
    /// their states are not resolved by the basis.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded_r: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub husimi: Option<HusimiSummary>,
    pub passed: bool,
}

impl ReportBundle {
    fn new(command: &str, config: &RunConfig) -> Self {
        ReportBundle {
            command: command.to_string(),
            config: config.clone(),
            checks: Vec::new(),
            verification: Vec::new(),
            informational: Vec::new(),
            main_text_variants: Vec::new(),
            main_text_winner: None,
            ode: None,
            overlap_adjudication: Vec::new(),
            overlap_coefficients: Vec::new(),
            yuen_rows: Vec::new(),
            caves_rows: Vec::new(),
            excluded_r: Vec::new(),
            husimi: None,
            passed: true,
        }
    }

    fn seal(mut self) -> Self {
        self.passed = self.checks.iter().all(|c| c.passed) && self.verification.iter().all(|r| r.passed);
        self
    }

    /// Names of every failed thresholded check.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .verification
            .iter()
            .filter(|r| !r.passed)
            .map(|r| format!("{} (param {}, rel_dev {:e})", r.identity_name, r.r_or_param, r.rel_dev))
            .collect();
        out.extend(self.checks.iter().filter(|c| !c.passed).map(|c| format!("{} ({:e})", c.name, c.value)));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check, in report order.
    pub fn summary_lines(&self) -> Vec<String> {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut lines: Vec<String> = self
            .verification
            .iter()
            .map(|r| {
                format!(
                    "{} {:<24} param={:>6} N={:<4} interior={:<4} rel_dev={:.3e}",
                    mark(r.passed),
                    r.identity_name,
                    r.r_or_param,
                    r.dim.n_levels(),
                    r.interior,
                    r.rel_dev
                )
            })
            .collect();
        lines.extend(
            self.checks
                .iter()
                .map(|c| format!("{} {:<40} value={:.3e} threshold={:.1e}", mark(c.passed), c.name, c.value, c.threshold)),
        );
        lines
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Bogoliubov(f64),
    Factorization(f64),
    Shift(f64),
    Similarity(f64),
    Commutator,
    Disentangle(f64),
}

/// Runs the identity suite and writes `verify.json`.
pub fn cmd_verify(config: &RunConfig) -> Result<ReportBundle, CliError> {
    let dim = config.n_levels;
    let dis_dim = FockDim::new(dim.n_levels().min(DISENTANGLE_LEVELS))?;
    let auto = config.verify_options(dim, Interior::Auto);
    let literal = config.verify_options(dim, Interior::Fixed(dim.n_levels() / 2));
    let dis_opts = config.verify_options(dis_dim, Interior::Fixed(dis_dim.n_levels() / 2));

    let mut jobs: Vec<Job> = Vec::new();
    jobs.extend(VERIFY_R.iter().map(|&r| Job::Bogoliubov(r)));
    jobs.extend(VERIFY_R.iter().map(|&r| Job::Factorization(r)));
    jobs.extend(VERIFY_R.iter().map(|&r| Job::Shift(r)));
    jobs.extend(VERIFY_R.iter().map(|&r| Job::Similarity(r)));
    jobs.push(Job::Commutator);
    jobs.extend(DISENTANGLE_R.iter().map(|&r| Job::Disentangle(r)));

    let run = |job: Job, opts: &VerifyOptions| -> Result<VerificationReport, FockError> {
        match job {
            Job::Bogoliubov(r) => verify_bogoliubov_with(r, dim, opts),
            Job::Factorization(r) => verify_squeeze_factorization_with(r, dim, opts),
            Job::Shift(g) => verify_shift_identity_with(g, SHIFT_DEGREE, dim, opts),
            Job::Similarity(f) => verify_similarity_scaling_with(f, dim, opts),
            Job::Commutator => verify_commutator_a2_n(dim, opts),
            Job::Disentangle(r) => verify_disentangle_with(r, dis_dim, &dis_opts),
        }
    };
    let verification = jobs
        .par_iter()
        .map(|&job| run(job, &auto))
        .collect::<Result<Vec<_>, _>>()?;
    let literal_jobs: Vec<Job> = VERIFY_R
        .iter()
        .flat_map(|&r| [Job::Bogoliubov(r), Job::Factorization(r)])
        .collect();
    let informational = literal_jobs
        .par_iter()
        .map(|&job| run(job, &literal))
        .collect::<Result<Vec<_>, _>>()?;

    let variants = DISENTANGLE_R
        .par_iter()
        .map(|&r| verify_main_text_variant_with(r, dis_dim, &dis_opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut bundle = ReportBundle::new("verify", config);
    bundle.verification = verification;
    bundle.informational = informational;

    let winners: Vec<VariantWinner> = variants.iter().filter(|v| v.r != 0.0).map(|v| v.winner).collect();
    let consistent = winners
        .first()
        .filter(|w| matches!(w, VariantWinner::Printed | VariantWinner::Substituted))
        .filter(|w| winners.iter().all(|x| x == *w))
        .copied();
    bundle.main_text_winner = consistent;
    bundle.checks.push(CheckResult::new(
        "main_text_variant_consistent_winner",
        if consistent.is_some() { 0.0 } else { 1.0 },
        0.0,
    ));
    bundle.main_text_variants = variants;

    let (f, g) = integrate_disentangle_ode(1.0, 1e-3)?;
    let g_exact = (1.0 - 2f64.exp()) / 4.0;
    let order = ode_order_check(1.0, 1e-2)?;
    bundle.checks.push(CheckResult::new("ode_f", (f - 1.0).abs(), 1e-10));
    bundle.checks.push(CheckResult::new("ode_g", (g - g_exact).abs(), 1e-6));
    bundle.checks.push(CheckResult::new("ode_fourth_order", (order.ratio.log2() - 4.0).abs(), 0.25));
    bundle.ode = Some(OdeSummary {
        r_max: 1.0,
        step: 1e-3,
        f,
        g,
        g_exact,
        order,
    });

    let adjudication = adjudicate_overlap(&[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5], &[-1.0, 0.0, 1.0, 2.0], dim)?;
    let worst = |pred: &dyn Fn(&OverlapAdjudicationRow) -> bool, dev: &dyn Fn(&OverlapAdjudicationRow) -> f64| {
        adjudication.iter().filter(|r| pred(r)).map(dev).fold(0.0, f64::max)
    };
    bundle.checks.push(CheckResult::new(
        "overlap_printed_mode_at_r0",
        worst(&|r| r.r == 0.0, &|r| r.printed_dev),
        1e-10,
    ));
    bundle.checks.push(CheckResult::new(
        "overlap_corrected_mode",
        worst(&|_| true, &|r| r.corrected_dev),
        config.tolerances.compare_tol,
    ));
    bundle.overlap_adjudication = adjudication;

    let fits = [(0.0, 0.25), (0.0, 0.5), (0.5, 0.25), (0.5, 0.5)]
        .par_iter()
        .map(|&(alpha, r)| {
            Ok(CoefficientFit {
                alpha,
                r,
                fitted: fit_overlap_coefficients(alpha, r, 1.0, dim)?,
                corrected: GaussianCoefficients::of_mode(alpha, r, OverlapMode::Corrected),
                printed: GaussianCoefficients::of_mode(alpha, r, OverlapMode::Printed),
            })
        })
        .collect::<Result<Vec<_>, FockError>>()?;
    bundle.checks.push(CheckResult::new(
        "overlap_corrected_coefficients",
        fits.iter().map(CoefficientFit::corrected_dev).fold(0.0, f64::max),
        config.tolerances.compare_tol,
    ));
    bundle.overlap_coefficients = fits;

    let bundle = bundle.seal();
    config.write("verify.json", &bundle.to_json())?;
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiArgs {
    pub x: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for HusimiArgs {
    fn default() -> Self {
        HusimiArgs {
            x: 0.0,
            re_min: -4.0,
            re_max: 4.0,
            im_min: -4.0,
            im_max: 4.0,
            n_re: 81,
            n_im: 81,
        }
    }
}

/// Fixed 17-significant-digit rendering used in every CSV.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn husimi_csv(grid: &QGrid) -> String {
    let mut out = String::from("re_beta,im_beta,q\n");
    for j in 0..grid.n_im {
        for i in 0..grid.n_re {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_float(grid.re_at(i)),
                fmt_float(grid.im_at(j)),
                fmt_float(grid.value(i, j))
            );
        }
    }
    out
}

/// Samples the Husimi function of |x⟩ and writes `husimi.csv` plus `husimi.json`.
pub fn cmd_husimi(config: &RunConfig, args: &HusimiArgs) -> Result<ReportBundle, CliError> {
    let grid = husimi_grid(args.x, (args.re_min, args.re_max), (args.im_min, args.im_max), args.n_re, args.n_im)?;
    let summary = HusimiSummary::from_grid(&grid);
    config.write("husimi.csv", &husimi_csv(&grid))?;
    let mut sidecar = serde_json::to_string_pretty(&summary).expect("summary serializes");
    sidecar.push('\n');
    config.write("husimi.json", &sidecar)?;
    let mut bundle = ReportBundle::new("husimi", config);
    bundle.checks.push(CheckResult::new("husimi_column_spread", summary.max_column_spread, 1e-12));
    bundle.husimi = Some(summary);
    Ok(bundle.seal())
}

pub fn limits_csv(rows: &[LimitStudyRow]) -> String {
    let mut out = String::from("r,center_x,fidelity,norm\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(row.r),
            fmt_float(row.center_x),
            fmt_float(row.fidelity_to_target),
            fmt_float(row.norm_check)
        );
    }
    out
}

/// Yuen and Caves studies over `r_list`; writes `yuen.csv`, `caves.csv` and `limits.json`.
pub fn cmd_limits(config: &RunConfig, x: f64, r_list: &[f64]) -> Result<ReportBundle, CliError> {
    if r_list.is_empty() {
        return Err(CliError::Usage("r-list is empty".into()));
    }
    let dim = config.n_levels;
    let per_r = |r: f64| -> Result<(LimitStudyRow, LimitStudyRow), CliError> {
        let name = |e: FockError| match CliError::from(e) {
            CliError::Failed(m) => CliError::Failed(format!("r = {r}: {m}")),
            other => other,
        };
        let y = yuen_limit_study(x, &[r], dim).map_err(name)?;
        let c = caves_limit_study(x, &[r], dim).map_err(name)?;
        Ok((y[0], c[0]))
    };
    let rows = r_list.par_iter().map(|&r| per_r(r)).collect::<Result<Vec<_>, _>>()?;
    let (yuen, caves): (Vec<_>, Vec<_>) = rows.into_iter().unzip();

    let tol = config.tolerances.compare_tol;
    let mut bundle = ReportBundle::new("limits", config);
    let trusted = |y: &LimitStudyRow, c: &LimitStudyRow| y.trusted && c.trusted;
    let kept: Vec<(&LimitStudyRow, &LimitStudyRow)> = yuen.iter().zip(&caves).filter(|(y, c)| trusted(y, c)).collect();
    bundle.excluded_r = yuen.iter().zip(&caves).filter(|(y, c)| !trusted(y, c)).map(|(y, _)| y.r).collect();
    if kept.is_empty() {
        return Err(CliError::Failed(format!(
            "no r in {r_list:?} is resolved by N = {}",
            dim.n_levels()
        )));
    }
    let yuen_center = kept.iter().map(|(y, _)| (y.center_x - (-y.r).exp() * x).abs()).fold(0.0, f64::max);
    let caves_center = kept.iter().map(|(_, c)| (c.center_x - x).abs()).fold(0.0, f64::max);
    let f0 = kept[0].0.fidelity_to_target;
    let yuen_spread = kept.iter().map(|(y, _)| (y.fidelity_to_target - f0).abs()).fold(0.0, f64::max);
    bundle.checks.push(CheckResult::new("yuen_center_scaling", yuen_center, tol));
    bundle.checks.push(CheckResult::new("caves_center_invariance", caves_center, tol));
    bundle.checks.push(CheckResult::new("yuen_pairwise_fidelity_invariance", yuen_spread, tol));
    bundle.checks.push(CheckResult::new(
        "caves_fidelity_nondecreasing",
        if fidelity_nondecreasing(&caves) { 0.0 } else { 1.0 },
        0.0,
    ));
    config.write("yuen.csv", &limits_csv(&yuen))?;
    config.write("caves.csv", &limits_csv(&caves))?;
    bundle.yuen_rows = yuen;
    bundle.caves_rows = caves;
    let bundle = bundle.seal();
    config.write("limits.json", &bundle.to_json())?;
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Coherent,
    Yuen,
    Caves,
    Position,
    Momentum,
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Yuen => "yuen",
            StateKind::Caves => "caves",
            StateKind::Position => "position",
            StateKind::Momentum => "momentum",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateParams {
    pub alpha: Option<Complex64>,
    pub alpha_prime: Option<Complex64>,
    pub r: Option<f64>,
    pub x: Option<f64>,
    pub p: Option<f64>,
}

fn require<T>(v: Option<T>, flag: &str, kind: StateKind) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for kind {}", kind.name())))
}

pub fn build_state(kind: StateKind, params: &StateParams, dim: FockDim) -> Result<(StateVector, Map<String, Value>), CliError> {
    let mut echo = Map::new();
    let complex = |z: Complex64| json!([z.re, z.im]);
    let state = match kind {
        StateKind::Coherent => {
            let alpha = require(params.alpha, "alpha", kind)?;
            echo.insert("alpha".into(), complex(alpha));
            coherent_state(alpha, dim)?
        }
        StateKind::Yuen => {
            let alpha = require(params.alpha, "alpha", kind)?;
            let r = require(params.r, "r", kind)?;
            echo.insert("alpha".into(), complex(alpha));
            echo.insert("r".into(), json!(r));
            yuen_state(alpha, r, dim)?
        }
        StateKind::Caves => {
            let alpha_prime = require(params.alpha_prime, "alpha-prime", kind)?;
            let r = require(params.r, "r", kind)?;
            echo.insert("alpha_prime".into(), complex(alpha_prime));
            echo.insert("r".into(), json!(r));
            caves_state(alpha_prime, r, dim)?
        }
        StateKind::Position => {
            let x = require(params.x, "x", kind)?;
            echo.insert("x".into(), json!(x));
            position_eigenstate(x, dim, PositionForm::Hermite)?
        }
        StateKind::Momentum => {
            let p = require(params.p, "p", kind)?;
            echo.insert("p".into(), json!(p));
            momentum_eigenstate(p, dim)?
        }
    };
    Ok((state, echo))
}

#[derive(Serialize)]
struct StateDump {
    kind: &'static str,
    params: Map<String, Value>,
    n_levels: usize,
    amps_re: Vec<f64>,
    amps_im: Vec<f64>,
}

pub fn state_json(kind: StateKind, params: Map<String, Value>, state: &StateVector) -> String {
    let doc = StateDump {
        kind: kind.name(),
        params,
        n_levels: state.dim().n_levels(),
        amps_re: state.amps().iter().map(|z| z.re).collect(),
        amps_im: state.amps().iter().map(|z| z.im).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("state serializes");
    s.push('\n');
    s
}

/// Dumps the amplitudes of one state to `state_<kind>.json`.
pub fn cmd_state(config: &RunConfig, kind: StateKind, params: &StateParams) -> Result<PathBuf, CliError> {
    let (state, echo) = build_state(kind, params, config.n_levels)?;
    config.write(&format!("state_{}.json", kind.name()), &state_json(kind, echo, &state))
}
