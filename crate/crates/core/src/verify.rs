//! Operator identities certified on interior blocks of the truncated space.
//!
//! Every comparison drops the last rows and columns of both sides, because
//! truncation only breaks these identities near the edge. The relative
//! deviation divides by the largest entry of the directly exponentiated side.

use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::expm::matrix_exponential;
use crate::fock::{
    build_annihilation, build_creation, build_number, build_quadrature_x, interior_deviation, FockDim, FockOperator,
    Tolerances,
};
use crate::states::{mu_nu, squeeze_operator, SqueezeForm};

/// Largest |r| accepted by [`verify_bogoliubov`] and [`verify_squeeze_factorization`].
pub const MAX_BOGOLIUBOV_R: f64 = 1.5;
/// Largest |r| accepted by the disentangling checks.
pub const MAX_DISENTANGLE_R: f64 = 0.75;
pub const MAX_SHIFT_DEGREE: usize = 6;
/// A column counts as resolved when its weight in the top band is below this.
pub const TAIL_MASS_TOL: f64 = 1e-12;
pub const MAX_ODE_STEP: f64 = 1e-2;
pub const MAX_ODE_R: f64 = 2.0;
/// Keeps e^{|r|N} of the diagonal factor well inside double range.
const EXP_OVERFLOW_GUARD: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_name: String,
    pub dim: FockDim,
    pub interior: usize,
    pub r_or_param: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl VerificationReport {
    fn new(name: &str, dim: FockDim, interior: usize, param: f64, (abs_dev, rel_dev): (f64, f64), threshold: f64) -> Self {
        VerificationReport {
            identity_name: name.to_string(),
            dim,
            interior,
            r_or_param: param,
            abs_dev,
            rel_dev,
            threshold,
            passed: rel_dev <= threshold,
        }
    }
}

/// How many leading rows/columns enter a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interior {
    /// Chosen per identity: the resolved columns of S(r) for squeeze
    /// identities, N − buffer for the exactly truncating ones.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub interior: Interior,
    pub threshold: f64,
    pub tol: Tolerances,
}

impl VerifyOptions {
    pub fn for_dim(dim: FockDim) -> Self {
        let tol = Tolerances::for_dim(dim);
        VerifyOptions {
            interior: Interior::Auto,
            threshold: tol.compare_tol,
            tol,
        }
    }

    pub fn with_interior(mut self, interior: Interior) -> Self {
        self.interior = interior;
        self
    }
}

fn expm(op: &FockOperator, tol: &Tolerances) -> Result<FockOperator> {
    matrix_exponential(op, tol)
}

fn check_fixed(k: usize, dim: FockDim) -> Result<usize> {
    if k == 0 || k > dim.n_levels() {
        return Err(FockError::param("interior", format!("{k} outside 1..={}", dim.n_levels())));
    }
    Ok(k)
}

/// Length of the leading run of columns whose weight in the top `band` rows
/// stays below [`TAIL_MASS_TOL`].
pub fn trusted_interior(op: &FockOperator, band: usize) -> usize {
    let n = op.dim().n_levels();
    let band = band.clamp(1, n);
    let entries = op.entries();
    (0..n)
        .take_while(|&j| {
            let tail: f64 = (n - band..n).map(|i| entries[[i, j]].norm_sqr()).sum();
            tail < TAIL_MASS_TOL
        })
        .count()
}

fn squeeze_interior(s: &FockOperator, interior: Interior, what: &str) -> Result<usize> {
    let dim = s.dim();
    match interior {
        Interior::Fixed(k) => check_fixed(k, dim),
        Interior::Auto => {
            let k = trusted_interior(s, (dim.n_levels() / 8).max(1));
            if k == 0 {
                return Err(FockError::truncation(
                    what,
                    format!("no column of S(r) is resolved within {} levels", dim.n_levels()),
                ));
            }
            Ok(k)
        }
    }
}

fn exact_interior(interior: Interior, dim: FockDim, tol: &Tolerances, reach: usize) -> Result<usize> {
    match interior {
        Interior::Fixed(k) => check_fixed(k, dim),
        Interior::Auto => {
            let buffer = tol.interior_buffer.max(reach);
            if buffer >= dim.n_levels() {
                return Err(FockError::truncation("interior", format!("buffer {buffer} leaves no interior")));
            }
            Ok(dim.n_levels() - buffer)
        }
    }
}

fn worst(devs: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    devs.into_iter().fold((0.0, 0.0), |(a, r), (a2, r2)| (a.max(a2), r.max(r2)))
}

fn check_squeeze_r(r: f64, what: &str) -> Result<()> {
    if !r.is_finite() || r.abs() > MAX_BOGOLIUBOV_R {
        return Err(FockError::truncation(what, format!("|r| = {} exceeds {MAX_BOGOLIUBOV_R}", r.abs())));
    }
    Ok(())
}

pub fn verify_bogoliubov(r: f64, dim: FockDim) -> Result<VerificationReport> {
    verify_bogoliubov_with(r, dim, &VerifyOptions::for_dim(dim))
}

/// S†aS = μa − νa†, S†a†S = μa† − νa and S†X̂S = e^{−r}X̂.
pub fn verify_bogoliubov_with(r: f64, dim: FockDim, opts: &VerifyOptions) -> Result<VerificationReport> {
    check_squeeze_r(r, "bogoliubov")?;
    let (mu, nu) = mu_nu(r)?;
    let s = squeeze_operator(r, dim, SqueezeForm::Exponential)?;
    let k = squeeze_interior(&s, opts.interior, "bogoliubov")?;
    let sd = s.dagger();
    let a = build_annihilation(dim);
    let ad = build_creation(dim);
    let x = build_quadrature_x(dim);

    let conj = |op: &FockOperator| FockOperator::product(&[&sd, op, &s]);
    let dev_a = interior_deviation(&conj(&a)?, &a.scale_real(mu).sub(&ad.scale_real(nu))?, k)?;
    let dev_ad = interior_deviation(&conj(&ad)?, &ad.scale_real(mu).sub(&a.scale_real(nu))?, k)?;
    let dev_x = interior_deviation(&conj(&x)?, &x.scale_real((-r).exp()), k)?;
    Ok(VerificationReport::new(
        "bogoliubov",
        dim,
        k,
        r,
        worst([dev_a, dev_ad, dev_x]),
        opts.threshold,
    ))
}

pub fn verify_squeeze_factorization(r: f64, dim: FockDim) -> Result<VerificationReport> {
    verify_squeeze_factorization_with(r, dim, &VerifyOptions::for_dim(dim))
}

/// exp[r(a² − a†²)/2] against its normal-ordered factorization.
pub fn verify_squeeze_factorization_with(r: f64, dim: FockDim, opts: &VerifyOptions) -> Result<VerificationReport> {
    check_squeeze_r(r, "squeeze factorization")?;
    let direct = squeeze_operator(r, dim, SqueezeForm::Exponential)?;
    let factored = squeeze_operator(r, dim, SqueezeForm::Factored)?;
    let k = squeeze_interior(&direct, opts.interior, "squeeze factorization")?;
    let dev = interior_deviation(&direct, &factored, k)?;
    Ok(VerificationReport::new("squeeze_factorization", dim, k, r, dev, opts.threshold))
}

pub fn verify_shift_identity(gamma: f64, degree: usize, dim: FockDim) -> Result<VerificationReport> {
    verify_shift_identity_with(gamma, degree, dim, &VerifyOptions::for_dim(dim))
}

/// e^{−γa}(a†)^k e^{γa} = (a† − γ)^k for k = 1..=degree; worst case reported.
pub fn verify_shift_identity_with(
    gamma: f64,
    degree: usize,
    dim: FockDim,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    if !gamma.is_finite() {
        return Err(FockError::param("gamma", "must be finite"));
    }
    if degree == 0 || degree > MAX_SHIFT_DEGREE {
        return Err(FockError::param("degree", format!("{degree} outside 1..={MAX_SHIFT_DEGREE}")));
    }
    // column j of the left side is exact once j + degree < N
    let k = exact_interior(opts.interior, dim, &opts.tol, degree)?;
    let a = build_annihilation(dim);
    let ad = build_creation(dim);
    let left = expm(&a.scale_real(-gamma), &opts.tol)?;
    let right = expm(&a.scale_real(gamma), &opts.tol)?;
    let shifted = ad.sub(&FockOperator::identity(dim).scale_real(gamma))?;
    let devs = (1..=degree as u32)
        .map(|p| {
            let lhs = FockOperator::product(&[&left, &ad.powi(p), &right])?;
            interior_deviation(&lhs, &shifted.powi(p), k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::new("shift", dim, k, gamma, worst(devs), opts.threshold))
}

pub fn verify_similarity_scaling(f: f64, dim: FockDim) -> Result<VerificationReport> {
    verify_similarity_scaling_with(f, dim, &VerifyOptions::for_dim(dim))
}

/// e^{f n̂} a² e^{−f n̂} = e^{−2f} a².
pub fn verify_similarity_scaling_with(f: f64, dim: FockDim, opts: &VerifyOptions) -> Result<VerificationReport> {
    if !f.is_finite() || f.abs() > 1.0 {
        return Err(FockError::param("f", format!("|f| = {} exceeds 1", f.abs())));
    }
    let k = exact_interior(opts.interior, dim, &opts.tol, 0)?;
    let n = build_number(dim);
    let a = build_annihilation(dim);
    let a2 = a.matmul(&a)?;
    let lhs = FockOperator::product(&[&expm(&n.scale_real(f), &opts.tol)?, &a2, &expm(&n.scale_real(-f), &opts.tol)?])?;
    let dev = interior_deviation(&lhs, &a2.scale_real((-2.0 * f).exp()), k)?;
    Ok(VerificationReport::new("similarity_scaling", dim, k, f, dev, opts.threshold))
}

/// [a², n̂] = 2a² on the interior block.
pub fn verify_commutator_a2_n(dim: FockDim, opts: &VerifyOptions) -> Result<VerificationReport> {
    let k = exact_interior(opts.interior, dim, &opts.tol, 0)?;
    let a = build_annihilation(dim);
    let a2 = a.matmul(&a)?;
    let comm = a2.commutator(&build_number(dim))?;
    let dev = interior_deviation(&a2.scale_real(2.0), &comm, k)?;
    Ok(VerificationReport::new("commutator_a2_n", dim, k, 0.0, dev, opts.threshold))
}

fn check_disentangle_r(r: f64, dim: FockDim) -> Result<()> {
    if !r.is_finite() || r.abs() > MAX_DISENTANGLE_R {
        return Err(FockError::truncation("disentangle", format!("|r| = {} exceeds {MAX_DISENTANGLE_R}", r.abs())));
    }
    if r.abs() * dim.n_levels() as f64 >= EXP_OVERFLOW_GUARD {
        return Err(FockError::truncation(
            "disentangle",
            format!("e^(|r|N) overflows for r = {r}, N = {}", dim.n_levels()),
        ));
    }
    Ok(())
}

/// Direct exponential of c₂a² + c_n n̂ against e^{d_n n̂} e^{d₂ a²}.
fn compare_disentangled(
    name: &str,
    r: f64,
    (c2, cn): (f64, f64),
    (dn, d2): (f64, f64),
    dim: FockDim,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_disentangle_r(r, dim)?;
    // both sides are upper triangular, so truncation is exact everywhere
    let k = match opts.interior {
        Interior::Auto => dim.n_levels() / 2,
        Interior::Fixed(k) => check_fixed(k, dim)?,
    };
    let a = build_annihilation(dim);
    let a2 = a.matmul(&a)?;
    let n = build_number(dim);
    let direct = expm(&a2.scale_real(c2).add(&n.scale_real(cn))?, &opts.tol)?;
    let factored = expm(&n.scale_real(dn), &opts.tol)?.matmul(&expm(&a2.scale_real(d2), &opts.tol)?)?;
    let dev = interior_deviation(&direct, &factored, k)?;
    Ok(VerificationReport::new(name, dim, k, r, dev, opts.threshold))
}

pub fn verify_disentangle(r: f64, dim: FockDim) -> Result<VerificationReport> {
    verify_disentangle_with(r, dim, &VerifyOptions::for_dim(dim))
}

/// e^{−(r/2)a² + r n̂} = e^{r n̂} e^{(1 − e^{2r})a²/4}.
pub fn verify_disentangle_with(r: f64, dim: FockDim, opts: &VerifyOptions) -> Result<VerificationReport> {
    let g = (1.0 - (2.0 * r).exp()) / 4.0;
    compare_disentangled("disentangle", r, (-0.5 * r, r), (r, g), dim, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantWinner {
    /// e^{(r/2)a² − r n̂} = e^{−r n̂} e^{(1 − e^{2r})a²/4}
    Printed,
    /// e^{(r/2)a² − r n̂} = e^{−r n̂} e^{(1 − e^{−2r})a²/4}
    Substituted,
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub r: f64,
    pub printed: VerificationReport,
    pub substituted: VerificationReport,
    pub winner: VariantWinner,
}

pub fn verify_main_text_variant(r: f64, dim: FockDim) -> Result<VariantReport> {
    verify_main_text_variant_with(r, dim, &VerifyOptions::for_dim(dim))
}

/// Decides which disentangling of e^{(r/2)a² − r n̂} matches the direct
/// exponential: the coefficient (1 − e^{2r})/4 or (1 − e^{−2r})/4.
pub fn verify_main_text_variant_with(r: f64, dim: FockDim, opts: &VerifyOptions) -> Result<VariantReport> {
    let printed = compare_disentangled(
        "main_text_printed",
        r,
        (0.5 * r, -r),
        (-r, (1.0 - (2.0 * r).exp()) / 4.0),
        dim,
        opts,
    )?;
    let substituted = compare_disentangled(
        "main_text_substituted",
        r,
        (0.5 * r, -r),
        (-r, (1.0 - (-2.0 * r).exp()) / 4.0),
        dim,
        opts,
    )?;
    let winner = match (printed.passed, substituted.passed) {
        (true, true) => VariantWinner::Both,
        (true, false) => VariantWinner::Printed,
        (false, true) => VariantWinner::Substituted,
        (false, false) => VariantWinner::Neither,
    };
    Ok(VariantReport {
        r,
        printed,
        substituted,
        winner,
    })
}

/// Integrates f′ = 1, g′ = −½e^{2f} from f(0) = g(0) = 0 to `r_max` with
/// classical RK4. The step is shrunk so that it divides |r_max| evenly.
pub fn integrate_disentangle_ode(r_max: f64, step: f64) -> Result<(f64, f64)> {
    if !(step > 0.0 && step <= MAX_ODE_STEP) {
        return Err(FockError::param("step", format!("{step} outside (0, {MAX_ODE_STEP}]")));
    }
    if !r_max.is_finite() || r_max.abs() > MAX_ODE_R {
        return Err(FockError::param("r_max", format!("|r_max| = {} exceeds {MAX_ODE_R}", r_max.abs())));
    }
    let steps = (r_max.abs() / step).ceil() as usize;
    if steps == 0 {
        return Ok((0.0, 0.0));
    }
    let h = r_max / steps as f64;
    let rhs = |f: f64| (1.0, -0.5 * (2.0 * f).exp());
    let (mut f, mut g) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        let k1 = rhs(f);
        let k2 = rhs(f + 0.5 * h * k1.0);
        let k3 = rhs(f + 0.5 * h * k2.0);
        let k4 = rhs(f + h * k3.0);
        f += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        g += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    Ok((f, g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeOrderReport {
    pub r_max: f64,
    pub step: f64,
    pub err_step: f64,
    pub err_half_step: f64,
    /// err(h)/err(h/2); about 16 for a fourth-order scheme.
    pub ratio: f64,
}

/// Step-halving self-test of the integrator against g(r) = (1 − e^{2r})/4.
pub fn ode_order_check(r_max: f64, step: f64) -> Result<OdeOrderReport> {
    let exact = (1.0 - (2.0 * r_max).exp()) / 4.0;
    let err_step = (integrate_disentangle_ode(r_max, step)?.1 - exact).abs();
    let err_half_step = (integrate_disentangle_ode(r_max, step / 2.0)?.1 - exact).abs();
    Ok(OdeOrderReport {
        r_max,
        step,
        err_step,
        err_half_step,
        ratio: err_step / err_half_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn zero_parameter_is_exact() {
        let d = dim(32);
        assert!(verify_bogoliubov(0.0, d).unwrap().abs_dev <= 1e-13);
        assert!(verify_squeeze_factorization(0.0, d).unwrap().abs_dev <= 1e-13);
        assert!(verify_shift_identity(0.0, 3, d).unwrap().abs_dev <= 1e-13);
        assert!(verify_similarity_scaling(0.0, d).unwrap().abs_dev <= 1e-13);
        assert!(verify_disentangle(0.0, d).unwrap().abs_dev <= 1e-13);
        let v = verify_main_text_variant(0.0, d).unwrap();
        assert_eq!(v.winner, VariantWinner::Both);
    }

    #[test]
    fn bogoliubov_on_resolved_columns() {
        let d = dim(128);
        for r in [-0.5, 0.5] {
            let rep = verify_bogoliubov(r, d).unwrap();
            assert!(rep.rel_dev <= 1e-9, "{rep:?}");
            assert!(rep.interior >= 16);
        }
        assert!(verify_bogoliubov(2.0, d).is_err());
    }

    #[test]
    fn shift_examples() {
        let d = dim(64);
        assert!(verify_shift_identity(0.7, 1, d).unwrap().rel_dev <= 1e-10);
        assert!(verify_shift_identity(1.0, 2, d).unwrap().abs_dev <= 1e-9);
        assert!(verify_shift_identity(1.0, 7, d).is_err());
    }

    #[test]
    fn similarity_both_signs() {
        let d = dim(64);
        for f in [0.5, -0.5] {
            assert!(verify_similarity_scaling(f, d).unwrap().rel_dev <= 1e-10);
        }
    }

    #[test]
    fn disentangle_both_signs() {
        let d = dim(32);
        let opts = VerifyOptions::for_dim(d).with_interior(Interior::Fixed(16));
        for r in [-0.75, -0.5, 0.5, 0.75] {
            let rep = verify_disentangle_with(r, d, &opts).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
        assert!(verify_disentangle(0.8, d).is_err());
    }

    #[test]
    fn commutator_identity() {
        let d = dim(24);
        let rep = verify_commutator_a2_n(d, &VerifyOptions::for_dim(d)).unwrap();
        assert!(rep.abs_dev <= 1e-12);
    }

    #[test]
    fn ode_examples() {
        assert_eq!(integrate_disentangle_ode(0.0, 1e-3).unwrap(), (0.0, 0.0));
        let (f, g) = integrate_disentangle_ode(1.0, 1e-3).unwrap();
        assert!((f - 1.0).abs() <= 1e-10);
        assert!((g + 1.5972640247326626).abs() <= 1e-6);
        assert!((integrate_disentangle_ode(0.5, 1e-3).unwrap().0 - 0.5).abs() <= 1e-12);
        assert!(integrate_disentangle_ode(1.0, 0.1).is_err());
        assert!(integrate_disentangle_ode(2.5, 1e-3).is_err());
        let order = ode_order_check(1.0, 1e-2).unwrap();
        assert!((order.ratio - 16.0).abs() < 1.0, "{order:?}");
    }
}
