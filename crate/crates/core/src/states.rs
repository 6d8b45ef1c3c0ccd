//! Coherent, squeezed and position/momentum-eigenstate approximants.
//!
//! Every state has at least two independent constructions so the identities
//! linking them can be checked numerically:
//!
//! * coherent: ladder series, or D(α)|0⟩;
//! * squeezed (Yuen, Caves): matrix exponentials of the generators, or the
//!   closed Gaussian form e^{qâ†² + lâ†}|0⟩;
//! * position eigenstate: Hermite-function recursion, one matrix exponential of
//!   −â†²/2 + √2xâ†, or e^{−â†²/2} acting on the coherent state |√2x⟩.
//!
//! Truncation guards fail loudly with [`FockError::TruncationInsufficient`]
//! instead of letting a clipped state corrupt later comparisons.

use std::f64::consts::{PI, SQRT_2};

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{FockError, Result};
use crate::expm::{expm_action, matrix_exponential};
use crate::fock::{
    build_annihilation, build_creation, FockDim, FockOperator, StateVector, Tolerances, I, ONE, ZERO,
};
use crate::hermite::hermite_functions;

/// Largest |r| accepted anywhere; beyond it an N ≤ 512 basis is meaningless.
pub const MAX_SQUEEZE: f64 = 5.0;

/// Bound on the last retained coherent amplitude.
pub const COHERENT_TAIL_TOL: f64 = 1e-12;

/// Standard deviations of the photon-number distribution that must fit below N.
pub const POPULATION_SIGMAS: f64 = 10.0;

/// Real squeeze parameter r, |r| ≤ [`MAX_SQUEEZE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    r: f64,
}

impl SqueezeParams {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(FockError::param("r", "must be finite"));
        }
        if r.abs() > MAX_SQUEEZE {
            return Err(FockError::param("r", format!("|r| = {} exceeds {MAX_SQUEEZE}", r.abs())));
        }
        Ok(SqueezeParams { r })
    }

    pub fn r(self) -> f64 {
        self.r
    }

    /// (μ, ν) = (cosh r, sinh r).
    pub fn mu_nu(self) -> (f64, f64) {
        (self.r.cosh(), self.r.sinh())
    }
}

/// Complex displacement α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude {
    alpha: Complex64,
}

impl CoherentAmplitude {
    pub fn new(alpha: impl Into<Complex64>) -> Result<Self> {
        let alpha = alpha.into();
        if !alpha.is_finite() {
            return Err(FockError::param("alpha", "must be finite"));
        }
        Ok(CoherentAmplitude { alpha })
    }

    pub fn value(self) -> Complex64 {
        self.alpha
    }
}

/// Dimensionless position label x (ħ = m = ω = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionValue {
    x: f64,
}

impl PositionValue {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(FockError::param("x", "must be finite"));
        }
        Ok(PositionValue { x })
    }

    pub fn value(self) -> f64 {
        self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisplacementForm {
    /// exp(αâ† − α*â)
    Exponential,
    /// e^{|α|²/2} e^{−α*â} e^{αâ†}
    Antinormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezeForm {
    /// exp[(â² − â†²) r/2]
    Exponential,
    /// μ^{−1/2} e^{−(ν/2μ)â†²} μ^{−n̂} e^{(ν/2μ)â²}
    Factored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionForm {
    Hermite,
    Operator,
    Coherent,
}

pub fn mu_nu(r: f64) -> Result<(f64, f64)> {
    Ok(SqueezeParams::new(r)?.mu_nu())
}

/// Caves amplitude α′ = μα − να* matching the Yuen state S(r)D(α)|0⟩.
pub fn caves_amplitude(alpha: impl Into<Complex64>, r: f64) -> Result<Complex64> {
    let alpha = CoherentAmplitude::new(alpha)?.value();
    let (mu, nu) = mu_nu(r)?;
    Ok(alpha * mu - alpha.conj() * nu)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Fails unless the last retained coherent amplitude e^{−|β|²/2}|β|^{N−1}/√((N−1)!)
/// is below [`COHERENT_TAIL_TOL`].
pub fn coherent_guard(beta: Complex64, dim: FockDim) -> Result<()> {
    let n = dim.n_levels() - 1;
    let b = beta.norm();
    if b == 0.0 {
        return Ok(());
    }
    let ln_last = -0.5 * b * b + n as f64 * b.ln() - 0.5 * ln_factorial(n);
    if ln_last >= COHERENT_TAIL_TOL.ln() {
        return Err(FockError::truncation(
            format!("coherent amplitude |β| = {b}"),
            format!(
                "last amplitude {:.3e} ≥ {COHERENT_TAIL_TOL:e} at N = {}",
                ln_last.exp(),
                dim.n_levels()
            ),
        ));
    }
    Ok(())
}

/// Mean and an upper bound on the variance of n̂ for D(α′)S(r)|0⟩.
pub fn squeezed_population(alpha_prime: Complex64, r: f64) -> (f64, f64) {
    let nu = r.sinh();
    let mu = r.cosh();
    let a2 = alpha_prime.norm_sqr();
    let mean = a2 + nu * nu;
    let var = a2 * (2.0 * r.abs()).exp() + 2.0 * nu * nu * mu * mu;
    (mean, var)
}

/// Fails unless ⟨n̂⟩ + [`POPULATION_SIGMAS`]·σ_n ≤ N for D(α′)S(r)|0⟩.
pub fn population_guard(alpha_prime: Complex64, r: f64, dim: FockDim) -> Result<()> {
    let (mean, var) = squeezed_population(alpha_prime, r);
    let reach = mean + POPULATION_SIGMAS * var.sqrt();
    if reach > dim.n_levels() as f64 {
        return Err(FockError::truncation(
            format!("squeezed state (α′ = {alpha_prime}, r = {r})"),
            format!(
                "⟨n⟩ + {POPULATION_SIGMAS}σ = {reach:.1} exceeds N = {}",
                dim.n_levels()
            ),
        ));
    }
    Ok(())
}

/// Coherent state |α⟩ = e^{−|α|²/2} Σ αⁿ/√n! |n⟩.
pub fn coherent_state(alpha: impl Into<Complex64>, dim: FockDim) -> Result<StateVector> {
    let alpha = CoherentAmplitude::new(alpha)?.value();
    coherent_guard(alpha, dim)?;
    let mut amps = Array1::from_elem(dim.n_levels(), ZERO);
    amps[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..dim.n_levels() {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    StateVector::new(dim, amps)
}

fn expm(op: &FockOperator) -> Result<FockOperator> {
    matrix_exponential(op, &Tolerances::for_dim(op.dim()))
}

pub fn displacement_operator(
    alpha: impl Into<Complex64>,
    dim: FockDim,
    form: DisplacementForm,
) -> Result<FockOperator> {
    let alpha = CoherentAmplitude::new(alpha)?.value();
    coherent_guard(alpha, dim)?;
    let a = build_annihilation(dim);
    let ad = build_creation(dim);
    match form {
        DisplacementForm::Exponential => {
            let gen = ad.scale(alpha).sub(&a.scale(alpha.conj()))?;
            expm(&gen)
        }
        DisplacementForm::Antinormal => {
            let left = expm(&a.scale(-alpha.conj()))?;
            let right = expm(&ad.scale(alpha))?;
            Ok(left.matmul(&right)?.scale_real((0.5 * alpha.norm_sqr()).exp()))
        }
    }
}

/// Fails unless the squeezed vacuum S(r)|0⟩ fits the basis.
pub fn squeeze_guard(r: f64, dim: FockDim) -> Result<()> {
    population_guard(ZERO, r, dim)
}

pub fn squeeze_operator(r: f64, dim: FockDim, form: SqueezeForm) -> Result<FockOperator> {
    let params = SqueezeParams::new(r)?;
    squeeze_guard(r, dim)?;
    let a = build_annihilation(dim);
    let ad = build_creation(dim);
    let a2 = a.matmul(&a)?;
    let ad2 = ad.matmul(&ad)?;
    match form {
        SqueezeForm::Exponential => expm(&a2.sub(&ad2)?.scale_real(0.5 * r)),
        SqueezeForm::Factored => {
            let (mu, nu) = params.mu_nu();
            let t = nu / (2.0 * mu);
            let left = expm(&ad2.scale_real(-t))?;
            let ln_mu = mu.ln();
            let middle = FockOperator::diagonal(dim, |n| Complex64::new((-(n as f64) * ln_mu).exp(), 0.0));
            let right = expm(&a2.scale_real(t))?;
            Ok(FockOperator::product(&[&left, &middle, &right])?.scale_real(1.0 / mu.sqrt()))
        }
    }
}

/// Coefficients of c_{a²}â² + c_{a†²}â†² + c_a â + c_{a†}â†.
#[derive(Clone, Copy)]
struct Generator {
    a2: Complex64,
    ad2: Complex64,
    a: Complex64,
    ad: Complex64,
}

impl Generator {
    fn squeeze(r: f64) -> Self {
        Generator {
            a2: Complex64::new(0.5 * r, 0.0),
            ad2: Complex64::new(-0.5 * r, 0.0),
            a: ZERO,
            ad: ZERO,
        }
    }

    fn displacement(alpha: Complex64) -> Self {
        Generator {
            a2: ZERO,
            ad2: ZERO,
            a: -alpha.conj(),
            ad: alpha,
        }
    }

    /// Applies the generator with the hard cutoff of the truncated ladder.
    fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        let m = v.len();
        let sq = |k: usize| (k as f64).sqrt();
        Array1::from_shape_fn(m, |n| {
            let mut out = ZERO;
            if n + 2 < m {
                out += self.a2 * sq(n + 1) * sq(n + 2) * v[n + 2];
            }
            if n >= 2 {
                out += self.ad2 * sq(n) * sq(n - 1) * v[n - 2];
            }
            if n + 1 < m {
                out += self.a * sq(n + 1) * v[n + 1];
            }
            if n >= 1 {
                out += self.ad * sq(n) * v[n - 1];
            }
            out
        })
    }

    /// Upper bound on the 1-norm over an m-level basis.
    fn bound(&self, m: usize) -> f64 {
        let m = m as f64;
        (self.a2.norm() + self.ad2.norm()) * m + (self.a.norm() + self.ad.norm()) * m.sqrt()
    }
}

/// Operator products acting on states are evaluated in a basis twice the
/// output size and then clipped, so the broken edge columns of the truncated
/// generators never touch the retained amplitudes.
fn working_dim(dim: FockDim) -> Result<FockDim> {
    FockDim::new(2 * dim.n_levels())
}

fn evolve(v: Array1<Complex64>, gen: Generator) -> Result<Array1<Complex64>> {
    let bound = gen.bound(v.len());
    expm_action(|x| gen.apply(x), &v, bound)
}

fn clip(v: &Array1<Complex64>, dim: FockDim) -> Result<StateVector> {
    StateVector::new(dim, v.slice(ndarray::s![..dim.n_levels()]).to_owned())
}

/// Yuen ordering S(r)D(α)|0⟩.
pub fn yuen_state(alpha: impl Into<Complex64>, r: f64, dim: FockDim) -> Result<StateVector> {
    let alpha = CoherentAmplitude::new(alpha)?.value();
    SqueezeParams::new(r)?;
    coherent_guard(alpha, dim)?;
    population_guard(caves_amplitude(alpha, r)?, r, dim)?;
    let coh = coherent_state(alpha, working_dim(dim)?)?;
    clip(&evolve(coh.into_amps(), Generator::squeeze(r))?, dim)
}

/// Caves ordering D(α′)S(r)|0⟩.
pub fn caves_state(alpha_prime: impl Into<Complex64>, r: f64, dim: FockDim) -> Result<StateVector> {
    let alpha_prime = CoherentAmplitude::new(alpha_prime)?.value();
    SqueezeParams::new(r)?;
    coherent_guard(alpha_prime, dim)?;
    population_guard(alpha_prime, r, dim)?;
    let vac = StateVector::vacuum(working_dim(dim)?).into_amps();
    let squeezed = evolve(vac, Generator::squeeze(r))?;
    clip(&evolve(squeezed, Generator::displacement(alpha_prime))?, dim)
}

/// Amplitudes of e^{q â†² + l â†}|0⟩ from the generating-function recursion
/// b_n = (l b_{n−1} + 2q √(n−1) b_{n−2}) / √n.
pub fn gaussian_ladder_state(quadratic: Complex64, linear: Complex64, dim: FockDim) -> Result<StateVector> {
    let n_levels = dim.n_levels();
    let mut b = Array1::from_elem(n_levels, ZERO);
    b[0] = ONE;
    b[1] = linear;
    for n in 2..n_levels {
        let nf = n as f64;
        b[n] = (linear * b[n - 1] + quadratic * 2.0 * (nf - 1.0).sqrt() * b[n - 2]) / nf.sqrt();
    }
    StateVector::new(dim, b)
}

/// Closed form of D(x/√2)S(r)|0⟩ as a single Gaussian exponential on the vacuum:
/// μ^{−1/2} exp[−(x²/4)(1 + ν/μ)] exp[−(ν/2μ)â†² + (x/√2)(1 + ν/μ)â†]|0⟩.
pub fn caves_closed_form_state(x: f64, r: f64, dim: FockDim) -> Result<StateVector> {
    let x = PositionValue::new(x)?.value();
    let (mu, nu) = mu_nu(r)?;
    population_guard(Complex64::new(x / SQRT_2, 0.0), r, dim)?;
    let ratio = nu / mu;
    let prefactor = (-(x * x / 4.0) * (1.0 + ratio)).exp() / mu.sqrt();
    let state = gaussian_ladder_state(
        Complex64::new(-ratio / 2.0, 0.0),
        Complex64::new(x / SQRT_2 * (1.0 + ratio), 0.0),
        dim,
    )?;
    Ok(state.scale(Complex64::new(prefactor, 0.0)))
}

/// Normalized e^{−(ν/2μ)â†²}|0⟩: the extreme-squeezing limit of the Yuen
/// ordering, which carries no position label at all.
pub fn yuen_limit_state(r: f64, dim: FockDim) -> Result<StateVector> {
    let (mu, nu) = mu_nu(r)?;
    squeeze_guard(r, dim)?;
    gaussian_ladder_state(Complex64::new(-nu / (2.0 * mu), 0.0), ZERO, dim)?.normalize()
}

/// Whether |x| ≤ √(N/2), the range where the truncated approximant resolves x.
pub fn position_in_range(x: f64, dim: FockDim) -> bool {
    x.abs() <= (dim.n_levels() as f64 / 2.0).sqrt()
}

/// Unnormalized position-eigenstate approximant Σ_{n<N} ψ_n(x)|n⟩.
pub fn position_eigenstate(x: f64, dim: FockDim, form: PositionForm) -> Result<StateVector> {
    let x = PositionValue::new(x)?.value();
    let n_levels = dim.n_levels();
    let prefactor = PI.powf(-0.25);
    match form {
        PositionForm::Hermite => StateVector::from_real(dim, &hermite_functions(x, n_levels)),
        PositionForm::Operator => {
            let ad = build_creation(dim);
            let gen = ad
                .matmul(&ad)?
                .scale_real(-0.5)
                .add(&ad.scale_real(SQRT_2 * x))?;
            let column = expm(&gen)?.apply(&StateVector::vacuum(dim))?;
            Ok(column.scale(Complex64::new(prefactor * (-0.5 * x * x).exp(), 0.0)))
        }
        PositionForm::Coherent => {
            let beta = SQRT_2 * x;
            coherent_guard(Complex64::new(beta, 0.0), dim)?;
            // e^{x²/2}·e^{−|β|²/2} = e^{−x²/2} multiplies everything; the
            // alternating sum itself is accumulated in double-double.
            let amps = squeeze_coherent_dd(x, n_levels);
            let scale = prefactor * (-0.5 * x * x).exp();
            StateVector::from_real(dim, &amps.iter().map(|v| v * scale).collect::<Vec<_>>())
        }
    }
}

/// (e^{−â†²/2} Σ_k β^k/√k! |k⟩)_n for β = √2x, in double-double precision.
fn squeeze_coherent_dd(x: f64, n_levels: usize) -> Vec<f64> {
    let beta = Dd::new(2.0).sqrt() * x;
    let mut coh = Vec::with_capacity(n_levels);
    coh.push(Dd::ONE);
    for k in 1..n_levels {
        let prev = coh[k - 1];
        coh.push(prev * beta / Dd::new(k as f64).sqrt());
    }
    (0..n_levels)
        .map(|n| {
            // ⟨n|e^{−â†²/2}|n−2j⟩ = (−1/2)^j/j! √(n!/(n−2j)!)
            let mut entry = Dd::ONE;
            let mut acc = coh[n];
            for j in 1..=n / 2 {
                let k = n - 2 * j;
                let lift = (Dd::new((k + 1) as f64) * Dd::new((k + 2) as f64)).sqrt();
                entry = entry * lift * (-0.5) / Dd::new(j as f64);
                acc = acc + entry * coh[k];
            }
            acc.to_f64()
        })
        .collect()
}

/// Unnormalized momentum-eigenstate approximant Σ_{n<N} iⁿ ψ_n(p)|n⟩,
/// the vacuum image of e^{+â†²/2 + i√2 p â†} up to e^{−p²/2}π^{−1/4}.
pub fn momentum_eigenstate(p: f64, dim: FockDim) -> Result<StateVector> {
    let p = PositionValue::new(p)?.value();
    let psi = hermite_functions(p, dim.n_levels());
    let mut phase = ONE;
    let amps = psi
        .iter()
        .map(|&v| {
            let z = phase * v;
            phase *= I;
            z
        })
        .collect();
    StateVector::new(dim, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_quadrature_x, fidelity, interior_deviation};

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn mu_nu_values() {
        assert_eq!(mu_nu(0.0).unwrap(), (1.0, 0.0));
        let (mu, nu) = mu_nu(1.0).unwrap();
        assert!((mu - 1.5430806348152437).abs() < 1e-15);
        assert!((nu - 1.1752011936438014).abs() < 1e-15);
        let (mu, nu) = mu_nu(0.7).unwrap();
        assert!((mu - nu - (-0.7f64).exp()).abs() < 1e-14);
        assert!((mu * mu - nu * nu - 1.0).abs() < 1e-14);
        assert!(mu_nu(5.5).is_err());
        assert!(mu_nu(f64::NAN).is_err());
    }

    #[test]
    fn coherent_basics() {
        let d = dim(64);
        assert_eq!(coherent_state(0.0, d).unwrap(), StateVector::vacuum(d));
        let one = coherent_state(1.0, d).unwrap();
        assert!((one.amp(0).re - 0.6065306597126334).abs() < 1e-15);
        assert!((one.norm() - 1.0).abs() < 1e-12);
        let v = coherent_state(0.8, d).unwrap();
        let a = build_annihilation(d);
        let resid = a.apply(&v).unwrap().sub(&v.scale(Complex64::new(0.8, 0.0))).unwrap();
        assert!(resid.norm() <= 1e-10);
    }

    #[test]
    fn coherent_guard_trips() {
        let err = coherent_state(6.0, dim(32)).unwrap_err();
        assert!(matches!(err, FockError::TruncationInsufficient { .. }));
        assert!(coherent_state(2.0, dim(64)).is_ok());
    }

    #[test]
    fn displacement_forms() {
        let d = dim(64);
        assert_eq!(
            displacement_operator(0.0, d, DisplacementForm::Exponential).unwrap(),
            FockOperator::identity(d)
        );
        let disp = displacement_operator(1.0, d, DisplacementForm::Exponential).unwrap();
        let v = disp.apply(&StateVector::vacuum(d)).unwrap();
        assert!(v.max_abs_diff(&coherent_state(1.0, d).unwrap()).unwrap() <= 1e-10);

        let d = dim(96);
        let e = displacement_operator(1.2, d, DisplacementForm::Exponential).unwrap();
        let n = displacement_operator(1.2, d, DisplacementForm::Antinormal).unwrap();
        // the antinormal product cancels terms of size ~e^{2|α|√n}, so stay low
        let (abs_dev, _) = interior_deviation(&e, &n, 24).unwrap();
        assert!(abs_dev <= 1e-9, "{abs_dev}");
        // unitary on the interior block
        let uu = e.dagger().matmul(&e).unwrap();
        let (dev, _) = interior_deviation(&FockOperator::identity(d), &uu, 48).unwrap();
        assert!(dev <= 1e-10, "{dev}");
    }

    #[test]
    fn squeeze_vacuum_properties() {
        let d = dim(64);
        assert_eq!(
            squeeze_operator(0.0, d, SqueezeForm::Exponential).unwrap(),
            FockOperator::identity(d)
        );
        let s = squeeze_operator(0.5, d, SqueezeForm::Exponential).unwrap();
        let v = s.apply(&StateVector::vacuum(d)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-8);
        for n in (1..64).step_by(2) {
            assert!(v.amp(n).norm() <= 1e-14);
        }
        assert!((v.amp(0).re - 1.0 / 0.5f64.cosh().sqrt()).abs() < 1e-10);
    }

    #[test]
    fn squeeze_forms_agree_on_interior() {
        let d = dim(128);
        for &r in &[-1.0, -0.4, 0.25, 1.0] {
            let e = squeeze_operator(r, d, SqueezeForm::Exponential).unwrap();
            let f = squeeze_operator(r, d, SqueezeForm::Factored).unwrap();
            let (dev, _) = interior_deviation(&e, &f, 24).unwrap();
            assert!(dev <= 1e-9, "r = {r}: {dev}");
        }
    }

    #[test]
    fn yuen_reduces_to_coherent_and_squeezed_vacuum() {
        let d = dim(64);
        let y = yuen_state(0.7, 0.0, d).unwrap();
        assert!(y.max_abs_diff(&coherent_state(0.7, d).unwrap()).unwrap() < 1e-12);
        let y0 = yuen_state(0.0, 0.6, d).unwrap();
        // ⟨2n|S(r)|0⟩ = (−tanh r / 2)^n √((2n)!)/n! / √cosh r
        let r = 0.6f64;
        let mut c = 1.0 / r.cosh().sqrt();
        for n in 0..32 {
            assert!((y0.amp(2 * n) - c).norm() < 1e-14, "n = {n}");
            assert!(y0.amp(2 * n + 1).norm() < 1e-14);
            c *= -r.tanh() / 2.0 * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt() / (n + 1) as f64;
        }
    }

    #[test]
    fn yuen_mean_quadrature() {
        let d = dim(128);
        let y = yuen_state(1.0, 0.5, d).unwrap();
        assert!((y.norm() - 1.0).abs() < 1e-8);
        let mean = build_quadrature_x(d).expectation(&y).unwrap().re;
        assert!((mean - (-0.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn caves_amplitudes() {
        let a = caves_amplitude(0.9, 0.4).unwrap();
        assert!((a - Complex64::new(0.9 * (-0.4f64).exp(), 0.0)).norm() < 1e-15);
        let a = caves_amplitude(I, 1.0).unwrap();
        let (mu, nu) = mu_nu(1.0).unwrap();
        assert!((a - I * (mu + nu)).norm() < 1e-15);
        assert!((a.im - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn caves_matches_yuen() {
        let d = dim(128);
        let r = 0.8;
        let y = yuen_state(1.0, r, d).unwrap();
        let c = caves_state((-r).exp(), r, d).unwrap();
        assert!(fidelity(&y, &c).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn caves_closed_form_limits() {
        let d = dim(64);
        let v = caves_closed_form_state(0.0, 0.0, d).unwrap();
        assert!(v.max_abs_diff(&StateVector::vacuum(d)).unwrap() < 1e-15);
        let v = caves_closed_form_state(1.0, 0.0, d).unwrap();
        let c = coherent_state(1.0 / SQRT_2, d).unwrap();
        assert!(v.max_abs_diff(&c).unwrap() < 1e-14);
    }

    #[test]
    fn caves_closed_form_vs_operator_product() {
        let d = dim(128);
        let closed = caves_closed_form_state(1.0, 1.0, d).unwrap();
        let direct = caves_state(1.0 / SQRT_2, 1.0, d).unwrap();
        assert!((closed.norm() - 1.0).abs() <= 1e-6);
        assert!(fidelity(&closed, &direct).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn yuen_limit_is_squeezed_vacuum() {
        let d = dim(128);
        assert!(yuen_limit_state(0.0, d)
            .unwrap()
            .max_abs_diff(&StateVector::vacuum(d))
            .unwrap()
            .eq(&0.0));
        let lim = yuen_limit_state(1.0, d).unwrap();
        for n in (1..128).step_by(2) {
            assert!(lim.amp(n).norm() <= 1e-14);
        }
        let sv = squeeze_operator(1.0, d, SqueezeForm::Exponential)
            .unwrap()
            .apply(&StateVector::vacuum(d))
            .unwrap();
        assert!(fidelity(&lim, &sv).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn position_forms_agree() {
        let d = dim(64);
        for &x in &[0.0, 1.0, -1.0, 2.0, -2.0] {
            let h = position_eigenstate(x, d, PositionForm::Hermite).unwrap();
            let o = position_eigenstate(x, d, PositionForm::Operator).unwrap();
            let c = position_eigenstate(x, d, PositionForm::Coherent).unwrap();
            let ho = h.max_abs_diff(&o).unwrap();
            let hc = h.max_abs_diff(&c).unwrap();
            assert!(ho <= 1e-10, "x = {x}: hermite/operator {ho:e}");
            assert!(hc <= 1e-10, "x = {x}: hermite/coherent {hc:e}");
        }
    }

    #[test]
    fn position_at_origin() {
        let v = position_eigenstate(0.0, dim(16), PositionForm::Hermite).unwrap();
        assert!((v.amp(0).re - 0.7511255444649425).abs() < 1e-15);
        for n in (1..16).step_by(2) {
            assert_eq!(v.amp(n), ZERO);
        }
    }

    #[test]
    fn momentum_phase_pattern() {
        let d = dim(32);
        let p = momentum_eigenstate(0.0, d).unwrap();
        let x = position_eigenstate(0.0, d, PositionForm::Hermite).unwrap();
        for n in 0..32 {
            let sign = match n % 4 {
                0 => 1.0,
                2 => -1.0,
                _ => 0.0,
            };
            assert!((p.amp(n) - x.amp(n) * sign).norm() < 1e-15, "n = {n}");
        }
    }
}
