//! Closed-form moments, overlaps and Husimi Q values, each paired with a
//! numerical counterpart evaluated on truncated state vectors.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::fock::{build_quadrature_x, build_quadrature_y, FockDim, StateVector};
use crate::states::{coherent_state, position_eigenstate, yuen_state, PositionForm};

/// Normalization tolerance accepted by [`moments_numeric`].
pub const MOMENTS_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
}

impl QuadratureMoments {
    pub fn delta_x(&self) -> f64 {
        self.var_x.max(0.0).sqrt()
    }

    pub fn delta_y(&self) -> f64 {
        self.var_y.max(0.0).sqrt()
    }

    /// ΔX·ΔY, bounded below by 1/4.
    pub fn uncertainty_product(&self) -> f64 {
        self.delta_x() * self.delta_y()
    }
}

/// Quadrature means and variances of a normalized state on the truncated space.
pub fn moments_numeric(v: &StateVector) -> Result<QuadratureMoments> {
    let norm = v.norm();
    if (norm - 1.0).abs() > MOMENTS_NORM_TOL {
        return Err(FockError::Unnormalized(norm));
    }
    let dim = v.dim();
    let xv = build_quadrature_x(dim).apply(v)?;
    let yv = build_quadrature_y(dim).apply(v)?;
    // truncated X̂, Ŷ are exactly Hermitian, so ⟨X̂²⟩ = ‖X̂v‖²
    let mean_x = v.inner(&xv)?.re;
    let mean_y = v.inner(&yv)?.re;
    Ok(QuadratureMoments {
        mean_x,
        mean_y,
        var_x: xv.norm_sqr() - mean_x * mean_x,
        var_y: yv.norm_sqr() - mean_y * mean_y,
    })
}

/// First and second quadrature moments of S(r)D(α)|0⟩ in closed form.
pub fn closed_form_moments(alpha: impl Into<Complex64>, r: f64) -> QuadratureMoments {
    let alpha: Complex64 = alpha.into();
    let a2 = alpha * alpha;
    let abs2 = alpha.norm_sqr();
    let mean_x = (-r).exp() * (alpha + alpha.conj()).re / 2.0;
    let second_x = (-2.0 * r).exp() * (1.0 + 2.0 * abs2 + a2.re + a2.conj().re) / 4.0;
    // Ŷ picks up e^{+r} under the same squeeze
    let mean_y = r.exp() * ((alpha - alpha.conj()) / Complex64::new(0.0, 2.0)).re;
    let second_y = (2.0 * r).exp() * (1.0 + 2.0 * abs2 - a2.re - a2.conj().re) / 4.0;
    QuadratureMoments {
        mean_x,
        mean_y,
        var_x: second_x - mean_x * mean_x,
        var_y: second_y - mean_y * mean_y,
    }
}

/// ⟨β|x⟩ = π^{−1/4} exp(−x²/2 − β*²/2 − |β|²/2 + √2 β* x).
pub fn overlap_coherent_position(beta: Complex64, x: f64) -> Complex64 {
    let bc = beta.conj();
    let exponent = -0.5 * x * x - 0.5 * bc * bc - 0.5 * beta.norm_sqr() + SQRT_2 * bc * x;
    PI.powf(-0.25) * exponent.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMode {
    /// The squeezed-state/position overlap in its published form.
    Printed,
    /// The expression fixed by the truncated inner-product oracle.
    Corrected,
}

/// ⟨α; r|x⟩ for the Yuen state S(r)D(α)|0⟩.
///
/// `Printed` evaluates
/// π^{−1/4} exp{½[(2 − e^{2r} − 2e^{−2r})x² + 2√2α*e^{−r}x − α*² − |α|² − r]}
/// verbatim; it agrees with the oracle only at r = 0. `Corrected` evaluates
/// π^{−1/4} e^{r/2} exp[−e^{2r}x²/2 + √2α*e^{r}x − α*²/2 − |α|²/2], the
/// coherent-state wave function with x rescaled to e^{r}x.
pub fn overlap_squeezed_position(alpha: Complex64, r: f64, x: f64, mode: OverlapMode) -> Complex64 {
    let ac = alpha.conj();
    let abs2 = alpha.norm_sqr();
    let exponent = match mode {
        OverlapMode::Printed => {
            let quad = 2.0 - (2.0 * r).exp() - 2.0 * (-2.0 * r).exp();
            0.5 * (quad * x * x + 2.0 * SQRT_2 * ac * (-r).exp() * x - ac * ac - abs2 - r)
        }
        OverlapMode::Corrected => {
            let er = r.exp();
            -0.5 * er * er * x * x + SQRT_2 * ac * er * x - 0.5 * ac * ac - 0.5 * abs2 + 0.5 * r
        }
    };
    PI.powf(-0.25) * exponent.exp()
}

/// Coefficients of ln⟨α; r|x⟩ = constant + linear·x + quadratic·x².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCoefficients {
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
}

impl GaussianCoefficients {
    /// Coefficients implied by [`overlap_squeezed_position`] for real α.
    pub fn of_mode(alpha: f64, r: f64, mode: OverlapMode) -> Self {
        let ln_pi = -0.25 * PI.ln();
        match mode {
            OverlapMode::Printed => GaussianCoefficients {
                quadratic: 0.5 * (2.0 - (2.0 * r).exp() - 2.0 * (-2.0 * r).exp()),
                linear: SQRT_2 * alpha * (-r).exp(),
                constant: ln_pi - alpha * alpha - 0.5 * r,
            },
            OverlapMode::Corrected => GaussianCoefficients {
                quadratic: -0.5 * (2.0 * r).exp(),
                linear: SQRT_2 * alpha * r.exp(),
                constant: ln_pi - alpha * alpha + 0.5 * r,
            },
        }
    }
}

/// Truncated inner product ⟨α; r|x⟩_N between the Yuen state and the
/// unnormalized Hermite approximant.
pub fn overlap_squeezed_position_numeric(alpha: f64, r: f64, x: f64, dim: FockDim) -> Result<Complex64> {
    let state = yuen_state(alpha, r, dim)?;
    let pos = position_eigenstate(x, dim, PositionForm::Hermite)?;
    state.inner(&pos)
}

/// Reads the Gaussian coefficients of ln⟨α; r|x⟩ off the numerical oracle.
///
/// The log-overlap is exactly quadratic in x, so three samples at
/// x ∈ {−h, 0, h} determine it.
pub fn fit_overlap_coefficients(alpha: f64, r: f64, h: f64, dim: FockDim) -> Result<GaussianCoefficients> {
    let ln = |x: f64| -> Result<f64> {
        let z = overlap_squeezed_position_numeric(alpha, r, x, dim)?;
        if z.re <= 0.0 {
            return Err(FockError::param("overlap", format!("non-positive overlap {z} at x = {x}")));
        }
        Ok(z.re.ln())
    };
    let (lm, l0, lp) = (ln(-h)?, ln(0.0)?, ln(h)?);
    Ok(GaussianCoefficients {
        quadratic: (lp + lm - 2.0 * l0) / (2.0 * h * h),
        linear: (lp - lm) / (2.0 * h),
        constant: l0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapAdjudicationRow {
    pub alpha: f64,
    pub r: f64,
    pub x: f64,
    pub oracle: f64,
    pub printed: f64,
    pub corrected: f64,
    pub printed_dev: f64,
    pub corrected_dev: f64,
}

/// Printed-mode and corrected-mode values against the truncated inner product.
///
/// Rows are ordered α-major, then r, then x.
pub fn adjudicate_overlap(alphas: &[f64], rs: &[f64], xs: &[f64], dim: FockDim) -> Result<Vec<OverlapAdjudicationRow>> {
    let positions = xs
        .iter()
        .map(|&x| position_eigenstate(x, dim, PositionForm::Hermite))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| rs.iter().map(move |&r| (a, r))).collect();
    let blocks = pairs
        .into_par_iter()
        .map(|(alpha, r)| {
            let state = yuen_state(alpha, r, dim)?;
            let a = Complex64::new(alpha, 0.0);
            xs.iter()
                .zip(&positions)
                .map(|(&x, pos)| {
                    let oracle = state.inner(pos)?;
                    let printed = overlap_squeezed_position(a, r, x, OverlapMode::Printed);
                    let corrected = overlap_squeezed_position(a, r, x, OverlapMode::Corrected);
                    Ok(OverlapAdjudicationRow {
                        alpha,
                        r,
                        x,
                        oracle: oracle.re,
                        printed: printed.re,
                        corrected: corrected.re,
                        printed_dev: (printed - oracle).norm(),
                        corrected_dev: (corrected - oracle).norm(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Q(β) = π^{−3/2} exp[−x² − |β|² − Re(β*²) + 2√2 Re(β) x].
pub fn husimi_q(beta: Complex64, x: f64) -> f64 {
    let bc = beta.conj();
    let exponent = -x * x - beta.norm_sqr() - (bc * bc).re + 2.0 * SQRT_2 * beta.re * x;
    PI.powf(-1.5) * exponent.exp()
}

/// Q(β) = |⟨β|x⟩|²/π through the closed-form coherent/position overlap.
pub fn husimi_q_via_overlap(beta: Complex64, x: f64) -> f64 {
    overlap_coherent_position(beta, x).norm_sqr() / PI
}

/// |⟨β|ψ⟩|²/π for an arbitrary truncated state.
pub fn husimi_numeric(state: &StateVector, beta: Complex64) -> Result<f64> {
    let probe = coherent_state(beta, state.dim())?;
    Ok(probe.inner(state)?.norm_sqr() / PI)
}

/// Husimi Q of the position eigenstate sampled on a rectangle of the β plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub x_param: f64,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
    /// Row-major: `values[i_im * n_re + i_re]`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPeak {
    pub re: f64,
    pub im: f64,
    pub value: f64,
}

impl QGrid {
    pub fn re_step(&self) -> f64 {
        (self.re_range.1 - self.re_range.0) / (self.n_re - 1) as f64
    }

    pub fn im_step(&self) -> f64 {
        (self.im_range.1 - self.im_range.0) / (self.n_im - 1) as f64
    }

    pub fn re_at(&self, i: usize) -> f64 {
        sample(self.re_range, self.n_re, i)
    }

    pub fn im_at(&self, j: usize) -> f64 {
        sample(self.im_range, self.n_im, j)
    }

    pub fn value(&self, i_re: usize, i_im: usize) -> f64 {
        self.values[i_im * self.n_re + i_re]
    }

    /// Largest sample; ties resolve to the first in row-major order.
    pub fn argmax(&self) -> GridPeak {
        let (idx, value) = self
            .values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        GridPeak {
            re: self.re_at(idx % self.n_re),
            im: self.im_at(idx / self.n_re),
            value,
        }
    }

    /// max − min of the samples in column `i_re` (fixed Re β).
    pub fn column_spread(&self, i_re: usize) -> f64 {
        let col = (0..self.n_im).map(|j| self.value(i_re, j));
        let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    pub fn max_column_spread(&self) -> f64 {
        (0..self.n_re).map(|i| self.column_spread(i)).fold(0.0, f64::max)
    }

    /// Maximizes Q along Re β within one grid step of the sampled peak.
    pub fn refine_peak(&self) -> GridPeak {
        let peak = self.argmax();
        let step = self.re_step();
        let lo = (peak.re - step).max(self.re_range.0);
        let hi = (peak.re + step).min(self.re_range.1);
        let f = |u: f64| husimi_q(Complex64::new(u, peak.im), self.x_param);
        let re = golden_section_max(f, lo, hi, 1e-12);
        GridPeak {
            re,
            im: peak.im,
            value: f(re).max(peak.value),
        }
    }
}

fn sample(range: (f64, f64), n: usize, i: usize) -> f64 {
    if i + 1 == n {
        return range.1;
    }
    range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn husimi_grid(x: f64, re_range: (f64, f64), im_range: (f64, f64), n_re: usize, n_im: usize) -> Result<QGrid> {
    if !x.is_finite() {
        return Err(FockError::param("x", "must be finite"));
    }
    if n_re < 2 || n_im < 2 {
        return Err(FockError::param("n_re/n_im", format!("need at least 2 samples per axis, got {n_re}×{n_im}")));
    }
    for (name, (lo, hi)) in [("re_range", re_range), ("im_range", im_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FockError::param(name, format!("degenerate range [{lo}, {hi}]")));
        }
    }
    let mut grid = QGrid {
        x_param: x,
        re_range,
        im_range,
        n_re,
        n_im,
        values: Vec::new(),
    };
    let rows: Vec<Vec<f64>> = (0..n_im)
        .into_par_iter()
        .map(|j| {
            let im = grid.im_at(j);
            (0..n_re).map(|i| husimi_q(Complex64::new(grid.re_at(i), im), x)).collect()
        })
        .collect();
    grid.values = rows.into_iter().flatten().collect();
    Ok(grid)
}
