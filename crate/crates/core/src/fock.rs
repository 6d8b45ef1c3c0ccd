//! Truncated number-basis linear algebra.
//!
//! Basis states are |0⟩..|N−1⟩. Ladder operators use a hard cutoff at the
//! truncation edge (a†|N−1⟩ = 0), so every operator stays square and identities
//! are compared on the top-left interior block only.

use ndarray::{s, Array1, Array2, ArrayView2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance on |‖v‖ − 1| for a state to count as normalized.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// Number of basis levels N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(n_levels: usize) -> Result<Self> {
        if n_levels < 2 {
            return Err(FockError::InvalidDimension(n_levels));
        }
        Ok(FockDim(n_levels))
    }

    #[inline]
    pub fn n_levels(self) -> usize {
        self.0
    }

    /// Default interior buffer: a quarter of the basis.
    pub fn default_buffer(self) -> usize {
        (self.0 / 4).max(1)
    }

    fn check(self, other: FockDim) -> Result<()> {
        if self != other {
            return Err(FockError::DimensionMismatch {
                left: self.0,
                right: other.0,
            });
        }
        Ok(())
    }
}

impl TryFrom<usize> for FockDim {
    type Error = FockError;

    fn try_from(n: usize) -> Result<Self> {
        FockDim::new(n)
    }
}

impl From<FockDim> for usize {
    fn from(d: FockDim) -> usize {
        d.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Backward-error bound requested from the matrix exponential.
    pub expm_tol: f64,
    /// Assertion threshold used by comparisons.
    pub compare_tol: f64,
    /// Rows/columns dropped at the truncation edge.
    pub interior_buffer: usize,
}

impl Tolerances {
    pub fn new(expm_tol: f64, compare_tol: f64, interior_buffer: usize, dim: FockDim) -> Result<Self> {
        let tol = Tolerances {
            expm_tol,
            compare_tol,
            interior_buffer,
        };
        tol.validate(dim)?;
        Ok(tol)
    }

    /// expm_tol 1e-13, compare_tol 1e-8 and a buffer of N/4.
    pub fn for_dim(dim: FockDim) -> Self {
        Tolerances {
            expm_tol: 1e-13,
            compare_tol: 1e-8,
            interior_buffer: dim.default_buffer(),
        }
    }

    pub fn validate(&self, dim: FockDim) -> Result<()> {
        if !(self.expm_tol > 0.0 && self.expm_tol.is_finite()) {
            return Err(FockError::param("expm_tol", format!("must be positive, got {}", self.expm_tol)));
        }
        if !(self.compare_tol > 0.0 && self.compare_tol.is_finite()) {
            return Err(FockError::param(
                "compare_tol",
                format!("must be positive, got {}", self.compare_tol),
            ));
        }
        if self.interior_buffer == 0 || 2 * self.interior_buffer >= dim.n_levels() {
            return Err(FockError::param(
                "interior_buffer",
                format!(
                    "must satisfy 0 < buffer < N/2 (buffer {}, N {})",
                    self.interior_buffer,
                    dim.n_levels()
                ),
            ));
        }
        Ok(())
    }

    /// Size of the interior block kept for comparisons.
    pub fn interior(&self, dim: FockDim) -> usize {
        dim.n_levels() - self.interior_buffer
    }
}

/// Complex amplitudes over the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: FockDim,
    amps: Array1<Complex64>,
}

impl StateVector {
    pub fn new(dim: FockDim, amps: Array1<Complex64>) -> Result<Self> {
        if amps.len() != dim.n_levels() {
            return Err(FockError::DimensionMismatch {
                left: dim.n_levels(),
                right: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.is_finite()) {
            return Err(FockError::param("amps", "non-finite amplitude"));
        }
        Ok(StateVector { dim, amps })
    }

    pub fn from_real(dim: FockDim, amps: &[f64]) -> Result<Self> {
        Self::new(dim, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: FockDim) -> Self {
        StateVector {
            dim,
            amps: Array1::zeros(dim.n_levels()),
        }
    }

    /// Number state |n⟩.
    pub fn basis(dim: FockDim, n: usize) -> Result<Self> {
        if n >= dim.n_levels() {
            return Err(FockError::param("n", format!("level {n} outside basis of {}", dim.n_levels())));
        }
        let mut v = Self::zeros(dim);
        v.amps[n] = ONE;
        Ok(v)
    }

    pub fn vacuum(dim: FockDim) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[0] = ONE;
        v
    }

    #[inline]
    pub fn dim(&self) -> FockDim {
        self.dim
    }

    #[inline]
    pub fn amps(&self) -> &Array1<Complex64> {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn into_amps(self) -> Array1<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORMALIZED_TOL
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(FockError::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        StateVector {
            dim: self.dim,
            amps: &self.amps * c,
        }
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.dim.check(other.dim)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(u, v)| u.conj() * v)
            .sum())
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        self.dim.check(other.dim)?;
        Ok(StateVector {
            dim: self.dim,
            amps: &self.amps - &other.amps,
        })
    }

    /// Squared weight carried by the last `band` levels.
    pub fn tail_mass(&self, band: usize) -> f64 {
        let n = self.dim.n_levels();
        let start = n.saturating_sub(band);
        self.amps.slice(s![start..]).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.dim.check(other.dim)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max))
    }
}

pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    u.inner(v)
}

pub fn norm(v: &StateVector) -> f64 {
    v.norm()
}

pub fn normalize(v: &StateVector) -> Result<StateVector> {
    v.normalize()
}

/// |⟨u|v⟩|² / (‖u‖²‖v‖²), clamped to [0, 1].
pub fn fidelity(u: &StateVector, v: &StateVector) -> Result<f64> {
    let uu = u.norm_sqr();
    let vv = v.norm_sqr();
    if uu == 0.0 || vv == 0.0 {
        return Err(FockError::ZeroNorm);
    }
    let f = u.inner(v)?.norm_sqr() / (uu * vv);
    Ok(f.clamp(0.0, 1.0))
}

pub fn apply(op: &FockOperator, v: &StateVector) -> Result<StateVector> {
    op.apply(v)
}

/// Dense N×N operator on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: FockDim,
    entries: Array2<Complex64>,
}

impl FockOperator {
    pub fn new(dim: FockDim, entries: Array2<Complex64>) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(FockError::DimensionMismatch { left: r, right: c });
        }
        if r != dim.n_levels() {
            return Err(FockError::DimensionMismatch {
                left: dim.n_levels(),
                right: r,
            });
        }
        Ok(FockOperator { dim, entries })
    }

    pub(crate) fn from_parts(dim: FockDim, entries: Array2<Complex64>) -> Self {
        debug_assert_eq!(entries.dim(), (dim.n_levels(), dim.n_levels()));
        FockOperator { dim, entries }
    }

    pub fn zeros(dim: FockDim) -> Self {
        let n = dim.n_levels();
        FockOperator {
            dim,
            entries: Array2::zeros((n, n)),
        }
    }

    pub fn identity(dim: FockDim) -> Self {
        FockOperator {
            dim,
            entries: Array2::eye(dim.n_levels()),
        }
    }

    pub fn diagonal(dim: FockDim, diag: impl Fn(usize) -> Complex64) -> Self {
        let mut op = Self::zeros(dim);
        for n in 0..dim.n_levels() {
            op.entries[[n, n]] = diag(n);
        }
        op
    }

    #[inline]
    pub fn dim(&self) -> FockDim {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[[row, col]]
    }

    pub fn dagger(&self) -> Self {
        FockOperator {
            dim: self.dim,
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    pub fn matmul(&self, other: &FockOperator) -> Result<Self> {
        self.dim.check(other.dim)?;
        Ok(FockOperator {
            dim: self.dim,
            entries: self.entries.dot(&other.entries),
        })
    }

    /// Product of a sequence of operators, left to right.
    pub fn product(ops: &[&FockOperator]) -> Result<Self> {
        let (first, rest) = ops
            .split_first()
            .ok_or_else(|| FockError::param("ops", "empty product"))?;
        rest.iter().try_fold((*first).clone(), |acc, op| acc.matmul(op))
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        self.dim.check(other.dim)?;
        Ok(FockOperator {
            dim: self.dim,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.dim.check(other.dim)?;
        Ok(FockOperator {
            dim: self.dim,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FockOperator {
            dim: self.dim,
            entries: &self.entries * c,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &FockOperator) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.dim), |acc, _| {
            FockOperator {
                dim: self.dim,
                entries: acc.entries.dot(&self.entries),
            }
        })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.dim.check(v.dim())?;
        Ok(StateVector {
            dim: self.dim,
            amps: self.entries.dot(v.amps()),
        })
    }

    /// ⟨v|self|v⟩ without normalization.
    pub fn expectation(&self, v: &StateVector) -> Result<Complex64> {
        v.inner(&self.apply(v)?)
    }

    /// Top-left `k`×`k` block.
    pub fn interior(&self, k: usize) -> ArrayView2<'_, Complex64> {
        let k = k.min(self.dim.n_levels());
        self.entries.slice(s![..k, ..k])
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.entries.view())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim.n_levels();
        (0..n).all(|i| (0..n).all(|j| (self.entries[[i, j]] - self.entries[[j, i]].conj()).norm() <= tol))
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.is_finite())
    }
}

pub(crate) fn max_abs(m: ArrayView2<'_, Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deviation of `candidate` from `reference` on the top-left `k`×`k` block.
///
/// Returns `(abs_dev, rel_dev)` where `rel_dev` divides by the largest entry
/// modulus of the reference block.
pub fn interior_deviation(reference: &FockOperator, candidate: &FockOperator, k: usize) -> Result<(f64, f64)> {
    reference.dim.check(candidate.dim)?;
    let r = reference.interior(k);
    let c = candidate.interior(k);
    let abs_dev = r
        .iter()
        .zip(c.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let scale = max_abs(r);
    let rel_dev = if scale > 0.0 { abs_dev / scale } else { abs_dev };
    Ok((abs_dev, rel_dev))
}

/// â with ⟨n−1|â|n⟩ = √n.
pub fn build_annihilation(dim: FockDim) -> FockOperator {
    let mut op = FockOperator::zeros(dim);
    for n in 1..dim.n_levels() {
        op.entries[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    op
}

/// â†, with the hard cutoff â†|N−1⟩ = 0.
pub fn build_creation(dim: FockDim) -> FockOperator {
    build_annihilation(dim).dagger()
}

pub fn build_number(dim: FockDim) -> FockOperator {
    FockOperator::diagonal(dim, |n| Complex64::new(n as f64, 0.0))
}

/// X̂ = (â + â†)/2.
pub fn build_quadrature_x(dim: FockDim) -> FockOperator {
    let a = build_annihilation(dim);
    a.add(&a.dagger()).expect("same dim").scale_real(0.5)
}

/// Ŷ = (â − â†)/(2i).
pub fn build_quadrature_y(dim: FockDim) -> FockOperator {
    let a = build_annihilation(dim);
    a.sub(&a.dagger())
        .expect("same dim")
        .scale(Complex64::new(0.0, -0.5))
}

/// x̂ = √2 X̂.
pub fn build_position(dim: FockDim) -> FockOperator {
    build_quadrature_x(dim).scale_real(std::f64::consts::SQRT_2)
}

/// p̂ = √2 Ŷ.
pub fn build_momentum(dim: FockDim) -> FockOperator {
    build_quadrature_y(dim).scale_real(std::f64::consts::SQRT_2)
}
