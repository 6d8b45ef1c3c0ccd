//! Dense complex matrix exponential.
//!
//! Scaling and squaring with diagonal Padé approximants of degree 3, 5, 7, 9
//! or 13, selected from the 1-norm. The θ thresholds bound the backward
//! error of the scaled approximant by the double-precision unit roundoff.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::fock::{FockOperator, Tolerances, ZERO};

const UNIT_ROUNDOFF: f64 = 1.1102230246251565e-16;
const MAX_SQUARINGS: i32 = 1000;

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// exp(op) with backward error below `tol.expm_tol`.
///
/// Fails with [`FockError::NonConvergence`] when the requested bound is below
/// what double precision can certify, when the input is not finite, or when
/// the result overflows.
pub fn matrix_exponential(op: &FockOperator, tol: &Tolerances) -> Result<FockOperator> {
    if tol.expm_tol < UNIT_ROUNDOFF {
        return Err(FockError::NonConvergence(format!(
            "expm_tol {:e} is below the unit roundoff {:e}",
            tol.expm_tol, UNIT_ROUNDOFF
        )));
    }
    let out = expm_dense(op.entries())?;
    Ok(FockOperator::from_parts(op.dim(), out))
}

pub(crate) fn expm_dense(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.iter().any(|z| !z.is_finite()) {
        return Err(FockError::NonConvergence("non-finite input entry".into()));
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(Array2::eye(n));
    }

    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            let p = pade_low(a, m);
            return finish(p);
        }
    }

    let theta13 = THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(FockError::NonConvergence(format!("1-norm {norm:e} needs {s} squarings")));
    }
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);
    let mut x = pade13(&scaled)?;
    for _ in 0..s {
        x = x.dot(&x);
    }
    finish(Ok(x))
}

/// e^{A}v for a generator known only through its action `apply`, given a
/// bound on ‖A‖₁. The interval is split into ⌈bound⌉ substeps so every Taylor
/// term is at most 1/k! of the current vector, then each series is summed
/// until its terms drop below the unit roundoff.
pub fn expm_action(
    apply: impl Fn(&Array1<Complex64>) -> Array1<Complex64>,
    v: &Array1<Complex64>,
    norm_bound: f64,
) -> Result<Array1<Complex64>> {
    const MAX_TERMS: usize = 60;
    const MAX_STEPS: f64 = 1e7;
    if !norm_bound.is_finite() || norm_bound < 0.0 || v.iter().any(|z| !z.is_finite()) {
        return Err(FockError::NonConvergence("non-finite generator bound or vector".into()));
    }
    if norm_bound > MAX_STEPS {
        return Err(FockError::NonConvergence(format!("generator bound {norm_bound:e} needs too many substeps")));
    }
    let steps = norm_bound.ceil().max(1.0) as usize;
    let l1 = |x: &Array1<Complex64>| x.iter().map(|z| z.norm()).sum::<f64>();
    let mut w = v.clone();
    for _ in 0..steps {
        let mut term = w.clone();
        let mut acc = w.clone();
        let mut converged = false;
        for k in 1..=MAX_TERMS {
            term = apply(&term) / Complex64::new((steps * k) as f64, 0.0);
            acc += &term;
            if l1(&term) <= UNIT_ROUNDOFF * l1(&acc) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FockError::NonConvergence("Taylor series of a substep did not settle".into()));
        }
        w = acc;
    }
    if w.iter().any(|z| !z.is_finite()) {
        return Err(FockError::NonConvergence("result overflowed".into()));
    }
    Ok(w)
}

fn finish(x: Result<Array2<Complex64>>) -> Result<Array2<Complex64>> {
    let x = x?;
    if x.iter().any(|z| !z.is_finite()) {
        return Err(FockError::NonConvergence("result overflowed".into()));
    }
    Ok(x)
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn axpy_eye(m: &mut Array2<Complex64>, c: f64) {
    for i in 0..m.nrows() {
        m[[i, i]] += c;
    }
}

fn lin_comb(terms: &[(f64, &Array2<Complex64>)], n: usize) -> Array2<Complex64> {
    let mut out = Array2::from_elem((n, n), ZERO);
    for &(c, m) in terms {
        Zip::from(&mut out).and(m).for_each(|o, &x| *o += x * c);
    }
    out
}

fn pade_low(a: &Array2<Complex64>, m: usize) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        9 => &B9,
        _ => unreachable!("unsupported Padé degree {m}"),
    };
    let a2 = a.dot(a);
    // even powers A^0, A^2, ..., A^{m-1}
    let mut powers = vec![a2.clone()];
    while powers.len() < (m - 1) / 2 {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u_inner = Array2::from_elem((n, n), ZERO);
    let mut v = Array2::from_elem((n, n), ZERO);
    axpy_eye(&mut u_inner, b[1]);
    axpy_eye(&mut v, b[0]);
    for (k, p) in powers.iter().enumerate() {
        let deg = 2 * (k + 1);
        Zip::from(&mut u_inner).and(p).for_each(|o, &x| *o += x * b[deg + 1]);
        Zip::from(&mut v).and(p).for_each(|o, &x| *o += x * b[deg]);
    }
    let u = a.dot(&u_inner);
    solve_pade(u, v)
}

fn pade13(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let b = &B13;
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = lin_comb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let mut w2 = lin_comb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], n);
    axpy_eye(&mut w2, b[1]);
    let u = a.dot(&(a6.dot(&w1) + &w2));

    let z1 = lin_comb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let mut z2 = lin_comb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], n);
    axpy_eye(&mut z2, b[0]);
    let v = a6.dot(&z1) + &z2;
    solve_pade(u, v)
}

/// Solves (V − U) X = (V + U).
fn solve_pade(u: Array2<Complex64>, v: Array2<Complex64>) -> Result<Array2<Complex64>> {
    let p = &v + &u;
    let q = v - u;
    lu_solve(q, p)
}

/// Gaussian elimination with partial pivoting, solving A X = B in place.
fn lu_solve(mut a: Array2<Complex64>, mut b: Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let m = b.ncols();
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[[r, col]].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs == 0.0 || !piv_abs.is_finite() {
            return Err(FockError::NonConvergence("singular Padé denominator".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap([col, j], [piv, j]);
            }
            for j in 0..m {
                b.swap([col, j], [piv, j]);
            }
        }
        let pivot = a[[col, col]];
        for r in (col + 1)..n {
            let factor = a[[r, col]] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let t = a[[col, j]];
                a[[r, j]] -= factor * t;
            }
            for j in 0..m {
                let t = b[[col, j]];
                b[[r, j]] -= factor * t;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = a[[col, col]];
        for j in 0..m {
            let mut acc = b[[col, j]];
            for k in (col + 1)..n {
                acc -= a[[col, k]] * b[[k, j]];
            }
            b[[col, j]] = acc / pivot;
        }
    }
    Ok(b)
}
