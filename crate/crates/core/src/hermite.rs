//! Normalized Hermite functions ψ_n(x) = (2ⁿ n! √π)^{-1/2} e^{−x²/2} H_n(x).

use std::f64::consts::PI;

/// ψ_0(x) .. ψ_{count−1}(x) by the normalized three-term recursion
/// ψ_n = x√(2/n) ψ_{n−1} − √((n−1)/n) ψ_{n−2}.
///
/// Never forms H_n or n! directly, so it stays finite far beyond n ≈ 150.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(count);
    if count == 0 {
        return psi;
    }
    psi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if count == 1 {
        return psi;
    }
    psi.push(std::f64::consts::SQRT_2 * x * psi[0]);
    for n in 2..count {
        let nf = n as f64;
        let next = x * (2.0 / nf).sqrt() * psi[n - 1] - ((nf - 1.0) / nf).sqrt() * psi[n - 2];
        psi.push(next);
    }
    psi
}
