//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::process::{Command, ExitCode};

use num_complex::Complex64;

use fock_lab::analytics::{
    adjudicate_overlap, closed_form_moments, husimi_grid, husimi_q, husimi_q_via_overlap, moments_numeric,
    overlap_coherent_position,
};
use fock_lab::experiments::{
    caves_limit_study, fidelity_strictly_increasing, weak_eigenvalue_check, yuen_limit_study, yuen_pairwise_fidelity,
};
use fock_lab::states::{
    caves_amplitude, caves_closed_form_state, caves_state, coherent_state, position_eigenstate, yuen_state,
    PositionForm,
};
use fock_lab::verify::{
    integrate_disentangle_ode, ode_order_check, verify_bogoliubov, verify_bogoliubov_with, verify_commutator_a2_n,
    verify_disentangle_with, verify_main_text_variant_with, verify_shift_identity, verify_similarity_scaling,
    verify_squeeze_factorization, verify_squeeze_factorization_with, Interior, VariantWinner, VerifyOptions,
};
use fock_lab::{fidelity, FockDim};

type Outcome = Result<(bool, String), String>;

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

const ALPHAS: [f64; 3] = [0.0, 0.5, 1.0];
const RS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

fn minimum_uncertainty() -> Outcome {
    let d = dim(128);
    let mut worst = 0.0f64;
    for &alpha in &ALPHAS {
        for &r in &RS {
            let m = moments_numeric(&yuen_state(alpha, r, d).map_err(e)?).map_err(e)?;
            let closed = closed_form_moments(alpha, r);
            worst = worst
                .max((m.delta_x() - (-r).exp() / 2.0).abs())
                .max((m.delta_y() - r.exp() / 2.0).abs())
                .max((m.uncertainty_product() - 0.25).abs())
                .max((m.mean_x - closed.mean_x).abs())
                .max((m.mean_y - closed.mean_y).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max deviation {worst:.3e} (tol 1e-8)")))
}

fn yuen_caves_equivalence() -> Outcome {
    let d = dim(128);
    let mut worst = 1.0f64;
    for &alpha in &ALPHAS {
        for &r in &RS {
            let y = yuen_state(alpha, r, d).map_err(e)?;
            let c = caves_state(caves_amplitude(alpha, r).map_err(e)?, r, d).map_err(e)?;
            worst = worst.min(fidelity(&y, &c).map_err(e)?);
        }
    }
    Ok((worst >= 1.0 - 1e-10, format!("min fidelity 1 - {:.3e} (tol 1e-10)", 1.0 - worst)))
}

fn position_triple() -> Outcome {
    let d = dim(64);
    let mut worst = 0.0f64;
    for x in [0.0, 1.0, -1.0, 2.0, -2.0] {
        let h = position_eigenstate(x, d, PositionForm::Hermite).map_err(e)?;
        let o = position_eigenstate(x, d, PositionForm::Operator).map_err(e)?;
        let c = position_eigenstate(x, d, PositionForm::Coherent).map_err(e)?;
        worst = worst.max(h.max_abs_diff(&o).map_err(e)?).max(h.max_abs_diff(&c).map_err(e)?);
    }
    Ok((worst <= 1e-10, format!("max elementwise deviation {worst:.3e} (tol 1e-10)")))
}

fn weak_eigenvalue() -> Outcome {
    let betas: Vec<Complex64> = [0.0, 1.0, -1.0, 2.0, -2.0].iter().map(|&b| Complex64::new(b, 0.0)).collect();
    let mut worst = 0.0f64;
    let mut ratio_ok = true;
    let mut worst_ratio = 0.0f64;
    for x in [0.0, 1.0, -1.0, 2.0, -2.0] {
        let fine = weak_eigenvalue_check(x, &betas, dim(128)).map_err(e)?;
        let coarse = weak_eigenvalue_check(x, &betas, dim(64)).map_err(e)?;
        for (f, c) in fine.iter().zip(&coarse) {
            worst = worst.max(f.weak_residual);
            if f.weak_residual > 1e-12 {
                let ratio = f.weak_residual / c.weak_residual;
                worst_ratio = worst_ratio.max(ratio);
                ratio_ok &= ratio <= 0.5;
            }
        }
    }
    Ok((
        worst <= 1e-8 && ratio_ok,
        format!("max residual {worst:.3e} (tol 1e-8); residuals above the 1e-12 floor: worst 64→128 ratio {worst_ratio:.3e}"),
    ))
}

fn coherent_position_overlap() -> Outcome {
    let d = dim(128);
    let betas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.5, 0.5),
        Complex64::new(0.3, -1.2),
        Complex64::new(0.0, 2.0),
    ];
    let mut worst = 0.0f64;
    for &beta in &betas {
        let probe = coherent_state(beta, d).map_err(e)?;
        for x in [-3.0, -1.5, 0.0, 1.0, 3.0] {
            let pos = position_eigenstate(x, d, PositionForm::Hermite).map_err(e)?;
            let numeric = probe.inner(&pos).map_err(e)?;
            worst = worst.max((numeric - overlap_coherent_position(beta, x)).norm());
        }
    }
    Ok((worst <= 1e-10, format!("25-point max deviation {worst:.3e} (tol 1e-10)")))
}

fn husimi() -> Outcome {
    let peak = PI.powf(-1.5);
    let mut two_route = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let beta = Complex64::new(-3.0 + 0.6 * i as f64, -2.7 + 0.6 * j as f64);
            let x = -3.0 + 0.65 * ((i * 10 + j) % 11) as f64;
            two_route = two_route.max((husimi_q(beta, x) - husimi_q_via_overlap(beta, x)).abs());
        }
    }
    let origin = (husimi_q(Complex64::new(0.0, 0.0), 0.0) - peak).abs();
    let mut ok = two_route <= 1e-12 && origin <= 1e-12;
    let mut notes = vec![format!("two-route {two_route:.2e}, Q(0;0) {origin:.2e}")];
    for x in [-3.0, 0.0, 3.0, 6.0] {
        let re = if x == 6.0 { (0.0, 8.0) } else { (-4.0, 4.0) };
        let grid = husimi_grid(x, re, (-4.0, 4.0), 81, 81).map_err(e)?;
        let arg = grid.argmax();
        let refined = grid.refine_peak();
        let spread = grid.max_column_spread();
        let loc_ok = (arg.re - x / SQRT_2).abs() <= grid.re_step() + 1e-12;
        let max_ok = (refined.value - peak).abs() <= 1e-9;
        ok &= loc_ok && max_ok && spread <= 1e-12;
        notes.push(format!(
            "x={x}: argmax Re {:.2} (ridge {:.4}), grid max dev {:.1e}, refined max dev {:.1e}, column spread {:.1e}",
            arg.re,
            x / SQRT_2,
            (arg.value - peak).abs(),
            (refined.value - peak).abs(),
            spread
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn disentangling() -> Outcome {
    let d = dim(32);
    let opts = VerifyOptions::for_dim(d).with_interior(Interior::Fixed(16));
    let mut worst = 0.0f64;
    for r in [0.25, -0.25, 0.5, -0.5, 0.75, -0.75] {
        worst = worst.max(verify_disentangle_with(r, d, &opts).map_err(e)?.rel_dev);
    }
    let (_, g) = integrate_disentangle_ode(1.0, 1e-3).map_err(e)?;
    let g_err = (g - (1.0 - 2f64.exp()) / 4.0).abs();
    let order = ode_order_check(1.0, 1e-2).map_err(e)?;
    let order_ok = (order.ratio.log2() - 4.0).abs() <= 0.25;
    Ok((
        worst <= 1e-8 && g_err <= 1e-6 && order_ok,
        format!(
            "rel_dev {worst:.3e} (tol 1e-8); ODE g error {g_err:.3e} (tol 1e-6); step-halving ratio {:.2}",
            order.ratio
        ),
    ))
}

fn identity_suite() -> Outcome {
    let mut reports = Vec::new();
    let d128 = dim(128);
    for r in RS {
        reports.push(verify_bogoliubov(r, d128).map_err(e)?);
        reports.push(verify_squeeze_factorization(r, d128).map_err(e)?);
    }
    reports.push(verify_squeeze_factorization(1.0, dim(256)).map_err(e)?);
    let d64 = dim(64);
    for g in [0.0, 0.7, 1.0] {
        reports.push(verify_shift_identity(g, 6, d64).map_err(e)?);
    }
    for f in [0.0, 0.5, -0.5, 1.0, -1.0] {
        reports.push(verify_similarity_scaling(f, d64).map_err(e)?);
    }
    reports.push(verify_commutator_a2_n(d64, &VerifyOptions::for_dim(d64)).map_err(e)?);
    let worst = reports.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    let min_interior = reports.iter().map(|r| r.interior).min().unwrap_or(0);
    let ok = reports.iter().all(|r| r.passed && r.rel_dev <= 1e-8);

    let lit = |k| VerifyOptions::for_dim(d128).with_interior(Interior::Fixed(k));
    let bog64 = verify_bogoliubov_with(0.5, d128, &lit(64)).map_err(e)?;
    let fac64 = verify_squeeze_factorization_with(0.5, d128, &lit(64)).map_err(e)?;
    Ok((
        ok,
        format!(
            "{} reports, worst rel_dev {worst:.3e} (tol 1e-8), smallest resolved interior {min_interior}; \
             info: r=0.5 N=128 on a fixed 64 interior gives bogoliubov {:.2e}, factorization {:.2e}",
            reports.len(),
            bog64.rel_dev,
            fac64.rel_dev
        ),
    ))
}

fn caves_closed_form() -> Outcome {
    let d = dim(128);
    let mut norm_dev = 0.0f64;
    let mut fid = 1.0f64;
    for x in [0.0, 1.0] {
        for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let closed = caves_closed_form_state(x, r, d).map_err(e)?;
            let product = caves_state(x / SQRT_2, r, d).map_err(e)?;
            norm_dev = norm_dev.max((closed.norm() - 1.0).abs());
            fid = fid.min(fidelity(&closed, &product).map_err(e)?);
        }
    }
    Ok((
        norm_dev <= 1e-6 && fid >= 1.0 - 1e-8,
        format!("norm deviation {norm_dev:.3e} (tol 1e-6), min fidelity 1 - {:.3e} (tol 1e-8)", 1.0 - fid),
    ))
}

fn limit_studies() -> Outcome {
    let d = dim(256);
    let rs = [0.5, 1.0, 1.5, 2.0];
    let caves = caves_limit_study(1.0, &rs, d).map_err(e)?;
    let increasing = fidelity_strictly_increasing(&caves);
    let yuen = yuen_limit_study(1.0, &rs, d).map_err(e)?;
    let mut center = 0.0f64;
    let mut excluded = Vec::new();
    for row in &yuen {
        let dev = (row.center_x - (-row.r).exp()).abs();
        if row.trusted {
            center = center.max(dev);
        } else {
            excluded.push(format!("r={} (center dev {dev:.1e}, tail {:.1e})", row.r, row.tail_mass));
        }
    }
    let trusted_r: Vec<f64> = yuen.iter().filter(|r| r.trusted).map(|r| r.r).collect();
    let pair: Vec<f64> = trusted_r
        .iter()
        .map(|&r| yuen_pairwise_fidelity(0.0, 2.0, r, d))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    // For α = x/√2 the pair fidelity is |⟨x1/√2|x2/√2⟩|² = e^{−(x1−x2)²/2}.
    let expected = (-2.0f64).exp();
    let spread = pair.iter().fold(f64::NEG_INFINITY, |m, &f| m.max(f)) - pair.iter().fold(f64::INFINITY, |m, &f| m.min(f));
    let invariance = pair.iter().map(|f| (f - expected).abs()).fold(spread, f64::max);
    let fids: Vec<String> = caves.iter().map(|r| format!("{:.4}", r.fidelity_to_target)).collect();
    Ok((
        increasing && center <= 1e-8 && invariance <= 1e-8 && !trusted_r.is_empty(),
        format!(
            "caves fidelity [{}]; yuen center dev {center:.2e} and pairwise fidelity {:.6} (e^-2) invariance {invariance:.2e} over r {:?}; excluded: {}",
            fids.join(", "),
            pair.first().copied().unwrap_or(f64::NAN),
            trusted_r,
            if excluded.is_empty() { "none".to_string() } else { excluded.join(", ") }
        ),
    ))
}

fn overlap_adjudication() -> Outcome {
    let rows = adjudicate_overlap(&[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5], &[-2.0, -1.0, 0.0, 1.0, 2.0], dim(256))
        .map_err(e)?;
    let max_by = |pred: &dyn Fn(f64) -> bool, f: &dyn Fn(&fock_lab::analytics::OverlapAdjudicationRow) -> f64| {
        rows.iter().filter(|r| pred(r.r)).map(f).fold(0.0, f64::max)
    };
    let printed_r0 = max_by(&|r| r == 0.0, &|r| r.printed_dev);
    let printed_r025 = max_by(&|r| r == 0.25, &|r| r.printed_dev);
    let printed_r05 = max_by(&|r| r == 0.5, &|r| r.printed_dev);
    let corrected = max_by(&|_| true, &|r| r.corrected_dev);

    let d = dim(32);
    let opts = VerifyOptions::for_dim(d).with_interior(Interior::Fixed(16));
    let mut winners = Vec::new();
    for r in [0.25, -0.25, 0.5, -0.5, 0.75, -0.75] {
        winners.push(verify_main_text_variant_with(r, d, &opts).map_err(e)?.winner);
    }
    let consistent = matches!(winners[0], VariantWinner::Printed | VariantWinner::Substituted)
        && winners.iter().all(|w| *w == winners[0]);
    Ok((
        printed_r0 <= 1e-10 && corrected <= 1e-8 && consistent,
        format!(
            "printed form at r=0 {printed_r0:.2e} (tol 1e-10); printed form deviation r=0.25 {printed_r025:.3e}, r=0.5 {printed_r05:.3e}; \
             corrected {corrected:.2e} (tol 1e-8); disentangling winner {:?}",
            winners[0]
        ),
    ))
}

fn run_cli(args: &[&str], out: &std::path::Path) -> Result<(i32, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fock-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(e)?;
    Ok((status.status.code().unwrap_or(-1), status.stdout))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let mut ok = true;
    let mut compared = Vec::new();
    for (cmd, files) in [
        (&["verify"][..], &["verify.json"][..]),
        (&["husimi", "--x", "3"][..], &["husimi.csv", "husimi.json"][..]),
    ] {
        // Same output path both times, since the resolved config is echoed.
        let out = dir.path().join(cmd[0]);
        let (ca, sa) = run_cli(cmd, &out)?;
        let first: Vec<Vec<u8>> = files.iter().map(|f| fs::read(out.join(f))).collect::<Result<_, _>>().map_err(e)?;
        let (cb, sb) = run_cli(cmd, &out)?;
        ok &= ca == 0 && cb == 0 && sa == sb;
        for (f, before) in files.iter().zip(&first) {
            let same = *before == fs::read(out.join(f)).map_err(e)?;
            ok &= same;
            compared.push(format!("{f}{}", if same { "" } else { " DIFFERS" }));
        }
    }
    Ok((ok, format!("byte-compared {}", compared.join(", "))))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("minimum uncertainty", minimum_uncertainty),
        ("yuen/caves equivalence", yuen_caves_equivalence),
        ("position eigenstate triple form", position_triple),
        ("weak eigenvalue property", weak_eigenvalue),
        ("coherent/position overlap", coherent_position_overlap),
        ("husimi function", husimi),
        ("disentangling theorem", disentangling),
        ("identity suite", identity_suite),
        ("caves closed form", caves_closed_form),
        ("limit studies", limit_studies),
        ("squeezed/position overlap adjudication", overlap_adjudication),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(v) => v,
            Err(msg) => (false, format!("error: {msg}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
