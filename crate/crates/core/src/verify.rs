//! Self-verification suite.
//!
//! Re-derives the library's closed-form identities and limit statements at
//! runtime and reports one named check per identity family, each with its
//! worst observed residual and the tolerance it was held to. `Quick` covers
//! the sub-second identity checks; `Full` adds the scaled-limit residuals at
//! n = 10⁴, the rate-halving experiment, and the scheme-comparison values.
//!
//! Every closed-form reference flows through a single bias knob (zero in
//! production): inflating the references by 1e−6 must fail the suite, which
//! pins the tolerances as genuinely discriminating rather than vacuous.

use crate::abel::{
    s_series, s_closed, s_recurrence_residual, normalization_defect,
    AbelParams, TruncationPolicy,
};
use crate::bounds::{compare_schemes, Winner};
use crate::error::Result;
use crate::functions::builtin;
use crate::moments::{
    central_moment_closed, extract_lambda, moment_report, raw_moment_closed,
    scaled_limit_residuals, stirling2,
};
use crate::operators::{evaluate_jain, evaluate_kantorovich, OperatorConfig};
use crate::sequences::{BetaRule, SchemeKind, SequenceScheme};
use serde::Serialize;

/// Verification depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Sub-second identity checks only.
    Quick,
    /// Identity checks plus limit residuals and rate experiments.
    Full,
}

/// One named check: the worst residual observed across its grid, the
/// tolerance it is held to, and the verdict `residual ≤ tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub level: VerifyLevel,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifySummary {
    /// Names of the checks that failed, in run order.
    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

/// Runs the suite at the given level.
pub fn verify_suite(level: VerifyLevel) -> Result<VerifySummary> {
    run_with_bias(level, 0.0)
}

/// Relative gap between a measured value and a (possibly biased) closed-form
/// reference, with the denominator floored at 1 so tiny references read as
/// absolute gaps.
fn rel_gap(measured: f64, reference: f64, bias: f64) -> f64 {
    let biased = reference * (1.0 + bias);
    (measured - biased).abs() / biased.abs().max(1.0)
}

/// The criterion grid shared by the moment and Kantorovich checks.
const PAIR_GRID: [(f64, f64); 3] = [(10.0, 10.0), (25.2, 25.0), (100.0, 100.0)];
const BETA_GRID: [f64; 3] = [0.0, 0.1, 0.5];
const X_GRID: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];

fn run_with_bias(level: VerifyLevel, bias: f64) -> Result<VerifySummary> {
    let pol = TruncationPolicy::default();
    let mut checks = Vec::new();

    // Weight normalization Σ_k w(k, α, β) = 1. The truncated sum is never
    // above the full sum, so the biased defect is defect + bias exactly.
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 5.0, 20.0, 50.0] {
        for beta in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
            let d = normalization_defect(&AbelParams::new(alpha, beta)?, &pol)?;
            worst = worst.max(d + bias);
        }
    }
    checks.push(Check::new("normalization", worst, 1e-10));

    // Series-function closed forms vs the defining series, orders 1–4.
    let mut worst = 0.0f64;
    for r in 1..=4u32 {
        for alpha in [0.5, 1.0, 2.0, 5.0] {
            for beta in [0.0, 0.1, 0.5] {
                let series = s_series(r, &AbelParams::new(alpha, beta)?, &pol)?;
                let closed = s_closed(r, alpha, beta)?;
                worst = worst.max(rel_gap(series, closed, bias));
            }
        }
    }
    checks.push(Check::new("s_closed_vs_series", worst, 1e-8));

    // Exact pinned values: S(1, ·, 0.5) = 2 for any α, S(2, 1, 0.5) = 6.
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 5.0] {
        let s1 = s_closed(1, alpha, 0.5)?;
        worst = worst.max((s1 * (1.0 + bias) - 2.0).abs());
    }
    let s2 = s_closed(2, 1.0, 0.5)?;
    worst = worst.max((s2 * (1.0 + bias) - 6.0).abs());
    checks.push(Check::new("s_exact_values", worst, 1e-12));

    // Defining recurrence of the series function (series-only; no closed
    // reference, so the bias knob does not apply).
    let mut worst = 0.0f64;
    for r in 1..=3u32 {
        for alpha in [1.0, 5.0] {
            for beta in [0.0, 0.3, 0.5] {
                let resid: f64 = s_recurrence_residual(r, alpha, beta, &pol)?;
                let scale: f64 = s_series(r, &AbelParams::new(alpha, beta)?, &pol)?;
                worst = worst.max(resid.abs() / scale.abs().max(1.0));
            }
        }
    }
    checks.push(Check::new("s_recurrence", worst, 1e-8));

    // Raw (orders 0–4) and central (orders 1–4) moment closed forms against
    // direct series evaluation on the criterion grid.
    let mut worst = 0.0f64;
    for (a, b) in PAIR_GRID {
        for beta in BETA_GRID {
            let cfg = OperatorConfig::new(1, a, b, beta)?;
            for x in X_GRID {
                for r in 0..=4u32 {
                    let closed = raw_moment_closed(r, &cfg, x)?;
                    let series = evaluate_jain(|t: f64| t.powi(r as i32), &cfg, x, r)?;
                    worst = worst.max(rel_gap(series, closed, bias));
                }
                for m in 1..=4u32 {
                    let closed = central_moment_closed(m, &cfg, x)?;
                    let series = evaluate_jain(|t: f64| (t - x).powi(m as i32), &cfg, x, m)?;
                    worst = worst.max(rel_gap(series, closed, bias));
                }
            }
        }
    }
    checks.push(Check::new("moment_closed_vs_series", worst, 1e-8));

    // Pinned second-moment spot value at (a, b, β, x) = (10, 10, 0.1, 1).
    let cfg = OperatorConfig::new(1, 10.0, 10.0, 0.1)?;
    let spot = raw_moment_closed(2, &cfg, 1.0)?;
    checks.push(Check::new(
        "moment_spot_value",
        (spot * (1.0 + bias) - 1.371_742_1).abs(),
        1e-7,
    ));

    // Direct vs factorial-expansion moments, orders 1–6, plus the exact
    // partition-count triangle rows the expansion is built from.
    let mut worst = 0.0f64;
    for (a, b) in [(10.0, 10.0), (100.0, 100.0)] {
        for beta in [0.0, 0.5] {
            let cfg = OperatorConfig::new(1, a, b, beta)?;
            for x in [0.5, 1.0, 2.0] {
                for r in 1..=6u32 {
                    let rep = moment_report(r, &cfg, x)?;
                    let stirling = rep.stirling_value.expect("order ≤ 6");
                    worst = worst.max(rel_gap(rep.series_value, stirling, bias));
                }
            }
        }
    }
    let triangle: [&[u64]; 4] = [&[1], &[1, 1], &[1, 3, 1], &[1, 7, 6, 1]];
    for (r, row) in triangle.iter().enumerate() {
        let r = r as u32 + 1;
        for (j, &want) in row.iter().enumerate() {
            if stirling2(r, j as u32 + 1) != want {
                worst = worst.max(1.0);
            }
        }
    }
    checks.push(Check::new("stirling_cross_check", worst, 1e-8));

    // Kantorovich identities: mass K(1; x) = 1 and mean
    // K(t; x) = a·x/(b(1−β)) + 1/(2b), both on the criterion grid.
    let mut worst_mass = 0.0f64;
    let mut worst_mean = 0.0f64;
    for (a, b) in PAIR_GRID {
        for beta in BETA_GRID {
            let cfg = OperatorConfig::new(1, a, b, beta)?;
            for x in X_GRID {
                let mass = evaluate_kantorovich(|_: f64| 1.0, &cfg, x, 0)?;
                worst_mass = worst_mass.max((mass - (1.0 + bias)).abs());
                let mean = evaluate_kantorovich(|t: f64| t, &cfg, x, 1)?;
                let closed = a * x / (b * (1.0 - beta)) + 1.0 / (2.0 * b);
                worst_mean = worst_mean.max(rel_gap(mean, closed, bias));
            }
        }
    }
    checks.push(Check::new("kantorovich_mass", worst_mass, 1e-10));
    checks.push(Check::new("kantorovich_mean", worst_mean, 1e-8));

    // Moment-polynomial coefficients against their closed tables for
    // orders ≤ 4, and the leading coefficient λ_{r,r} = 1 through order 5.
    let mut worst = 0.0f64;
    let cfg = OperatorConfig::new(1, 1.0, 1.0, 0.0)?;
    for beta in [0.0, 0.2, 0.5, 0.6] {
        for r in 1..=4u32 {
            let table: Vec<f64> = match r {
                1 => vec![1.0],
                2 => vec![1.0, 1.0],
                3 => vec![1.0 + 2.0 * beta, 3.0, 1.0],
                _ => vec![
                    1.0 + 8.0 * beta + 6.0 * beta * beta,
                    7.0 + 8.0 * beta,
                    6.0,
                    1.0,
                ],
            };
            let got = extract_lambda(r, beta, &cfg)?;
            for (g, w) in got.iter().zip(&table) {
                worst = worst.max(rel_gap(*g, *w, bias));
            }
        }
        let l5 = extract_lambda(5, beta, &cfg)?;
        worst = worst.max(rel_gap(l5[4], 1.0, bias));
    }
    checks.push(Check::new("lambda_coefficients", worst, 1e-8));

    if level == VerifyLevel::Full {
        full_checks(&mut checks, bias)?;
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifySummary {
        level,
        checks,
        passed,
    })
}

fn full_checks(checks: &mut Vec<Check>, bias: f64) -> Result<()> {
    // Scaled central-moment limits at n = 10⁴ with a_n = b_n = n,
    // β_n = 1/n. The first scaled moment tends to x (the β_n = 1/n drift
    // contributes n·x·(1/(1−1/n) − 1) → x), so its residual is measured
    // against x, not against zero.
    let scheme = SequenceScheme::new(SchemeKind::Identity, BetaRule::InverseN)?;
    let mut worst_low = 0.0f64;
    let mut worst_high = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        let [r1, r2, r3, r4] = scaled_limit_residuals(&scheme, 10_000, x)?;
        worst_low = worst_low.max((r1 - x * (1.0 + bias)).abs() / x.max(1.0));
        worst_low = worst_low.max((r2 - x * bias).abs() / x.max(1.0));
        worst_high = worst_high.max(r3.abs());
        let scale4 = (3.0 * x * x).max(1.0);
        worst_high = worst_high.max((r4 - 3.0 * x * x * bias).abs() / scale4);
    }
    checks.push(Check::new("scaled_limit_residuals", worst_low, 1e-3));
    checks.push(Check::new("higher_moment_limits", worst_high, 1e-2));

    // Every limit residual must shrink from n = 10² to n = 10⁴.
    let mut worst_ratio = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        let lo = scaled_limit_residuals(&scheme, 100, x)?;
        let hi = scaled_limit_residuals(&scheme, 10_000, x)?;
        let centered = |r: [f64; 4]| [r[0] - x, r[1], r[2], r[3]];
        for (h, l) in centered(hi).iter().zip(centered(lo)) {
            worst_ratio = worst_ratio.max(h.abs() / l.abs());
        }
    }
    checks.push(Check::new("limit_residuals_shrink", worst_ratio, 1.0));

    // Rate halving: doubling n cuts the sup weighted error to at most 0.7×
    // for a bounded registry function under the identity scheme.
    let f = builtin::<f64>("exp_decay")?;
    let eval = f.evaluator();
    let xs: Vec<f64> = (0..=50).map(|i| 0.1 * f64::from(i)).collect();
    let sup_err = |n: u32| -> Result<f64> {
        let cfg = OperatorConfig::new(n, f64::from(n), f64::from(n), 0.0)?;
        let mut worst = 0.0f64;
        for &x in &xs {
            let j = evaluate_jain(&*eval, &cfg, x, 0)?;
            worst = worst.max((j - eval(x)).abs());
        }
        Ok(worst)
    };
    let mut worst = 0.0f64;
    for n in [50u32, 100] {
        worst = worst.max(sup_err(2 * n)? / sup_err(n)?);
    }
    checks.push(Check::new("rate_halving", worst, 0.7));

    // The scheme-comparison remark: pinned identity and accelerated errors
    // at n = 5, and the accelerated scheme winning at every listed n.
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let rows = compare_schemes(|t: f64| t * t, &[5, 10, 20], 2.0, &xs)?;
    checks.push(Check::new(
        "remark_identity_error",
        (rows[0].original_error - 0.2 * (1.0 + bias)).abs(),
        1e-12,
    ));
    checks.push(Check::new(
        "remark_accelerated_error",
        (rows[0].modified_error - 0.056_384 * (1.0 + bias)).abs(),
        1e-6,
    ));
    let wrong = rows.iter().filter(|r| r.winner != Winner::Modified).count();
    checks.push(Check::new("remark_winner", wrong as f64, 0.0));
    Ok(())
}
