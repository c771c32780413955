//! Evaluation of the modified Jain operator, its classical special case, and
//! the Kantorovich integral extension.
//!
//! The point-sample operator is
//!
//! ```text
//! J(f; x) = Σ_k w(k, a_n·x, β) · f(k/b_n)
//! ```
//!
//! and the Kantorovich extension replaces the sample f(k/b_n) by the mean of
//! f over the cell [k/b_n, (k+1)/b_n]:
//!
//! ```text
//! K(f; x) = b_n · Σ_k w(k, a_n·x, β) · ∫_{k/b_n}^{(k+1)/b_n} f(t) dt.
//! ```
//!
//! With a_n = b_n = n these reduce to the classical (Szász-Mirakyan-type)
//! operators. All series are truncated by the bulk-aware policy from
//! [`crate::abel`]; cell integrals use adaptive Simpson so kink functions
//! straddling a cell are still integrated to tolerance.

use crate::abel::{truncation_index, weight, AbelParams, TruncationPolicy};
use crate::error::{CellFailure, Error, Result};
use crate::scalar::{CompensatedSum, Scalar};
use crate::sequences::SequenceScheme;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Adaptive-quadrature policy for Kantorovich cell integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Absolute tolerance per cell integral.
    pub abs_tol: f64,
    /// Maximum bisection depth before giving up.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl QuadratureSpec {
    /// Checks the policy invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature abs_tol must be positive and finite, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter(
                "quadrature max_depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Which of the two operators to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// The point-sample operator J.
    Jain,
    /// The cell-average (integral) extension K.
    Kantorovich,
}

/// One operator evaluation instance: the triple (a_n, b_n, β) at index n plus
/// the numerical policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig<T: Scalar> {
    /// Sequence index (diagnostic; the evaluation uses a_n, b_n, beta).
    pub n: u32,
    /// Dilation of the weight rate: the series uses rate α = a_n·x.
    pub a_n: T,
    /// Dilation of the sample points k/b_n.
    pub b_n: T,
    /// Dispersion parameter of the weight family.
    pub beta: T,
    /// Series truncation policy.
    pub truncation: TruncationPolicy,
    /// Cell-integral policy (Kantorovich only).
    pub quadrature: QuadratureSpec,
}

impl<T: Scalar> OperatorConfig<T> {
    /// Builds a validated configuration with default policies.
    pub fn new(n: u32, a_n: T, b_n: T, beta: T) -> Result<Self> {
        let cfg = Self {
            n,
            a_n,
            b_n,
            beta,
            truncation: TruncationPolicy::default(),
            quadrature: QuadratureSpec::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration for index n of a scheme, with default policies.
    pub fn from_scheme(scheme: &SequenceScheme<T>, n: u32) -> Result<Self> {
        let (a_n, b_n, beta) = scheme.values(n)?;
        Self::new(n, a_n, b_n, beta)
    }

    /// Replaces the truncation policy.
    pub fn with_truncation(mut self, truncation: TruncationPolicy) -> Self {
        self.truncation = truncation;
        self
    }

    /// Replaces the quadrature policy.
    pub fn with_quadrature(mut self, quadrature: QuadratureSpec) -> Self {
        self.quadrature = quadrature;
        self
    }

    /// Checks all invariants: n ≥ 1, a_n ≥ 1, b_n ≥ 1, β ∈ [0,1), valid
    /// policies.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter(
                "sequence index n must be at least 1".into(),
            ));
        }
        if !(self.a_n.is_finite() && self.a_n >= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "a_n must be finite and at least 1, got {}",
                self.a_n
            )));
        }
        if !(self.b_n.is_finite() && self.b_n >= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "b_n must be finite and at least 1, got {}",
                self.b_n
            )));
        }
        if !(self.beta.is_finite() && self.beta >= T::zero() && self.beta < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, 1), got {}",
                self.beta
            )));
        }
        self.truncation.validate()?;
        self.quadrature.validate()
    }

    /// The operator's image of the identity function divided by x:
    /// a_n/(b_n(1−β)). Convergence requires this slope → 1.
    pub fn mean_slope(&self) -> T {
        self.a_n / (self.b_n * (T::one() - self.beta))
    }
}

fn check_eval_point<T: Scalar>(x: T) -> Result<()> {
    if !(x.is_finite() && x >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "evaluation point must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

fn finite_or_err<T: Scalar>(value: T, t: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteFunctionValue {
            t: t.to_f64_lossy(),
        })
    }
}

/// The point-sample operator J(f; x) = Σ_k w(k, a_n·x, β)·f(k/b_n).
///
/// `growth_p` bounds f's polynomial growth class so the truncation rule can
/// adjust for the factor (1 + (k/b_n)^p) the samples contribute. At x = 0 all
/// weight sits at k = 0 and the value is exactly f(0).
pub fn evaluate_jain<T: Scalar>(
    f: impl Fn(T) -> T,
    cfg: &OperatorConfig<T>,
    x: T,
    growth_p: u32,
) -> Result<T> {
    cfg.validate()?;
    check_eval_point(x)?;
    if x == T::zero() {
        let v = f(T::zero());
        return finite_or_err(v, T::zero());
    }
    let params = AbelParams::new(cfg.a_n * x, cfg.beta)?;
    let k_last = truncation_index(&params, growth_p, cfg.b_n, &cfg.truncation)?;
    let mut acc = CompensatedSum::new();
    for k in 0..=k_last {
        let t = T::from_u64_lossy(k) / cfg.b_n;
        let fv = finite_or_err(f(t), t)?;
        acc.add(weight(k, &params) * fv);
    }
    Ok(acc.value())
}

/// The Kantorovich extension K(f; x) = b_n·Σ_k w(k, a_n·x, β)·∫_cell f.
///
/// At x = 0 this is exactly b_n·∫_0^{1/b_n} f (all weight on the first cell).
pub fn evaluate_kantorovich<T: Scalar>(
    f: impl Fn(T) -> T,
    cfg: &OperatorConfig<T>,
    x: T,
    growth_p: u32,
) -> Result<T> {
    cfg.validate()?;
    check_eval_point(x)?;
    let cell = |k: u64| -> Result<T> {
        let lo = T::from_u64_lossy(k) / cfg.b_n;
        let hi = T::from_u64_lossy(k + 1) / cfg.b_n;
        adaptive_simpson(&f, lo, hi, &cfg.quadrature)
    };
    if x == T::zero() {
        return Ok(cfg.b_n * cell(0)?);
    }
    let params = AbelParams::new(cfg.a_n * x, cfg.beta)?;
    let k_last = truncation_index(&params, growth_p, cfg.b_n, &cfg.truncation)?;
    let mut acc = CompensatedSum::new();
    for k in 0..=k_last {
        acc.add(weight(k, &params) * cell(k)?);
    }
    Ok(cfg.b_n * acc.value())
}

/// Dispatches to [`evaluate_jain`] or [`evaluate_kantorovich`].
pub fn evaluate<T: Scalar>(
    kind: OperatorKind,
    f: impl Fn(T) -> T,
    cfg: &OperatorConfig<T>,
    x: T,
    growth_p: u32,
) -> Result<T> {
    match kind {
        OperatorKind::Jain => evaluate_jain(f, cfg, x, growth_p),
        OperatorKind::Kantorovich => evaluate_kantorovich(f, cfg, x, growth_p),
    }
}

/// Evaluates one operator over the full (n, x) product grid in parallel.
///
/// Element (i, j) of the result is bit-identical to the corresponding single
/// evaluation regardless of worker count: each cell is independent, its
/// summation order is fixed, and results are merged by index, never by
/// completion order. Failures are aggregated into [`Error::Batch`] with
/// (n, x) attribution, ordered by grid position.
// The parameter list mirrors the batch contract directly: the function, its
// growth class, the scheme, the index and grid axes, the operator kind, and
// the two evaluation policies. Bundling them into a struct would only move
// the same eight names one level down.
#[allow(clippy::too_many_arguments)]
pub fn batch_evaluate<T: Scalar>(
    f: impl Fn(T) -> T + Sync,
    scheme: &SequenceScheme<T>,
    n_list: &[u32],
    x_grid: &[T],
    growth_p: u32,
    kind: OperatorKind,
    truncation: TruncationPolicy,
    quadrature: QuadratureSpec,
) -> Result<Vec<Vec<T>>> {
    let configs = n_list
        .iter()
        .map(|&n| {
            Ok(OperatorConfig::from_scheme(scheme, n)?
                .with_truncation(truncation)
                .with_quadrature(quadrature))
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|i| (0..x_grid.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<std::result::Result<T, CellFailure>> = cells
        .par_iter()
        .map(|&(i, j)| {
            evaluate(kind, &f, &configs[i], x_grid[j], growth_p).map_err(|error| CellFailure {
                n: configs[i].n,
                x: x_grid[j].to_f64_lossy(),
                error: Box::new(error),
            })
        })
        .collect();
    let mut failures = Vec::new();
    let mut matrix = vec![vec![T::zero(); x_grid.len()]; configs.len()];
    for (&(i, j), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(v) => matrix[i][j] = v,
            Err(failure) => failures.push(failure),
        }
    }
    if failures.is_empty() {
        Ok(matrix)
    } else {
        Err(Error::Batch(failures))
    }
}

/// Simpson's rule over a width-`h` interval with end/mid values.
fn simpson_slice<T: Scalar>(h: T, fa: T, fm: T, fb: T) -> T {
    h / T::from_f64_lossy(6.0) * (fa + T::from_f64_lossy(4.0) * fm + fb)
}

/// Adaptive Simpson integration of f over [lo, hi] with Richardson
/// correction. Intervals are never subdivided below width 1e−15 (the
/// remaining error there is below any meaningful tolerance for cell
/// integrals); running out of depth first is a hard error.
fn adaptive_simpson<T: Scalar>(
    f: &impl Fn(T) -> T,
    lo: T,
    hi: T,
    spec: &QuadratureSpec,
) -> Result<T> {
    let m = (lo + hi) * T::half();
    let flo = finite_or_err(f(lo), lo)?;
    let fm = finite_or_err(f(m), m)?;
    let fhi = finite_or_err(f(hi), hi)?;
    let whole = simpson_slice(hi - lo, flo, fm, fhi);
    simpson_recurse(
        f,
        lo,
        m,
        hi,
        flo,
        fm,
        fhi,
        whole,
        T::from_f64_lossy(spec.abs_tol),
        spec.max_depth,
        spec.max_depth,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<T: Scalar>(
    f: &impl Fn(T) -> T,
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
    max_depth: u32,
) -> Result<T> {
    let lm = (a + m) * T::half();
    let rm = (m + b) * T::half();
    let flm = finite_or_err(f(lm), lm)?;
    let frm = finite_or_err(f(rm), rm)?;
    let left = simpson_slice(m - a, fa, flm, fm);
    let right = simpson_slice(b - m, fm, frm, fb);
    let delta = left + right - whole;
    let fifteen = T::from_f64_lossy(15.0);
    if delta.abs() <= fifteen * tol || (b - a) < T::from_f64_lossy(1e-15) {
        return Ok(left + right + delta / fifteen);
    }
    if depth == 0 {
        return Err(Error::QuadratureNotConverged {
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
            max_depth,
        });
    }
    let half_tol = tol * T::half();
    let l = simpson_recurse(f, a, lm, m, fa, flm, fm, left, half_tol, depth - 1, max_depth)?;
    let r = simpson_recurse(f, m, rm, b, fm, frm, fb, right, half_tol, depth - 1, max_depth)?;
    Ok(l + r)
}
