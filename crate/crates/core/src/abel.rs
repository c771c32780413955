//! Generalized Poisson (Abel) weights and the auxiliary series behind the
//! moment identities.
//!
//! The weight family is
//!
//! ```text
//! w(k, α, β) = α (α + kβ)^{k-1} e^{-(α+kβ)} / k!,   k = 0, 1, 2, …
//! ```
//!
//! which sums to 1 for α > 0, 0 ≤ β < 1. Direct evaluation overflows the
//! power/factorial pair beyond k ≈ 150, so every weight is computed in log
//! space. The auxiliary series
//!
//! ```text
//! S(r, α, β) = Σ_k (α + βk)^{k+r-1} e^{-(α+βk)} / k!
//! ```
//!
//! (with the convention α·S(0, α, β) = 1) underlies all closed-form moments;
//! its first four orders have closed forms implemented in
//! [`s_closed`] and a defining recurrence whose residual
//! [`s_recurrence_residual`] measures self-consistency.

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, CompensatedSum, Scalar};
use serde::{Deserialize, Serialize};

/// Parameters (α, β) of the generalized Poisson (Abel) weight family.
///
/// Invariants (enforced at construction): α > 0 finite, 0 ≤ β < 1 finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelParams<T: Scalar> {
    alpha: T,
    beta: T,
}

impl<T: Scalar> AbelParams<T> {
    /// Validates and builds the parameter pair.
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if !(beta.is_finite() && beta >= T::zero() && beta < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, 1), got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// The rate parameter α.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// The dispersion parameter β.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Index of the distribution bulk, ⌊α/(1−β)⌋ — the mean of the weight
    /// family. Truncation never stops before this index.
    pub fn bulk_index(&self) -> u64 {
        let bulk = (self.alpha / (T::one() - self.beta)).to_f64_lossy();
        if bulk.is_finite() && bulk > 0.0 {
            bulk.floor() as u64
        } else {
            0
        }
    }
}

/// Stopping policy for ascending-k series summation.
///
/// Summation stops only past the distribution bulk, once `streak` consecutive
/// (growth-adjusted) terms fall below `rel_tol` times the running sum; a
/// bulk-unaware rule would cut off before the mode for large α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Relative term threshold.
    pub rel_tol: f64,
    /// Number of consecutive sub-threshold terms required.
    pub streak: u32,
    /// Hard cap on the summation index.
    pub k_max: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            streak: 10,
            k_max: 2_000_000,
        }
    }
}

impl TruncationPolicy {
    /// Checks the policy invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must be positive and finite, got {}",
                self.rel_tol
            )));
        }
        if self.streak < 1 {
            return Err(Error::InvalidParameter("streak must be at least 1".into()));
        }
        if self.k_max < 1 {
            return Err(Error::InvalidParameter("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Log-weight ln w(k, α, β), total on valid parameters.
///
/// Evaluates ln α + (k−1)·ln(α+kβ) − (α+kβ) − ln k! without overflow for any
/// k; k = 0 collapses to −α.
pub fn log_weight<T: Scalar>(k: u64, params: &AbelParams<T>) -> T {
    let alpha = params.alpha;
    if k == 0 {
        return -alpha;
    }
    let kt = T::from_u64_lossy(k);
    let shifted = alpha + kt * params.beta;
    alpha.ln() + (kt - T::one()) * shifted.ln() - shifted - ln_factorial::<T>(k)
}

/// The weight w(k, α, β) = exp(log_weight); nonnegative by construction.
pub fn weight<T: Scalar>(k: u64, params: &AbelParams<T>) -> T {
    log_weight(k, params).exp()
}

/// Sums `term(k)` for ascending k under the bulk-aware streak rule.
///
/// Returns the compensated sum and the last index K. Errors with
/// [`Error::TruncationNotConverged`] when `k_max` is reached first.
fn truncated_sum<T: Scalar>(
    pol: &TruncationPolicy,
    bulk: u64,
    alpha: T,
    beta: T,
    mut term: impl FnMut(u64) -> T,
) -> Result<(T, u64)> {
    pol.validate()?;
    let rel = T::from_f64_lossy(pol.rel_tol);
    let mut acc = CompensatedSum::new();
    let mut run = 0u32;
    let mut k = 0u64;
    loop {
        let t = term(k);
        acc.add(t);
        if k > bulk {
            if t.abs() < rel * acc.value().abs() {
                run += 1;
                if run >= pol.streak {
                    return Ok((acc.value(), k));
                }
            } else {
                run = 0;
            }
        }
        if k >= pol.k_max {
            return Err(Error::TruncationNotConverged {
                alpha: alpha.to_f64_lossy(),
                beta: beta.to_f64_lossy(),
                k_max: pol.k_max,
                streak: pol.streak,
            });
        }
        k += 1;
    }
}

/// |1 − Σ_k w(k)| under the policy's truncation — the numerical defect of the
/// normalization identity Σ_k w(k, α, β) = 1.
pub fn normalization_defect<T: Scalar>(params: &AbelParams<T>, pol: &TruncationPolicy) -> Result<T> {
    let (sum, _) = truncated_sum(pol, params.bulk_index(), params.alpha, params.beta, |k| {
        weight(k, params)
    })?;
    Ok((T::one() - sum).abs())
}

/// Smallest index K past the distribution bulk at which `streak` consecutive
/// growth-adjusted weights w(k)·(1 + (k/b_n)^growth_p) fall below `rel_tol`
/// times their running sum.
///
/// This is the truncation point used by the operator series: the growth
/// factor accounts for the sampled function's polynomial growth class.
pub fn truncation_index<T: Scalar>(
    params: &AbelParams<T>,
    growth_p: u32,
    b_n: T,
    pol: &TruncationPolicy,
) -> Result<u64> {
    if !(b_n.is_finite() && b_n >= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "b_n must be finite and at least 1, got {b_n}"
        )));
    }
    let (_, k) = truncated_sum(pol, params.bulk_index(), params.alpha, params.beta, |k| {
        let growth = T::one() + (T::from_u64_lossy(k) / b_n).powi(growth_p as i32);
        weight(k, params) * growth
    })?;
    Ok(k)
}

/// One term of the auxiliary series, (α+βk)^{k+r−1} e^{−(α+βk)} / k!,
/// evaluated in log space.
fn s_series_term<T: Scalar>(r: u32, k: u64, params: &AbelParams<T>) -> T {
    let kt = T::from_u64_lossy(k);
    let shifted = params.alpha + params.beta * kt;
    let exponent = kt + T::from_u64_lossy(u64::from(r)) - T::one();
    (exponent * shifted.ln() - shifted - ln_factorial::<T>(k)).exp()
}

/// The auxiliary series S(r, α, β) = Σ_k (α+βk)^{k+r−1} e^{−(α+βk)} / k!.
///
/// For r = 0 returns 1/α directly, per the convention α·S(0, α, β) = 1 (the
/// r = 0 series is the normalized weight sum divided by α).
pub fn s_series<T: Scalar>(r: u32, params: &AbelParams<T>, pol: &TruncationPolicy) -> Result<T> {
    if r == 0 {
        return Ok(params.alpha.recip());
    }
    let (sum, _) = truncated_sum(pol, params.bulk_index(), params.alpha, params.beta, |k| {
        s_series_term(r, k, params)
    })?;
    Ok(sum)
}

/// Closed forms of the auxiliary series for r ∈ {1, 2, 3, 4}.
///
/// α = 0 is accepted here (every term of each closed form carries a power of
/// α or β, so the forms extend continuously).
///
/// The middle coefficient of the r = 3 form is 3αβ²/(1−β)⁴: the defining
/// recurrence S(r,α,β) = α·S(r−1,α,β) + β·S(r,α+β,β) forces the factor 3, and
/// [`s_series`] confirms it numerically (see the module tests); a commonly
/// printed variant of the identity omits the factor.
pub fn s_closed<T: Scalar>(r: u32, alpha: T, beta: T) -> Result<T> {
    if !(alpha.is_finite() && alpha >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be nonnegative and finite, got {alpha}"
        )));
    }
    if !(beta.is_finite() && beta >= T::zero() && beta < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in [0, 1), got {beta}"
        )));
    }
    let g = T::one() - beta; // 1 − β
    let a = alpha;
    let b = beta;
    let value = match r {
        1 => g.recip(),
        2 => a / g.powi(2) + b.powi(2) / g.powi(3),
        3 => {
            a.powi(2) / g.powi(3)
                + T::from_f64_lossy(3.0) * a * b.powi(2) / g.powi(4)
                + (b.powi(3) + T::two() * b.powi(4)) / g.powi(5)
        }
        4 => {
            a.powi(3) / g.powi(4)
                + T::from_f64_lossy(6.0) * a.powi(2) * b.powi(2) / g.powi(5)
                + (T::from_f64_lossy(4.0) * a * b.powi(3) + T::from_f64_lossy(11.0) * a * b.powi(4))
                    / g.powi(6)
                + (b.powi(4) + T::from_f64_lossy(8.0) * b.powi(5) + T::from_f64_lossy(6.0) * b.powi(6))
                    / g.powi(7)
        }
        _ => {
            return Err(Error::UnsupportedOrder {
                order: r,
                message: "closed forms exist for orders 1 through 4",
            })
        }
    };
    Ok(value)
}

/// Residual of the defining recurrence,
/// S(r, α, β) − α·S(r−1, α, β) − β·S(r, α+β, β), all terms via [`s_series`].
///
/// Contract: |residual| ≤ 1e−8 · |S(r, α, β)| on the supported grid.
pub fn s_recurrence_residual<T: Scalar>(
    r: u32,
    alpha: T,
    beta: T,
    pol: &TruncationPolicy,
) -> Result<T> {
    if r < 1 {
        return Err(Error::UnsupportedOrder {
            order: r,
            message: "the recurrence is defined for orders r >= 1",
        });
    }
    let base = AbelParams::new(alpha, beta)?;
    let shifted = AbelParams::new(alpha + beta, beta)?;
    let s_r = s_series(r, &base, pol)?;
    let s_prev = s_series(r - 1, &base, pol)?;
    let s_shift = s_series(r, &shifted, pol)?;
    Ok(s_r - alpha * s_prev - beta * s_shift)
}
