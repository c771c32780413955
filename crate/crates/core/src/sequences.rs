//! Generation and diagnosis of the sequence triples (a_n, b_n, β_n) that
//! parameterize the operators.
//!
//! A scheme pairs a rule for (a_n, b_n) with a rule for β_n. The admissibility
//! condition behind the convergence theory — b_n·(a_n/b_n − 1) → 0 — is
//! asymptotic and cannot be verified at finite n, so [`SequenceScheme::diagnose`]
//! reports finite-n trends instead of enforcing anything.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::Serialize;

/// Rule generating the pair (a_n, b_n).
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind<T: Scalar> {
    /// a_n = b_n = n — the classical (undilated) operator.
    Identity,
    /// a_n = n^r + 1/n, b_n = n^r, for an exponent r > 1 — the accelerated
    /// scheme from the comparison example.
    PowerShift { r: T },
    /// Explicit (a_n, b_n) pairs, indexed by n starting at 1.
    Table(Vec<(T, T)>),
}

/// Rule generating β_n.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaRule<T: Scalar> {
    /// β_n = β for all n.
    Constant(T),
    /// β_n = 1/n, with β_1 clamped to 0.5 (1/1 = 1 falls outside [0,1);
    /// every statement in the theory requires β < 1).
    InverseN,
    /// Explicit β_n values, indexed by n starting at 1.
    Table(Vec<T>),
}

/// A complete (a_n, b_n, β_n) generation scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceScheme<T: Scalar> {
    kind: SchemeKind<T>,
    beta_rule: BetaRule<T>,
}

/// Direction of a finite sequence, up to a tiny comparison slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

/// Finite-n admissibility diagnostics; informative, never a rejection.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeDiagnostics {
    /// Largest n actually inspected (may be capped by table length).
    pub n_checked: u32,
    /// a_n ≥ 1 and b_n ≥ 1 throughout.
    pub values_at_least_one: bool,
    /// a_n strictly increasing.
    pub a_increasing: bool,
    /// b_n strictly increasing.
    pub b_increasing: bool,
    /// Direction of a_n/b_n.
    pub ratio_trend: Trend,
    /// Whether a_n/b_n is non-decreasing — the stated admissibility shape.
    /// The accelerated scheme violates it (ratio 1 + n^{-(r+1)} strictly
    /// decreases) while still converging, so this is a flag, not an error.
    pub ratio_nondecreasing: bool,
    /// First value of the proxy d_n = b_n·|a_n/b_n − 1|.
    pub drift_proxy_first: f64,
    /// Last value of the proxy.
    pub drift_proxy_last: f64,
    /// Direction of d_n.
    pub drift_trend: Trend,
    /// Whether d_n plausibly tends to 0 (identically ~0, or decreasing) —
    /// the finite-n proxy for the asymptotic admissibility condition.
    pub drift_plausible: bool,
    /// Direction of β_n.
    pub beta_trend: Trend,
    /// Whether β_1 was clamped under the inverse-n rule.
    pub beta_clamped: bool,
    /// Human-readable notes for flags raised above.
    pub notes: Vec<String>,
}

impl<T: Scalar> SequenceScheme<T> {
    /// Validates and builds a scheme.
    pub fn new(kind: SchemeKind<T>, beta_rule: BetaRule<T>) -> Result<Self> {
        match &kind {
            SchemeKind::Identity => {}
            SchemeKind::PowerShift { r } => {
                if !(r.is_finite() && *r > T::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "power-shift exponent must be a finite real > 1, got {r}"
                    )));
                }
            }
            SchemeKind::Table(pairs) => {
                if pairs.is_empty() {
                    return Err(Error::InvalidParameter(
                        "table scheme needs at least one (a, b) pair".into(),
                    ));
                }
                for (i, (a, b)) in pairs.iter().enumerate() {
                    if !(a.is_finite() && *a >= T::one() && b.is_finite() && *b >= T::one()) {
                        return Err(Error::InvalidParameter(format!(
                            "table entry {} must have a, b finite and >= 1, got ({a}, {b})",
                            i + 1
                        )));
                    }
                }
            }
        }
        match &beta_rule {
            BetaRule::Constant(beta) => {
                if !(beta.is_finite() && *beta >= T::zero() && *beta < T::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "constant beta must lie in [0, 1), got {beta}"
                    )));
                }
            }
            BetaRule::InverseN => {}
            BetaRule::Table(betas) => {
                if betas.is_empty() {
                    return Err(Error::InvalidParameter(
                        "beta table needs at least one entry".into(),
                    ));
                }
                for (i, beta) in betas.iter().enumerate() {
                    if !(beta.is_finite() && *beta >= T::zero() && *beta < T::one()) {
                        return Err(Error::InvalidParameter(format!(
                            "beta table entry {} must lie in [0, 1), got {beta}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(Self { kind, beta_rule })
    }

    /// Identity scheme with a constant β — the most common configuration.
    pub fn identity(beta: T) -> Result<Self> {
        Self::new(SchemeKind::Identity, BetaRule::Constant(beta))
    }

    /// Accelerated scheme a_n = n^r + 1/n, b_n = n^r with a constant β.
    pub fn power_shift(r: T, beta: T) -> Result<Self> {
        Self::new(SchemeKind::PowerShift { r }, BetaRule::Constant(beta))
    }

    /// The scheme's (a_n, b_n) rule.
    pub fn kind(&self) -> &SchemeKind<T> {
        &self.kind
    }

    /// The scheme's β_n rule.
    pub fn beta_rule(&self) -> &BetaRule<T> {
        &self.beta_rule
    }

    /// The triple (a_n, b_n, β_n) for a given index n ≥ 1.
    pub fn values(&self, n: u32) -> Result<(T, T, T)> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "sequence index n must be at least 1".into(),
            ));
        }
        let nt = T::from_u64_lossy(u64::from(n));
        let (a, b) = match &self.kind {
            SchemeKind::Identity => (nt, nt),
            SchemeKind::PowerShift { r } => {
                let nr = nt.powf(*r);
                (nr + nt.recip(), nr)
            }
            SchemeKind::Table(pairs) => *pairs.get(n as usize - 1).ok_or(Error::IndexOutOfRange {
                n,
                len: pairs.len(),
            })?,
        };
        let beta = match &self.beta_rule {
            BetaRule::Constant(beta) => *beta,
            BetaRule::InverseN => {
                if n == 1 {
                    T::half()
                } else {
                    nt.recip()
                }
            }
            BetaRule::Table(betas) => *betas.get(n as usize - 1).ok_or(Error::IndexOutOfRange {
                n,
                len: betas.len(),
            })?,
        };
        Ok((a, b, beta))
    }

    /// Finite-n diagnostics over n = 1..=n_max (capped by table length).
    pub fn diagnose(&self, n_max: u32) -> Result<SchemeDiagnostics> {
        if n_max < 4 {
            return Err(Error::InvalidParameter(
                "diagnostics need n_max >= 4 to establish trends".into(),
            ));
        }
        let cap = match (&self.kind, &self.beta_rule) {
            (SchemeKind::Table(pairs), BetaRule::Table(betas)) => {
                pairs.len().min(betas.len()) as u32
            }
            (SchemeKind::Table(pairs), _) => pairs.len() as u32,
            (_, BetaRule::Table(betas)) => betas.len() as u32,
            _ => n_max,
        };
        let n_checked = n_max.min(cap.max(1));

        let mut a_vals = Vec::with_capacity(n_checked as usize);
        let mut b_vals = Vec::with_capacity(n_checked as usize);
        let mut ratio = Vec::with_capacity(n_checked as usize);
        let mut drift = Vec::with_capacity(n_checked as usize);
        let mut betas = Vec::with_capacity(n_checked as usize);
        for n in 1..=n_checked {
            let (a, b, beta) = self.values(n)?;
            let (a, b, beta) = (a.to_f64_lossy(), b.to_f64_lossy(), beta.to_f64_lossy());
            a_vals.push(a);
            b_vals.push(b);
            ratio.push(a / b);
            drift.push(b * (a / b - 1.0).abs());
            betas.push(beta);
        }

        let values_at_least_one = a_vals.iter().chain(&b_vals).all(|v| *v >= 1.0);
        let a_increasing = strictly_increasing(&a_vals);
        let b_increasing = strictly_increasing(&b_vals);
        let ratio_trend = trend(&ratio);
        let ratio_nondecreasing =
            matches!(ratio_trend, Trend::Constant | Trend::Increasing);
        let drift_trend = trend(&drift);
        let drift_proxy_first = drift[0];
        let drift_proxy_last = *drift.last().expect("n_checked >= 1");
        let drift_plausible =
            drift_proxy_last <= 1e-12 || matches!(drift_trend, Trend::Decreasing);
        let beta_trend = trend(&betas);
        let beta_clamped = matches!(self.beta_rule, BetaRule::InverseN);

        let mut notes = Vec::new();
        if n_checked < n_max {
            notes.push(format!(
                "table shorter than requested range; checked n <= {n_checked}"
            ));
        }
        if !values_at_least_one {
            notes.push("some a_n or b_n falls below 1".into());
        }
        if !a_increasing {
            notes.push("a_n is not strictly increasing".into());
        }
        if !b_increasing {
            notes.push("b_n is not strictly increasing".into());
        }
        if !ratio_nondecreasing {
            notes.push(
                "a_n/b_n is not non-decreasing (the accelerated scheme has this shape \
                 by design; reported, not enforced)"
                    .into(),
            );
        }
        if !drift_plausible {
            notes.push(
                "drift proxy b_n|a_n/b_n - 1| is not tending to 0; the admissibility \
                 condition is implausible for this scheme"
                    .into(),
            );
        }
        if beta_clamped {
            notes.push("beta_1 clamped to 0.5 under the inverse-n rule (1/1 = 1 is outside [0,1))".into());
        }

        Ok(SchemeDiagnostics {
            n_checked,
            values_at_least_one,
            a_increasing,
            b_increasing,
            ratio_trend,
            ratio_nondecreasing,
            drift_proxy_first,
            drift_proxy_last,
            drift_trend,
            drift_plausible,
            beta_trend,
            beta_clamped,
            notes,
        })
    }
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// Classifies a sequence's direction with a relative slack of 1e−12, so that
/// float noise on a constant sequence does not read as Mixed.
fn trend(values: &[f64]) -> Trend {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let mut up = false;
    let mut down = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > tol {
            up = true;
        } else if d < -tol {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Trend::Constant,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (true, true) => Trend::Mixed,
    }
}

/// Parses a scheme selector of the form `identity`, `power-shift:<r>`, or
/// `table:<path>` (the file holds a JSON array of [a, b] pairs), combined
/// with a β selector `const:<v>`, `inv-n`, or `table:<path>` (JSON array of
/// numbers).
pub fn parse_scheme<T: Scalar>(kind_spec: &str, beta_spec: &str) -> Result<SequenceScheme<T>> {
    let kind = if kind_spec == "identity" {
        SchemeKind::Identity
    } else if let Some(r) = kind_spec.strip_prefix("power-shift:") {
        let r: f64 = r.parse().map_err(|_| {
            Error::InvalidParameter(format!("power-shift exponent must be a number, got {r:?}"))
        })?;
        SchemeKind::PowerShift {
            r: T::from_f64_lossy(r),
        }
    } else if let Some(path) = kind_spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path)?;
        let pairs: Vec<(f64, f64)> = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidParameter(format!("scheme table {path}: expected JSON [[a,b],...]: {e}"))
        })?;
        SchemeKind::Table(
            pairs
                .into_iter()
                .map(|(a, b)| (T::from_f64_lossy(a), T::from_f64_lossy(b)))
                .collect(),
        )
    } else {
        return Err(Error::InvalidParameter(format!(
            "unknown scheme {kind_spec:?}; expected identity, power-shift:<r>, or table:<path>"
        )));
    };
    let beta_rule = if beta_spec == "inv-n" {
        BetaRule::InverseN
    } else if let Some(v) = beta_spec.strip_prefix("const:") {
        let v: f64 = v.parse().map_err(|_| {
            Error::InvalidParameter(format!("constant beta must be a number, got {v:?}"))
        })?;
        BetaRule::Constant(T::from_f64_lossy(v))
    } else if let Some(path) = beta_spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path)?;
        let betas: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidParameter(format!("beta table {path}: expected JSON [b1,b2,...]: {e}"))
        })?;
        BetaRule::Table(betas.into_iter().map(T::from_f64_lossy).collect())
    } else {
        return Err(Error::InvalidParameter(format!(
            "unknown beta rule {beta_spec:?}; expected const:<v>, inv-n, or table:<path>"
        )));
    };
    SequenceScheme::new(kind, beta_rule)
}
