//! Polynomial weighted-space machinery: the weights ω_p, weighted sup-norms,
//! moduli of continuity and smoothness, Steklov means, and the ρ-weighted
//! approximation error.
//!
//! All suprema over the half-line are approximated by maxima over finite
//! grids described by [`GridSpec`]; every such quantity is therefore a lower
//! estimate of the true supremum. With the default grid (x_max = 20,
//! 2001 points) the registry functions' weighted integrands have decayed far
//! enough that doubling x_max moves the reported quantities by less than
//! 1e−6.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{gauss_legendre, map_rule, Scalar};

/// Order of the tensor Gauss-Legendre rule behind [`steklov`] and
/// [`steklov_d1`]. Sixteen points integrate the smooth registry integrands
/// over the short Steklov windows to machine precision.
const STEKLOV_QUAD_ORDER: usize = 16;

/// Ratio between the largest and smallest step in the geometric h-grid the
/// moduli maximize over: steps span [t·1e−4, t].
const H_GRID_SPAN: f64 = 1e-4;

/// Finite proxy for suprema over the half-line: an equispaced grid of
/// `x_count` points covering [0, x_max] inclusive, plus the size of the
/// geometric step grid used by the moduli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Right endpoint of the x-grid.
    pub x_max: f64,
    /// Number of x-grid points (endpoints included).
    pub x_count: u32,
    /// Number of step sizes the moduli maximize over.
    pub h_count: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_max: 20.0,
            x_count: 2001,
            h_count: 64,
        }
    }
}

impl GridSpec {
    /// Checks the invariants: a positive finite right endpoint, at least two
    /// x-points, at least one step size.
    pub fn validate(&self) -> Result<()> {
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid x_max must be positive and finite, got {}",
                self.x_max
            )));
        }
        if self.x_count < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 x-points, got {}",
                self.x_count
            )));
        }
        if self.h_count < 1 {
            return Err(Error::InvalidParameter(
                "grid needs at least 1 step size".into(),
            ));
        }
        Ok(())
    }

    /// The equispaced x-grid over [0, x_max]: point i is
    /// x_max·i/(x_count−1), so 0 and x_max are always present.
    pub fn points<T: Scalar>(&self) -> Vec<T> {
        let last = (self.x_count - 1) as f64;
        (0..self.x_count)
            .map(|i| T::from_f64_lossy(self.x_max * i as f64 / last))
            .collect()
    }

    /// The geometric step grid over (0, t]: h_count steps from t down to
    /// t·1e−4, largest last. For smooth functions the modulus is attained at
    /// the largest step; the smaller ones guard against oscillatory
    /// integrands whose difference norms peak below t.
    fn steps<T: Scalar>(&self, t: T) -> Vec<T> {
        if self.h_count == 1 {
            return vec![t];
        }
        let ratio = H_GRID_SPAN.powf(1.0 / (self.h_count - 1) as f64);
        (0..self.h_count)
            .rev()
            .map(|i| t * T::from_f64_lossy(ratio.powi(i as i32)))
            .collect()
    }
}

/// The polynomial weight ω_p(x): 1 when p = 0, otherwise (1 + x^p)^{−1}.
/// Lies in (0, 1] for x ≥ 0.
pub fn omega_p<T: Scalar>(p: u32, x: T) -> T {
    if p == 0 {
        T::one()
    } else {
        (T::one() + x.powi(p as i32)).recip()
    }
}

/// The damping weight ρ(x) = (1 + x²)^{−1} of the ρ-weighted error.
pub fn rho<T: Scalar>(x: T) -> T {
    (T::one() + x * x).recip()
}

/// The weighted sup-norm ‖f‖_p = sup_x ω_p(x)|f(x)|, approximated by the
/// maximum over the grid — a lower estimate of the true supremum.
pub fn weighted_norm<T: Scalar>(f: impl Fn(T) -> T, p: u32, grid: &GridSpec) -> Result<T> {
    grid.validate()?;
    let mut best = T::zero();
    for x in grid.points::<T>() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteFunctionValue {
                t: x.to_f64_lossy(),
            });
        }
        best = best.max(omega_p(p, x) * v.abs());
    }
    Ok(best)
}

/// The first-order modulus of continuity ω₁(f, C_p, t) =
/// sup_{0 < h ≤ t} ‖f(· + h) − f(·)‖_p, with both the step supremum and the
/// norm approximated on the grid. Nondecreasing in t and zero at t = 0.
pub fn modulus1<T: Scalar>(f: impl Fn(T) -> T, p: u32, t: T, grid: &GridSpec) -> Result<T> {
    modulus_impl(&f, p, t, grid, 1)
}

/// The second-order modulus of smoothness ω₂(f, C_p, t) =
/// sup_{0 < h ≤ t} ‖f(·) − 2f(· + h) + f(· + 2h)‖_p on the same grids.
pub fn modulus2<T: Scalar>(f: impl Fn(T) -> T, p: u32, t: T, grid: &GridSpec) -> Result<T> {
    modulus_impl(&f, p, t, grid, 2)
}

fn modulus_impl<T: Scalar>(
    f: &impl Fn(T) -> T,
    p: u32,
    t: T,
    grid: &GridSpec,
    order: u8,
) -> Result<T> {
    grid.validate()?;
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "modulus step bound must be nonnegative and finite, got {}",
            t.to_f64_lossy()
        )));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let xs = grid.points::<T>();
    let mut best = T::zero();
    for h in grid.steps(t) {
        for &x in &xs {
            let diff = match order {
                1 => f(x + h) - f(x),
                _ => f(x) - T::two() * f(x + h) + f(x + h + h),
            };
            if !diff.is_finite() {
                return Err(Error::NonFiniteFunctionValue {
                    t: x.to_f64_lossy(),
                });
            }
            best = best.max(omega_p(p, x) * diff.abs());
        }
    }
    Ok(best)
}

/// The Steklov mean
///
/// ```text
/// f_h(x) = (4/h²) ∫₀^{h/2} ∫₀^{h/2} [2f(x+s+t) − f(x+2(s+t))] ds dt,
/// ```
///
/// evaluated by a tensor 16-point Gauss-Legendre rule on the square. The
/// factor 2 on the first term is forced by the companion derivative formulas
/// and the approximation inequality ‖f_h − f‖_p ≤ ω₂(f, C_p, h): it is the
/// unique weighting under which affine functions are fixed points and
/// f_h → f as h → 0. (The display this comes from omits the factor; the
/// corrected integrand is implemented.)
pub fn steklov<T: Scalar>(f: impl Fn(T) -> T, h: T, x: T) -> Result<T> {
    check_steklov_args(h, x)?;
    let rule = map_rule(&gauss_legendre::<T>(STEKLOV_QUAD_ORDER), T::zero(), h * T::half());
    let mut acc = T::zero();
    for &(s, ws) in &rule {
        for &(t, wt) in &rule {
            let u = s + t;
            acc += ws * wt * (T::two() * f(x + u) - f(x + u + u));
        }
    }
    let four = T::two() * T::two();
    Ok(four / (h * h) * acc)
}

/// First derivative of the Steklov mean via the printed single-integral
/// form: f_h'(x) = (1/h²) ∫₀^{h/2} [8Δ_{h/2}f(x+s) − 2Δ_h f(x+2s)] ds with
/// Δ_δ f(y) = f(y+δ) − f(y).
pub fn steklov_d1<T: Scalar>(f: impl Fn(T) -> T, h: T, x: T) -> Result<T> {
    check_steklov_args(h, x)?;
    let half = h * T::half();
    let rule = map_rule(&gauss_legendre::<T>(STEKLOV_QUAD_ORDER), T::zero(), half);
    let eight = T::from_f64_lossy(8.0);
    let mut acc = T::zero();
    for &(s, w) in &rule {
        let d_half = f(x + s + half) - f(x + s);
        let d_full = f(x + s + s + h) - f(x + s + s);
        acc += w * (eight * d_half - T::two() * d_full);
    }
    Ok(acc / (h * h))
}

/// Second derivative of the Steklov mean via the printed finite-difference
/// identity f_h''(x) = (1/h²)[8Δ²_{h/2}f(x) − Δ²_h f(x)] with
/// Δ²_δ f(x) = f(x) − 2f(x+δ) + f(x+2δ); exact up to rounding, no
/// quadrature involved.
pub fn steklov_d2<T: Scalar>(f: impl Fn(T) -> T, h: T, x: T) -> Result<T> {
    check_steklov_args(h, x)?;
    let second = |d: T| f(x) - T::two() * f(x + d) + f(x + d + d);
    let eight = T::from_f64_lossy(8.0);
    Ok((eight * second(h * T::half()) - second(h)) / (h * h))
}

fn check_steklov_args<T: Scalar>(h: T, x: T) -> Result<()> {
    if !(h.is_finite() && h > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Steklov window must be positive and finite, got {}",
            h.to_f64_lossy()
        )));
    }
    if !(x.is_finite() && x >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Steklov point must be nonnegative and finite, got {}",
            x.to_f64_lossy()
        )));
    }
    Ok(())
}

/// The ρ-weighted approximation error max_i ω_p(x_i)·ρ(x_i)·|v_i − f(x_i)|
/// for operator values v aligned with the x-grid; ρ(x) = (1+x²)^{−1} damps
/// the quadratic growth the operators inflict on polynomially bounded
/// functions near the right edge of the grid.
pub fn rho_weighted_error<T: Scalar>(
    f: impl Fn(T) -> T,
    op_values: &[T],
    x_grid: &[T],
    p: u32,
) -> Result<T> {
    if op_values.len() != x_grid.len() {
        return Err(Error::InvalidParameter(format!(
            "operator values ({}) and grid ({}) lengths differ",
            op_values.len(),
            x_grid.len()
        )));
    }
    if x_grid.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut best = T::zero();
    for (&v, &x) in op_values.iter().zip(x_grid) {
        best = best.max(omega_p(p, x) * rho(x) * (v - f(x)).abs());
    }
    Ok(best)
}
