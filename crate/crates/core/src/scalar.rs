//! Generic scalar abstraction and shared numeric primitives.
//!
//! Everything numerical in this crate is generic over [`Scalar`], a float
//! abstraction satisfied by `f32` and `f64`. The concrete alias used by the
//! report/CLI layer is [`crate::Real`] (= `f64`).
//!
//! This module also houses the three low-level primitives the rest of the
//! crate leans on: a log-factorial accurate enough for log-space weight
//! evaluation, Neumaier compensated summation for bit-reproducible series
//! sums, and Gauss-Legendre rules for the smoothing-mean integrals.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar the library is generic over.
///
/// Implemented (via the blanket impl) by `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts from `f64`, which cannot fail for finite constants used here.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant must convert into Scalar")
    }

    /// Converts from `u64` with the usual float rounding.
    fn from_u64_lossy(v: u64) -> Self {
        Self::from_u64(v).expect("u64 must convert into Scalar")
    }

    /// Converts to `f64` for diagnostics; NaN when the value has no image.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// The constant 2.
    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// The constant 1/2.
    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Exact factorials through 20! — the largest that fits in a `u64`.
const FACTORIALS: [u64; 21] = [
    1,
    1,
    2,
    6,
    24,
    120,
    720,
    5_040,
    40_320,
    362_880,
    3_628_800,
    39_916_800,
    479_001_600,
    6_227_020_800,
    87_178_291_200,
    1_307_674_368_000,
    20_922_789_888_000,
    355_687_428_096_000,
    6_402_373_705_728_000,
    121_645_100_408_832_000,
    2_432_902_008_176_640_000,
];

/// ln(2π)/2, the additive constant of the asymptotic log-factorial series.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// ln(k!), exact through k = 20 and via an asymptotic series beyond.
///
/// For k ≥ 21 the truncation error of the series is below 1e-17 in absolute
/// terms, so the result is correct to f64 rounding; direct evaluation of k!
/// overflows beyond k = 170, which rules the naive route out for the large-k
/// tails the operators sum over.
pub fn ln_factorial<T: Scalar>(k: u64) -> T {
    if k <= 20 {
        return T::from_u64_lossy(FACTORIALS[k as usize]).ln();
    }
    let kf = T::from_u64_lossy(k);
    let inv = kf.recip();
    let inv2 = inv * inv;
    // 1/(12k) - 1/(360k^3) + 1/(1260k^5) - 1/(1680k^7) + 1/(1188k^9)
    let series = inv
        * (T::from_f64_lossy(1.0 / 12.0)
            + inv2
                * (T::from_f64_lossy(-1.0 / 360.0)
                    + inv2
                        * (T::from_f64_lossy(1.0 / 1260.0)
                            + inv2
                                * (T::from_f64_lossy(-1.0 / 1680.0)
                                    + inv2 * T::from_f64_lossy(1.0 / 1188.0)))));
    (kf + T::half()) * kf.ln() - kf + T::from_f64_lossy(HALF_LN_TWO_PI) + series
}

/// Neumaier-compensated accumulator.
///
/// Summation order is fixed by the caller (ascending k everywhere in this
/// crate), so the result is bit-reproducible across runs and thread counts.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T: Scalar> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CompensatedSum<T> {
    /// An empty accumulator.
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    /// Adds one term.
    pub fn add(&mut self, term: T) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    /// The compensated total.
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

/// Sums a slice with compensation, in slice order.
pub fn compensated_total<T: Scalar>(terms: &[T]) -> T {
    let mut acc = CompensatedSum::new();
    for &t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1],
/// returned in ascending node order.
///
/// Nodes are found by Newton iteration on the Legendre recurrence from the
/// classical cosine initial guess; for the orders used here (≤ 32) this
/// converges to machine precision in a handful of steps.
pub fn gauss_legendre<T: Scalar>(order: usize) -> Vec<(T, T)> {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut rule: Vec<(T, T)> = Vec::with_capacity(n);
    // Upper half of the nodes (positive side), including the centre for odd n.
    for i in 1..=n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = T::from_f64_lossy(guess);
        for _ in 0..60 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() <= T::epsilon() * (x.abs() + T::one()) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = T::two() / ((T::one() - x * x) * dp * dp);
        rule.push((x, w));
    }
    // Mirror to the negative side; the centre node of an odd rule sits at
    // x ≈ 0 (possibly a sub-epsilon residual) and must not be duplicated,
    // while genuine positive nodes are at least O(1/n) away from zero.
    let mirrored: Vec<(T, T)> = rule
        .iter()
        .filter(|(x, _)| *x > T::epsilon())
        .map(|&(x, w)| (-x, w))
        .collect();
    rule.extend(mirrored);
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("nodes are finite"));
    rule
}

/// Evaluates (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p_prev = T::one(); // P_0
    let mut p = x; // P_1
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 1..n {
        let kf = T::from_u64_lossy(k as u64);
        let next = ((T::two() * kf + T::one()) * x * p - kf * p_prev) / (kf + T::one());
        p_prev = p;
        p = next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1); nodes are interior so the
    // denominator never vanishes where this is called.
    let nf = T::from_u64_lossy(n as u64);
    let dp = nf * (x * p - p_prev) / (x * x - T::one());
    (p, dp)
}

/// Maps a [-1, 1] rule onto [lo, hi].
pub fn map_rule<T: Scalar>(rule: &[(T, T)], lo: T, hi: T) -> Vec<(T, T)> {
    let half_width = (hi - lo) * T::half();
    let mid = (hi + lo) * T::half();
    rule.iter()
        .map(|&(x, w)| (mid + half_width * x, w * half_width))
        .collect()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // oracle values recorded at full precision
mod tests {
    use super::*;

    // High-precision reference values (computed with 60-digit arithmetic).
    const LN_FACT_REFS: [(u64, f64); 7] = [
        (20, 42.335_616_460_753_485_03),
        (21, 45.380_138_898_476_908_03),
        (25, 58.003_605_222_980_519_94),
        (100, 363.739_375_555_563_490_1),
        (170, 706.573_062_245_787_347_1),
        (1_000, 5_912.128_178_488_163_349),
        (1_000_000, 12_815_518.384_658_169_62),
    ];

    #[test]
    fn ln_factorial_matches_high_precision_references() {
        for &(k, reference) in &LN_FACT_REFS {
            let got: f64 = ln_factorial(k);
            let rel = (got - reference).abs() / reference;
            assert!(
                rel <= 5e-16,
                "ln({k}!) = {got}, reference {reference}, rel err {rel}"
            );
        }
    }

    #[test]
    fn ln_factorial_is_exact_at_small_k() {
        let lf0: f64 = ln_factorial(0);
        let lf1: f64 = ln_factorial(1);
        assert_eq!(lf0, 0.0);
        assert_eq!(lf1, 0.0);
        let lf5: f64 = ln_factorial(5);
        assert_eq!(lf5, 120f64.ln());
    }

    #[test]
    fn ln_factorial_is_continuous_across_the_table_boundary() {
        // ln(21!) = ln(20!) + ln 21 ties the series regime to the exact table.
        let via_table: f64 = ln_factorial::<f64>(20) + 21f64.ln();
        let via_series: f64 = ln_factorial(21);
        assert!((via_table - via_series).abs() < 1e-13);
    }

    #[test]
    fn ln_factorial_works_in_f32() {
        let got: f32 = ln_factorial(25);
        assert!((got - 58.003_605f32).abs() < 1e-3);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        // 1 + 1e-16 repeated: the naive sum stays at 1, the compensated sum
        // tracks the accumulated small terms.
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        let expected = 1.0 + 1e-10;
        assert!((acc.value() - expected).abs() < 1e-15);
    }

    #[test]
    fn compensated_total_sums_in_order() {
        let terms = [1e100, 1.0, -1e100];
        assert_eq!(compensated_total(&terms), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // An n-point rule is exact through degree 2n-1.
        let rule = gauss_legendre::<f64>(16);
        assert_eq!(rule.len(), 16);
        for degree in 0..=31u32 {
            let integral: f64 = rule
                .iter()
                .map(|&(x, w)| w * x.powi(degree as i32))
                .sum();
            let exact = if degree % 2 == 1 {
                0.0
            } else {
                2.0 / (f64::from(degree) + 1.0)
            };
            assert!(
                (integral - exact).abs() < 1e-13,
                "degree {degree}: got {integral}, want {exact}"
            );
        }
    }

    #[test]
    fn gauss_legendre_nodes_are_symmetric_and_weights_sum_to_two() {
        for order in [2usize, 5, 15, 16] {
            let rule = gauss_legendre::<f64>(order);
            assert_eq!(rule.len(), order);
            let wsum: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13, "order {order}: {wsum}");
            for i in 0..order {
                let (x_lo, w_lo) = rule[i];
                let (x_hi, w_hi) = rule[order - 1 - i];
                assert!((x_lo + x_hi).abs() < 1e-14);
                assert!((w_lo - w_hi).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn map_rule_transforms_interval() {
        let rule = gauss_legendre::<f64>(8);
        let mapped = map_rule(&rule, 0.0, 2.0);
        let integral: f64 = mapped.iter().map(|&(x, w)| w * x).sum();
        assert!((integral - 2.0).abs() < 1e-13); // ∫_0^2 x dx = 2
    }

    #[test]
    fn gauss_legendre_works_in_f32() {
        let rule = gauss_legendre::<f32>(8);
        let wsum: f32 = rule.iter().map(|&(_, w)| w).sum();
        assert!((wsum - 2.0).abs() < 1e-5);
    }
}
