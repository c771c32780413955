//! Crate-wide error type.
//!
//! All numeric operations are total on valid inputs; errors are reserved for
//! invalid parameters, non-convergent summation/quadrature, and evaluation
//! failures that must not be silently absorbed into results.

/// One failed cell of a batch evaluation, with its `(n, x)` attribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    /// Sequence index of the failed cell.
    pub n: u32,
    /// Evaluation point of the failed cell.
    pub x: f64,
    /// The underlying failure.
    pub error: Box<Error>,
}

/// Errors produced by the library.
///
/// Diagnostic payloads are carried as `f64` regardless of the scalar type the
/// computation ran in; they exist for reporting, not for further arithmetic.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The ascending-k series failed the settling criterion before `k_max`.
    #[error(
        "series truncation did not converge: k_max = {k_max} reached before \
         {streak} consecutive terms settled (alpha = {alpha}, beta = {beta})"
    )]
    TruncationNotConverged {
        alpha: f64,
        beta: f64,
        k_max: u64,
        streak: u32,
    },

    /// Adaptive quadrature hit its depth limit before meeting the tolerance.
    #[error("adaptive quadrature exceeded max depth {max_depth} on [{lo}, {hi}]")]
    QuadratureNotConverged { lo: f64, hi: f64, max_depth: u32 },

    /// A function value required by an operator or norm is not finite.
    #[error("function value at t = {t} is not finite")]
    NonFiniteFunctionValue { t: f64 },

    /// A closed form or expansion was requested at an unsupported order.
    #[error("order {order} is unsupported: {message}")]
    UnsupportedOrder { order: u32, message: &'static str },

    /// The coefficient-extraction fit failed its held-out residual check.
    #[error("coefficient fit is ill-conditioned: held-out residual {residual} exceeds {limit}")]
    IllConditionedFit { residual: f64, limit: f64 },

    /// The rate functional vanishes (x = 0), so the pointwise bound is undefined.
    #[error("rate functional vanishes at x = 0; the pointwise modulus bound excludes that point")]
    DegenerateXi,

    /// A constant estimate was requested over an empty dataset.
    #[error("empty dataset")]
    EmptyDataset,

    /// A table-backed sequence scheme has no entry for the requested index.
    #[error("table scheme has no entry for n = {n} (table holds {len} entries)")]
    IndexOutOfRange { n: u32, len: usize },

    /// The function registry has no entry under this name.
    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    /// The expression text failed to parse.
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },

    /// The expression references an identifier that is neither `x` nor a
    /// known function name.
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// Strict expression evaluation hit a domain violation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A parameter violated a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// One or more batch cells failed; every failure is attributed.
    #[error("batch evaluation failed in {} cell(s); first: n = {}, x = {}: {}",
            .0.len(), .0[0].n, .0[0].x, .0[0].error)]
    Batch(Vec<CellFailure>),

    /// An I/O failure while emitting a report.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;
