//! The registry of test functions with weighted-space metadata, and a small
//! expression language so callers can supply f at the command line.
//!
//! A [`TestFunction`] bundles an evaluator with the smallest polynomial class
//! index p such that f ∈ C_p, optional first/second derivatives, and — where
//! a closed form exists — analytic moduli of continuity and smoothness.
//! Analytic moduli matter because grid-estimated moduli are lower bounds of
//! the true suprema: using them on the right-hand side of an inequality check
//! would manufacture false failures.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Expression AST
// ---------------------------------------------------------------------------

/// Binary operators, in the usual precedence order (power highest).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// The function names the expression language knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

/// A parsed expression in the single variable `x`.
///
/// Immutable and freely shareable across threads; [`fmt::Display`] prints a
/// canonical form that [`parse_expr`] maps back to the identical tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A nonnegative numeric literal (negative values arise via [`Expr::Neg`]).
    Literal(f64),
    /// The evaluation variable.
    Var,
    /// Unary negation.
    Neg(Box<Expr>),
    /// A binary operation.
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// A call of one of the known functions.
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn syntax_error<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::SyntaxError {
        offset,
        message: message.into(),
    })
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let kind = match b {
                    b'+' => TokenKind::Plus,
                    b'-' => TokenKind::Minus,
                    b'*' => TokenKind::Star,
                    b'/' => TokenKind::Slash,
                    b'^' => TokenKind::Caret,
                    b'(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                };
                tokens.push(Token { kind, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent part: e/E, optional sign, mandatory digits.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                match text.parse::<f64>() {
                    Ok(v) => tokens.push(Token {
                        kind: TokenKind::Num(v),
                        offset: start,
                    }),
                    Err(_) => return syntax_error(start, format!("malformed number `{text}`")),
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return syntax_error(
                    start,
                    format!("unexpected character `{}`", &src[start..start + 1]),
                )
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := term (('+' | '-') term)*          left-associative
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // term := unary (('*' | '/') unary)*        left-associative
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary := '-' unary | power               so -x^2 = -(x^2), 2^-3 legal
    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' unary)?               right-associative
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    // atom := number | 'x' | func '(' expr ')' | '(' expr ')'
    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(token) = self.advance() else {
            return syntax_error(offset, "unexpected end of input");
        };
        match &token.kind {
            TokenKind::Num(v) => Ok(Expr::Literal(*v)),
            TokenKind::Ident(name) if name == "x" => Ok(Expr::Var),
            TokenKind::Ident(name) => {
                let name = name.clone();
                if let Some(func) = Func::from_name(&name) {
                    let open = self.offset();
                    if !self.eat(&TokenKind::LParen) {
                        return syntax_error(open, format!("expected `(` after `{name}`"));
                    }
                    let arg = self.expr()?;
                    let close = self.offset();
                    if !self.eat(&TokenKind::RParen) {
                        return syntax_error(close, "expected `)`");
                    }
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    Err(Error::UnknownIdentifier { name, offset })
                }
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                let close = self.offset();
                if !self.eat(&TokenKind::RParen) {
                    return syntax_error(close, "expected `)`");
                }
                Ok(inner)
            }
            _ => syntax_error(offset, "expected a value"),
        }
    }
}

/// Parses an expression in `x` with the grammar
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary (('*' | '/') unary)*
/// unary := '-' unary | power
/// power := atom ('^' unary)?
/// atom  := number | 'x' | func '(' expr ')' | '(' expr ')'
/// ```
///
/// `+ − × ÷` are left-associative, `^` right-associative and binding tighter
/// than unary minus, so `-x^2` is `-(x^2)` and `2^-3` is legal. Only `^` is
/// power: `2**x` is a syntax error at the second `*`. Identifiers other than
/// `x` and the function names (`exp`, `sin`, `cos`, `abs`, `sqrt`, `log`)
/// are rejected with their byte offset.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: src.len(),
    };
    let expr = parser.expr()?;
    if let Some(extra) = parser.peek() {
        return syntax_error(extra.offset, "unexpected trailing input");
    }
    Ok(expr)
}

/// Evaluates an expression at `x` strictly: domain violations (logarithm of
/// a nonpositive value, square root of a negative value, division by zero,
/// fractional power of a negative base) and overflow to a non-finite value
/// are reported as [`Error::DomainError`], never returned as NaN/∞.
pub fn eval_expr<T: Scalar>(expr: &Expr, x: T) -> Result<T> {
    let value = match expr {
        Expr::Literal(v) => T::from_f64_lossy(*v),
        Expr::Var => x,
        Expr::Neg(inner) => -eval_expr(inner, x)?,
        Expr::Bin(op, lhs, rhs) => {
            let l = eval_expr(lhs, x)?;
            let r = eval_expr(rhs, x)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == T::zero() {
                        return Err(Error::DomainError(format!(
                            "division by zero at x = {}",
                            x.to_f64_lossy()
                        )));
                    }
                    l / r
                }
                BinOp::Pow => {
                    let p = l.powf(r);
                    if p.is_nan() && !l.is_nan() && !r.is_nan() {
                        return Err(Error::DomainError(format!(
                            "{} raised to {} is undefined",
                            l.to_f64_lossy(),
                            r.to_f64_lossy()
                        )));
                    }
                    p
                }
            }
        }
        Expr::Call(func, arg) => {
            let a = eval_expr(arg, x)?;
            match func {
                Func::Exp => a.exp(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < T::zero() {
                        return Err(Error::DomainError(format!(
                            "sqrt of negative value {}",
                            a.to_f64_lossy()
                        )));
                    }
                    a.sqrt()
                }
                Func::Log => {
                    if a <= T::zero() {
                        return Err(Error::DomainError(format!(
                            "log of nonpositive value {}",
                            a.to_f64_lossy()
                        )));
                    }
                    a.ln()
                }
            }
        }
    };
    if !value.is_finite() {
        return Err(Error::DomainError(format!(
            "expression overflowed at x = {}",
            x.to_f64_lossy()
        )));
    }
    Ok(value)
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Literal(_) | Expr::Var | Expr::Call(..) => 5,
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, needs_parens: bool) -> fmt::Result {
        if needs_parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical printing: parentheses appear exactly where the grammar needs
/// them, so `parse_expr(e.to_string())` reproduces `e`. Literals print in
/// shortest round-trip form.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{v:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                // `-` binds looser than `^` (whose base must be an atom) and
                // tighter than `*`; anything below needs parentheses.
                inner.fmt_child(f, inner.precedence() < 3)
            }
            Expr::Bin(op, lhs, rhs) => {
                let prec = op.precedence();
                if *op == BinOp::Pow {
                    // Right-associative and atom-based: parenthesize any
                    // non-atom base, and any exponent looser than unary.
                    lhs.fmt_child(f, lhs.precedence() < 5)?;
                    write!(f, "^")?;
                    rhs.fmt_child(f, rhs.precedence() < 3)
                } else {
                    lhs.fmt_child(f, lhs.precedence() < prec)?;
                    write!(f, "{}", op.symbol())?;
                    // Left-associative: an equal-precedence right child came
                    // from explicit parentheses — keep them.
                    rhs.fmt_child(f, rhs.precedence() <= prec)
                }
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// Test-function registry
// ---------------------------------------------------------------------------

type Evaluator<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A test function together with the metadata the bound checks need: the
/// smallest p with f ∈ C_p, optional derivatives, and optional analytic
/// moduli h ↦ ω₁(h), h ↦ ω₂(h) in the sup norm.
#[derive(Clone)]
pub struct TestFunction<T: Scalar> {
    name: String,
    evaluator: Evaluator<T>,
    p_class: u32,
    d1: Option<Evaluator<T>>,
    d2: Option<Evaluator<T>>,
    modulus1: Option<Evaluator<T>>,
    modulus2: Option<Evaluator<T>>,
}

impl<T: Scalar> fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("p_class", &self.p_class)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .field("modulus1", &self.modulus1.is_some())
            .field("modulus2", &self.modulus2.is_some())
            .finish()
    }
}

impl<T: Scalar> TestFunction<T> {
    /// The registry (or canonical-expression) name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates f(t).
    pub fn eval(&self, t: T) -> T {
        (self.evaluator)(t)
    }

    /// The smallest p with f ∈ C_p; drives the default weight in reports.
    pub fn p_class(&self) -> u32 {
        self.p_class
    }

    /// First derivative, if the function carries one.
    pub fn d1(&self, t: T) -> Option<T> {
        self.d1.as_ref().map(|d| d(t))
    }

    /// Second derivative, if the function carries one.
    pub fn d2(&self, t: T) -> Option<T> {
        self.d2.as_ref().map(|d| d(t))
    }

    /// Analytic sup-norm modulus of continuity ω₁(h), if known.
    pub fn analytic_modulus1(&self, h: T) -> Option<T> {
        self.modulus1.as_ref().map(|m| m(h))
    }

    /// Analytic sup-norm modulus of smoothness ω₂(h), if known.
    pub fn analytic_modulus2(&self, h: T) -> Option<T> {
        self.modulus2.as_ref().map(|m| m(h))
    }

    /// A shareable copy of the evaluator, for handing to operator kernels.
    pub fn evaluator(&self) -> Evaluator<T> {
        Arc::clone(&self.evaluator)
    }

    /// Wraps a parsed expression. The class index defaults to 0 (norms are
    /// then grid-clipped rather than classified), derivative-based checks
    /// are disabled, and strict evaluation errors are mapped to NaN so the
    /// operator layer reports them as non-finite values with their location.
    pub fn from_expr(expr: Expr) -> Self {
        let name = expr.to_string();
        Self {
            name,
            evaluator: Arc::new(move |t| eval_expr(&expr, t).unwrap_or_else(|_| T::nan())),
            p_class: 0,
            d1: None,
            d2: None,
            modulus1: None,
            modulus2: None,
        }
    }
}

/// The registry names, in presentation order.
pub fn builtin_names() -> &'static [&'static str] {
    &[
        "const1",
        "linear",
        "square",
        "cube",
        "quartic",
        "exp_decay",
        "sine",
        "abs_kink",
        "runge",
    ]
}

/// Looks up a registry function by name.
///
/// The registry exercises every weighted class the bounds quantify over:
/// the monomials t^0..t^4 (p = 0..4), e^{−t} and sin t and the Runge bump
/// 1/(1+t²) as bounded smooth functions with known moduli, and |t−1| whose
/// kink stresses the Kantorovich cell quadrature. Analytic moduli are
/// sup-norm moduli; sine's are capped at their global amplitudes 2 and 4
/// once h exceeds π.
pub fn builtin<T: Scalar>(name: &str) -> Result<TestFunction<T>> {
    let make = |name: &str,
                p_class: u32,
                evaluator: Evaluator<T>,
                d1: Option<Evaluator<T>>,
                d2: Option<Evaluator<T>>,
                modulus1: Option<Evaluator<T>>,
                modulus2: Option<Evaluator<T>>| {
        TestFunction {
            name: name.to_string(),
            evaluator,
            p_class,
            d1,
            d2,
            modulus1,
            modulus2,
        }
    };
    Ok(match name {
        "const1" => make(
            name,
            0,
            Arc::new(|_| T::one()),
            Some(Arc::new(|_| T::zero())),
            Some(Arc::new(|_| T::zero())),
            None,
            None,
        ),
        "linear" => make(
            name,
            1,
            Arc::new(|t| t),
            Some(Arc::new(|_| T::one())),
            Some(Arc::new(|_| T::zero())),
            None,
            None,
        ),
        "square" => make(
            name,
            2,
            Arc::new(|t| t * t),
            Some(Arc::new(|t| T::two() * t)),
            Some(Arc::new(|_| T::two())),
            None,
            None,
        ),
        "cube" => make(
            name,
            3,
            Arc::new(|t: T| t.powi(3)),
            Some(Arc::new(|t| T::from_f64_lossy(3.0) * t * t)),
            Some(Arc::new(|t| T::from_f64_lossy(6.0) * t)),
            None,
            None,
        ),
        "quartic" => make(
            name,
            4,
            Arc::new(|t: T| t.powi(4)),
            Some(Arc::new(|t: T| T::from_f64_lossy(4.0) * t.powi(3))),
            Some(Arc::new(|t| T::from_f64_lossy(12.0) * t * t)),
            None,
            None,
        ),
        "exp_decay" => make(
            name,
            0,
            Arc::new(|t: T| (-t).exp()),
            Some(Arc::new(|t: T| -(-t).exp())),
            Some(Arc::new(|t: T| (-t).exp())),
            // sup_x |e^{−x−h} − e^{−x}| = 1 − e^{−h}, at x = 0.
            Some(Arc::new(|h: T| T::one() - (-h).exp())),
            // Δ²_h e^{−x} = e^{−x}(1 − e^{−h})², again maximal at x = 0.
            Some(Arc::new(|h: T| (T::one() - (-h).exp()).powi(2))),
        ),
        "sine" => make(
            name,
            0,
            Arc::new(|t: T| t.sin()),
            Some(Arc::new(|t: T| t.cos())),
            Some(Arc::new(|t: T| -t.sin())),
            // 2|sin(h/2)| up to its amplitude 2 at h = π, capped beyond.
            Some(Arc::new(|h: T| {
                let h = h.min(T::from_f64_lossy(std::f64::consts::PI));
                T::two() * (h * T::half()).sin()
            })),
            // |Δ²_h sin x| = 4 sin²(h/2)|sin(x+h)|, capped at 4 beyond π.
            Some(Arc::new(|h: T| {
                let h = h.min(T::from_f64_lossy(std::f64::consts::PI));
                let s = (h * T::half()).sin();
                T::from_f64_lossy(4.0) * s * s
            })),
        ),
        "abs_kink" => make(
            name,
            1,
            Arc::new(|t: T| (t - T::one()).abs()),
            // Not C¹ (kink at t = 1): no derivatives, and only the Lipschitz
            // first modulus ω₁(h) = h is analytic.
            None,
            None,
            Some(Arc::new(|h| h)),
            None,
        ),
        "runge" => make(
            name,
            0,
            Arc::new(|t| (T::one() + t * t).recip()),
            Some(Arc::new(|t| {
                let d = T::one() + t * t;
                -T::two() * t / (d * d)
            })),
            Some(Arc::new(|t| {
                let d = T::one() + t * t;
                (T::from_f64_lossy(6.0) * t * t - T::two()) / d.powi(3)
            })),
            None,
            None,
        ),
        _ => return Err(Error::UnknownFunction(name.to_string())),
    })
}
