//! Unary generator functions on extended-real intervals.
//!
//! A [`UnaryFn`] is an immutable descriptor tree: a catalog builtin, an
//! affine wrap around another function, a composition, a piecewise table of
//! closed-form segments, or the numerical inverse of a monotone function.
//! Every node knows its domain and evaluates to an [`XReal`].

mod catalog;
pub mod expr;
mod inverse;
pub mod probe;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::xreal::{AffineMap, XReal, XRealError};

pub use catalog::Builtin;
pub use expr::{Expr, ParseError};
pub use inverse::{inverse_monotone, BISECTION_BUDGET};
pub use probe::{
    continuity_probe, monotonicity_probe, sample_grid, Direction, ProbeConfig, ProbeReport,
    Scheme, Verdict, Witness,
};

/// Relative slack within which a value just outside a domain is snapped onto
/// the endpoint. Covers rounding in affine reparametrizations like
/// `(x − 2b)/k` evaluated at the anchor.
const SNAP_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenFnError {
    #[error("{x} is outside the domain {domain}")]
    Domain { x: XReal, domain: Interval },
    #[error("composition domain mismatch: inner({x}) = {inner_value} leaves the outer domain {outer_domain}")]
    DomainMismatch { x: XReal, inner_value: XReal, outer_domain: Interval },
    #[error("{y} is not bracketed by the endpoint values {lo_value} and {hi_value}")]
    NotBracketed { y: XReal, lo_value: XReal, hi_value: XReal },
    #[error("monotonicity violated near x = {x}")]
    MonotonicityViolation { x: XReal },
    #[error("bisection did not converge within {0} iterations")]
    BudgetExhausted(usize),
    #[error("evaluation at {x} produced NaN")]
    NotANumber { x: XReal },
    #[error(transparent)]
    Arithmetic(#[from] XRealError),
    #[error("invalid function descriptor: {0}")]
    Invalid(String),
}

/// An interval of the extended real line. Infinite endpoints may be closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: XReal,
    pub hi: XReal,
    #[serde(default = "closed_default", skip_serializing_if = "is_true")]
    pub lo_closed: bool,
    #[serde(default = "closed_default", skip_serializing_if = "is_true")]
    pub hi_closed: bool,
}

fn closed_default() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl Interval {
    pub fn closed(lo: XReal, hi: XReal) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn new(lo: XReal, hi: XReal, lo_closed: bool, hi_closed: bool) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn unit() -> Self {
        Interval::closed(XReal::ZERO, XReal::ONE)
    }

    pub fn extended_line() -> Self {
        Interval::closed(XReal::NegInf, XReal::PosInf)
    }

    pub fn contains(&self, x: XReal) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lo_ok = other.lo > self.lo || (other.lo == self.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Pulls a finite value lying within rounding distance outside the
    /// interval back onto the nearest endpoint. Other values pass through.
    pub fn snap(&self, x: XReal) -> XReal {
        if self.contains(x) {
            return x;
        }
        let XReal::Finite(v) = x else { return x };
        for (end, closed) in [(self.lo, self.lo_closed), (self.hi, self.hi_closed)] {
            if let (XReal::Finite(e), true) = (end, closed) {
                if (v - e).abs() <= SNAP_REL * e.abs().max(1.0) {
                    return end;
                }
            }
        }
        x
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Which side of the wrapped function an affine map sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x ↦ m(f(x))`
    Outer,
    /// `x ↦ f(m(x))`
    Inner,
}

/// One closed-form piece, active from `from` up to the next breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: XReal,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Catalog(Builtin),
    Affine { map: AffineMap, inner: Box<UnaryFn>, side: Side },
    Compose { outer: Box<UnaryFn>, inner: Box<UnaryFn> },
    /// Segment `i` covers `[from_i, from_{i+1})`; the last one runs to the
    /// domain's upper end.
    Piecewise(Vec<Segment>),
    /// The inverse of a continuous strictly monotone function, by bisection.
    Inverse { inner: Box<UnaryFn>, tol: f64 },
}

/// A generator function descriptor together with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct UnaryFn {
    form: Form,
    domain: Interval,
}

impl UnaryFn {
    pub fn builtin(b: Builtin) -> Result<Self, GenFnError> {
        b.validate_params().map_err(GenFnError::Invalid)?;
        Ok(UnaryFn { domain: b.natural_domain(), form: Form::Catalog(b) })
    }

    pub fn neg_log() -> Self {
        Self::builtin(Builtin::NegLog).unwrap()
    }

    pub fn exp_neg() -> Self {
        Self::builtin(Builtin::ExpNeg).unwrap()
    }

    pub fn reciprocal_residual() -> Self {
        Self::builtin(Builtin::ReciprocalResidual).unwrap()
    }

    pub fn cauchy() -> Self {
        Self::builtin(Builtin::Cauchy).unwrap()
    }

    pub fn log_pos() -> Self {
        Self::builtin(Builtin::LogPos).unwrap()
    }

    pub fn exp_pos() -> Self {
        Self::builtin(Builtin::ExpPos).unwrap()
    }

    pub fn quadratic_h() -> Self {
        Self::builtin(Builtin::QuadraticH).unwrap()
    }

    pub fn bernstein_h() -> Self {
        Self::builtin(Builtin::BernsteinH).unwrap()
    }

    pub fn identity() -> Self {
        Self::builtin(Builtin::Identity).unwrap()
    }

    pub fn constant(value: f64) -> Self {
        Self::builtin(Builtin::Constant { value }).unwrap()
    }

    pub fn power_neg_log(p: f64) -> Result<Self, GenFnError> {
        Self::builtin(Builtin::PowerNegLog { p })
    }

    /// `x ↦ m(f(x))`, defined wherever `f` is.
    pub fn affine_outer(map: AffineMap, inner: UnaryFn) -> Self {
        UnaryFn {
            domain: inner.domain,
            form: Form::Affine { map, inner: Box::new(inner), side: Side::Outer },
        }
    }

    /// `x ↦ f(m(x))`, on the preimage of `f`'s domain.
    pub fn affine_inner(map: AffineMap, inner: UnaryFn) -> Result<Self, GenFnError> {
        let domain = match map.inverse() {
            Some(inv) => {
                let (a, b) = (inv.apply(inner.domain.lo), inv.apply(inner.domain.hi));
                let (lc, hc) = (inner.domain.lo_closed, inner.domain.hi_closed);
                if map.k > 0.0 {
                    Interval::new(a, b, lc, hc)
                } else {
                    Interval::new(b, a, hc, lc)
                }
            }
            None if inner.domain.contains(XReal::Finite(map.b)) => Interval::extended_line(),
            None => {
                return Err(GenFnError::Invalid(format!(
                    "constant map value {} lies outside {}",
                    map.b, inner.domain
                )))
            }
        };
        Ok(UnaryFn { domain, form: Form::Affine { map, inner: Box::new(inner), side: Side::Inner } })
    }

    /// Builds a piecewise function. Breakpoints must be strictly increasing,
    /// start at the domain's lower end and stay inside the domain.
    pub fn piecewise(domain: Interval, segments: Vec<Segment>) -> Result<Self, GenFnError> {
        let first = segments.first().ok_or_else(|| GenFnError::Invalid("no segments".into()))?;
        if first.from != domain.lo {
            return Err(GenFnError::Invalid(format!(
                "first breakpoint {} must equal the domain start {}",
                first.from, domain.lo
            )));
        }
        for w in segments.windows(2) {
            if w[1].from <= w[0].from {
                return Err(GenFnError::Invalid("breakpoints must be strictly increasing".into()));
            }
        }
        if let Some(bad) = segments.iter().find(|s| s.from > domain.hi) {
            return Err(GenFnError::Invalid(format!("breakpoint {} outside {domain}", bad.from)));
        }
        Ok(UnaryFn { domain, form: Form::Piecewise(segments) })
    }

    /// Convenience for piecewise tables given as `(breakpoint, expression)`.
    pub fn piecewise_from(domain: Interval, table: &[(f64, &str)]) -> Result<Self, GenFnError> {
        let segments = table
            .iter()
            .map(|&(from, src)| {
                let from = XReal::from_f64(from)?;
                let expr = Expr::parse(src).map_err(|e| GenFnError::Invalid(e.to_string()))?;
                Ok(Segment { from, expr })
            })
            .collect::<Result<Vec<_>, GenFnError>>()?;
        Self::piecewise(domain, segments)
    }

    /// The numerical inverse of a continuous strictly monotone function,
    /// defined on the interval spanned by its endpoint values.
    pub fn inverse_of(inner: UnaryFn, tol: f64) -> Result<Self, GenFnError> {
        let a = inner.eval(inner.domain.lo)?;
        let b = inner.eval(inner.domain.hi)?;
        if a == b {
            return Err(GenFnError::MonotonicityViolation { x: inner.domain.lo });
        }
        let domain = Interval::closed(a.min(b), a.max(b));
        Ok(UnaryFn { domain, form: Form::Inverse { inner: Box::new(inner), tol } })
    }

    /// The same function on a sub-interval of its domain.
    pub fn restrict(&self, domain: Interval) -> Result<Self, GenFnError> {
        if !self.domain.contains_interval(&domain) {
            return Err(GenFnError::Invalid(format!(
                "{domain} is not contained in the domain {}",
                self.domain
            )));
        }
        Ok(UnaryFn { form: self.form.clone(), domain })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    /// Evaluates at `x`, which must lie in the domain.
    pub fn eval(&self, x: XReal) -> Result<XReal, GenFnError> {
        if !self.domain.contains(x) {
            return Err(GenFnError::Domain { x, domain: self.domain });
        }
        match &self.form {
            Form::Catalog(b) => Ok(b.eval(x)),
            Form::Affine { map, inner, side: Side::Outer } => Ok(map.apply(inner.eval(x)?)),
            Form::Affine { map, inner, side: Side::Inner } => {
                inner.eval(inner.domain.snap(map.apply(x)))
            }
            Form::Compose { outer, inner } => {
                let mid = inner.eval(x)?;
                outer.eval(outer.domain.snap(mid))
            }
            Form::Piecewise(segments) => {
                let seg = segments.iter().rev().find(|s| s.from <= x).unwrap_or(&segments[0]);
                XReal::from_f64(seg.expr.eval(x.to_f64()))
                    .map_err(|_| GenFnError::NotANumber { x })
            }
            Form::Inverse { inner, tol } => inverse_monotone(inner, x, *tol),
        }
    }

    /// `eval` on a plain float.
    pub fn eval_f64(&self, x: f64) -> Result<XReal, GenFnError> {
        self.eval(XReal::from_f64(x)?)
    }
}

/// Free-function form of [`UnaryFn::eval`].
pub fn evaluate(f: &UnaryFn, x: XReal) -> Result<XReal, GenFnError> {
    f.eval(x)
}

/// `outer ∘ inner`. The range of `inner` is checked against the domain of
/// `outer` on a uniform grid plus the domain endpoints.
pub fn compose(outer: UnaryFn, inner: UnaryFn) -> Result<UnaryFn, GenFnError> {
    let samples = sample_grid(&inner, 257, Scheme::EndpointGeometric)?;
    for (x, y) in samples {
        if !outer.domain.contains(outer.domain.snap(y)) {
            return Err(GenFnError::DomainMismatch { x, inner_value: y, outer_domain: outer.domain });
        }
    }
    Ok(UnaryFn {
        domain: inner.domain,
        form: Form::Compose { outer: Box::new(outer), inner: Box::new(inner) },
    })
}
