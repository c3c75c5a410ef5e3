//! Built-in generator functions.

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::xreal::XReal;

/// Catalog entries. Each has a natural domain and evaluates its infinite
/// endpoints by tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    /// `−ln x` on `[0,1]`, `+∞` at 0.
    NegLog,
    /// `e^{−x}` on `[0,+∞]`, 0 at `+∞`.
    ExpNeg,
    /// `−p·ln x` on `[0,1]`, `p > 0`.
    PowerNegLog { p: f64 },
    /// `(1−x)/x` on `[0,1]`, `+∞` at 0.
    ReciprocalResidual,
    /// `1/(1+x)` on `[0,+∞]`, 0 at `+∞`.
    Cauchy,
    /// `ln x` on `[0,1]`, `−∞` at 0.
    LogPos,
    /// `e^{x}` on `[−∞,0]`, 0 at `−∞`.
    ExpPos,
    /// `x²` on `[0,+∞]`.
    QuadraticH,
    /// `(x²+x)/2` on `[0,1]`.
    BernsteinH,
    /// `x` on `[−∞,+∞]`.
    Identity,
    /// A constant on `[−∞,+∞]`.
    Constant { value: f64 },
}

impl Builtin {
    pub const ALL_NAMES: [&'static str; 11] = [
        "neg_log",
        "exp_neg",
        "power_neg_log",
        "reciprocal_residual",
        "cauchy",
        "log_pos",
        "exp_pos",
        "quadratic_h",
        "bernstein_h",
        "identity",
        "constant",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::NegLog => "neg_log",
            Builtin::ExpNeg => "exp_neg",
            Builtin::PowerNegLog { .. } => "power_neg_log",
            Builtin::ReciprocalResidual => "reciprocal_residual",
            Builtin::Cauchy => "cauchy",
            Builtin::LogPos => "log_pos",
            Builtin::ExpPos => "exp_pos",
            Builtin::QuadraticH => "quadratic_h",
            Builtin::BernsteinH => "bernstein_h",
            Builtin::Identity => "identity",
            Builtin::Constant { .. } => "constant",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            Builtin::NegLog => "-ln x on [0,1]; +inf at 0",
            Builtin::ExpNeg => "exp(-x) on [0,+inf]; 0 at +inf",
            Builtin::PowerNegLog { .. } => "-p ln x on [0,1] (param p > 0); +inf at 0",
            Builtin::ReciprocalResidual => "(1-x)/x on [0,1]; +inf at 0",
            Builtin::Cauchy => "1/(1+x) on [0,+inf]; 0 at +inf",
            Builtin::LogPos => "ln x on [0,1]; -inf at 0",
            Builtin::ExpPos => "exp(x) on [-inf,0]; 0 at -inf",
            Builtin::QuadraticH => "x^2 on [0,+inf]",
            Builtin::BernsteinH => "(x^2+x)/2 on [0,1]",
            Builtin::Identity => "x on [-inf,+inf]",
            Builtin::Constant { .. } => "constant (param value) on [-inf,+inf]",
        }
    }

    /// One representative of every entry, with default parameters.
    pub fn examples() -> Vec<Builtin> {
        vec![
            Builtin::NegLog,
            Builtin::ExpNeg,
            Builtin::PowerNegLog { p: 2.0 },
            Builtin::ReciprocalResidual,
            Builtin::Cauchy,
            Builtin::LogPos,
            Builtin::ExpPos,
            Builtin::QuadraticH,
            Builtin::BernsteinH,
            Builtin::Identity,
            Builtin::Constant { value: 1.0 },
        ]
    }

    pub fn natural_domain(&self) -> Interval {
        match self {
            Builtin::NegLog
            | Builtin::PowerNegLog { .. }
            | Builtin::ReciprocalResidual
            | Builtin::LogPos
            | Builtin::BernsteinH => Interval::unit(),
            Builtin::ExpNeg | Builtin::Cauchy | Builtin::QuadraticH => {
                Interval::closed(XReal::ZERO, XReal::PosInf)
            }
            Builtin::ExpPos => Interval::closed(XReal::NegInf, XReal::ZERO),
            Builtin::Identity | Builtin::Constant { .. } => Interval::extended_line(),
        }
    }

    pub(crate) fn validate_params(&self) -> Result<(), String> {
        match *self {
            Builtin::PowerNegLog { p } if !(p.is_finite() && p > 0.0) => {
                Err(format!("power_neg_log needs p > 0, got {p}"))
            }
            Builtin::Constant { value } if !value.is_finite() => {
                Err(format!("constant needs a finite value, got {value}"))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates at a point already known to lie in the domain.
    pub(crate) fn eval(&self, x: XReal) -> XReal {
        use XReal::*;
        let out = match (*self, x) {
            (Builtin::NegLog, Finite(v)) if v == 0.0 => PosInf,
            (Builtin::NegLog, Finite(v)) => Finite(-v.ln()),
            (Builtin::PowerNegLog { .. }, Finite(v)) if v == 0.0 => PosInf,
            (Builtin::PowerNegLog { p }, Finite(v)) => Finite(-p * v.ln()),
            (Builtin::ReciprocalResidual, Finite(v)) if v == 0.0 => PosInf,
            (Builtin::ReciprocalResidual, Finite(v)) => XReal::new((1.0 - v) / v),
            (Builtin::LogPos, Finite(v)) if v == 0.0 => NegInf,
            (Builtin::LogPos, Finite(v)) => Finite(v.ln()),
            (Builtin::ExpNeg, PosInf) => Finite(0.0),
            (Builtin::ExpNeg, Finite(v)) => Finite((-v).exp()),
            (Builtin::Cauchy, PosInf) => Finite(0.0),
            (Builtin::Cauchy, Finite(v)) => Finite(1.0 / (1.0 + v)),
            (Builtin::ExpPos, NegInf) => Finite(0.0),
            (Builtin::ExpPos, Finite(v)) => Finite(v.exp()),
            (Builtin::QuadraticH, PosInf) => PosInf,
            (Builtin::QuadraticH, Finite(v)) => XReal::new(v * v),
            (Builtin::BernsteinH, Finite(v)) => Finite((v * v + v) / 2.0),
            (Builtin::Identity, x) => x,
            (Builtin::Constant { value }, _) => Finite(value),
            (b, x) => unreachable!("{} evaluated outside its domain at {x}", b.name()),
        };
        match out {
            Finite(v) => XReal::new(v),
            inf => inf,
        }
    }
}
