//! Generator transformations that preserve the overlap function, and the
//! tests that show other transformations cannot.
//!
//! Every constructor validates its output pair. A valid input that yields an
//! invalid output is reported as [`TransformError::Defect`].

mod collision;
mod jensen;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::genfn::{
    compose, monotonicity_probe, Direction, GenFnError, Interval, ProbeConfig, ProbeReport, UnaryFn,
};
use crate::pair::{self, affine_outer_unchecked, validate_pair, GeneratorPair, Orientation, PairError, ValidationReport, Validity};
use crate::xreal::{AffineMap, XReal};

pub use collision::{collision_falsifier, CollisionVerdict, FalsifierConfig};
pub use jensen::{jensen_affinity_test, AffinityVerdict, JENSEN_BATCH};

/// Bisection tolerance for the numerical inverses inside conjugated routes.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generator is not strictly monotone at the probed resolution")]
    NotInvertible(Box<ProbeReport>),
    #[error("transform of a valid pair failed validation: {:?}", .0.failed())]
    Defect(Box<ValidationReport>),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Gen(#[from] GenFnError),
}

impl TransformError {
    /// Stable identifier for reports.
    pub fn code(&self) -> &'static str {
        match self {
            TransformError::InvalidParams(_) => "InvalidParams",
            TransformError::NotInvertible(_) => "NotInvertible",
            TransformError::Defect(_) => "Defect",
            TransformError::Pair(_) => "PairError",
            TransformError::Gen(_) => "GenFnError",
        }
    }
}

/// A transformed pair with its validation report.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub pair: GeneratorPair,
    pub validation: ValidationReport,
    /// The inner map `h = θ⁻¹∘(cθ + m)` of inner compositions, for inspection.
    pub h: Option<UnaryFn>,
    pub notes: Vec<String>,
}

/// A transform with its parameters, as named in pair-spec files and on the
/// command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "op", content = "params", rename_all = "snake_case")]
pub enum TransformOp {
    AffineOuter { k: f64, b: f64 },
    Shift { b: f64 },
    Normalize,
    ConjugatedOuter { k: f64, b: f64, tol: f64 },
    InnerComposition { c: f64, m: f64, tol: f64 },
    InnerCompositionConjugate { c: f64, m: f64, tol: f64 },
}

impl TransformOp {
    pub const NAMES: [&'static str; 6] = [
        "affine_outer",
        "shift",
        "normalize",
        "conjugated_outer",
        "inner_composition",
        "inner_composition_conjugate",
    ];

    /// Builds an op from its name and named numeric parameters. `tol`
    /// defaults to [`DEFAULT_INVERSE_TOL`].
    pub fn from_parts(op: &str, params: &BTreeMap<String, f64>) -> Result<Self, TransformError> {
        let allowed: &[&str] = match op {
            "affine_outer" => &["k", "b"],
            "conjugated_outer" => &["k", "b", "tol"],
            "shift" => &["b"],
            "normalize" => &[],
            "inner_composition" | "inner_composition_conjugate" => &["c", "m", "tol"],
            other => {
                return Err(TransformError::InvalidParams(format!(
                    "unknown op {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(TransformError::InvalidParams(format!("{op} does not take parameter {extra:?}")));
        }
        let get = |name: &str| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| TransformError::InvalidParams(format!("{op} needs parameter {name:?}")))
        };
        let tol = params.get("tol").copied().unwrap_or(DEFAULT_INVERSE_TOL);
        Ok(match op {
            "affine_outer" => TransformOp::AffineOuter { k: get("k")?, b: get("b")? },
            "shift" => TransformOp::Shift { b: get("b")? },
            "normalize" => TransformOp::Normalize,
            "conjugated_outer" => TransformOp::ConjugatedOuter { k: get("k")?, b: get("b")?, tol },
            "inner_composition" => TransformOp::InnerComposition { c: get("c")?, m: get("m")?, tol },
            _ => TransformOp::InnerCompositionConjugate { c: get("c")?, m: get("m")?, tol },
        })
    }

    pub fn apply(&self, p: &GeneratorPair, cfg: &ProbeConfig) -> Result<Transformed, TransformError> {
        match *self {
            TransformOp::AffineOuter { k, b } => affine_outer_with(p, k, b, cfg),
            TransformOp::Shift { b } => affine_outer_with(p, 1.0, b, cfg),
            TransformOp::Normalize => finish(p, pair::normalize(p), cfg, None, vec![]),
            TransformOp::ConjugatedOuter { k, b, tol } => conjugated_outer_with(p, k, b, tol, cfg),
            TransformOp::InnerComposition { c, m, tol } => inner_composition_with(p, c, m, tol, cfg),
            TransformOp::InnerCompositionConjugate { c, m, tol } => {
                inner_composition_conjugate_with(p, c, m, tol, cfg)
            }
        }
    }
}

fn finish(
    input: &GeneratorPair,
    pair: GeneratorPair,
    cfg: &ProbeConfig,
    h: Option<UnaryFn>,
    notes: Vec<String>,
) -> Result<Transformed, TransformError> {
    let validation = validate_pair(&pair, cfg);
    if validation.overall == Validity::Invalid && validate_pair(input, cfg).is_valid() {
        return Err(TransformError::Defect(Box::new(validation)));
    }
    Ok(Transformed { pair, validation, h, notes })
}

fn finite_params(params: &[(&str, f64)]) -> Result<(), TransformError> {
    match params.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(TransformError::InvalidParams(format!("{name} must be finite, got {v}"))),
        None => Ok(()),
    }
}

/// `(kθ + b, ϑ∘g)` with `g(s) = (s − 2b)/k`. For `k < 0` the result lives in
/// the other orientation.
pub fn affine_outer(p: &GeneratorPair, k: f64, b: f64) -> Result<Transformed, TransformError> {
    affine_outer_with(p, k, b, &ProbeConfig::default())
}

pub fn affine_outer_with(p: &GeneratorPair, k: f64, b: f64, cfg: &ProbeConfig) -> Result<Transformed, TransformError> {
    finite_params(&[("k", k), ("b", b)])?;
    if k == 0.0 {
        return Err(TransformError::InvalidParams("k must be nonzero".into()));
    }
    let out = affine_outer_unchecked(p, k, b)?;
    let mut notes = vec![];
    if out.orientation() != p.orientation() {
        notes.push(format!(
            "k < 0 flips the orientation to {:?}; vartheta is read on {}",
            out.orientation(),
            out.relevant_interval()
        ));
    }
    finish(p, out, cfg, None, notes)
}

/// `θ + b`, `ϑ(· − 2b)`: moves the anchor by `2b`.
pub fn shift(p: &GeneratorPair, b: f64) -> Result<Transformed, TransformError> {
    affine_outer(p, 1.0, b)
}

fn strictly_monotone(f: &UnaryFn, direction: Direction, cfg: &ProbeConfig) -> Result<ProbeReport, TransformError> {
    let report = monotonicity_probe(f, cfg, direction, true);
    if report.passed() {
        Ok(report)
    } else {
        Err(TransformError::NotInvertible(Box::new(report)))
    }
}

fn theta_direction(p: &GeneratorPair) -> Direction {
    match p.orientation() {
        Orientation::StandardDecreasing => Direction::NonIncreasing,
        Orientation::ExtendedIncreasing => Direction::NonDecreasing,
    }
}

/// `(kθ + b, G∘ϑ)` with `G = ϑ∘((· − 2b)/k)∘ϑ⁻¹`, the inverse taken
/// numerically on `[a, +∞]`.
pub fn conjugated_outer(p: &GeneratorPair, k: f64, b: f64, tol: f64) -> Result<Transformed, TransformError> {
    conjugated_outer_with(p, k, b, tol, &ProbeConfig::default())
}

pub fn conjugated_outer_with(
    p: &GeneratorPair,
    k: f64,
    b: f64,
    tol: f64,
    cfg: &ProbeConfig,
) -> Result<Transformed, TransformError> {
    let (pair, report) = conjugated_pair(p, k, b, tol, cfg)?;
    let note = report.caveat.map(|c| format!("vartheta {c}")).into_iter().collect();
    finish(p, pair, cfg, None, note)
}

fn conjugated_pair(
    p: &GeneratorPair,
    k: f64,
    b: f64,
    tol: f64,
    cfg: &ProbeConfig,
) -> Result<(GeneratorPair, ProbeReport), TransformError> {
    finite_params(&[("k", k), ("b", b), ("tol", tol)])?;
    if !(k > 0.0 && b >= 0.0 && tol > 0.0) {
        return Err(TransformError::InvalidParams(format!("needs k > 0, b >= 0 and tol > 0; got k={k}, b={b}, tol={tol}")));
    }
    if p.orientation() != Orientation::StandardDecreasing {
        return Err(TransformError::InvalidParams("conjugated routes need the standard orientation".into()));
    }
    let a = p.anchor();
    let a_new = k * a + 2.0 * b;
    if a_new < a {
        return Err(TransformError::InvalidParams(format!(
            "new anchor {a_new} falls below the current anchor {a}"
        )));
    }
    let v = p.vartheta_relevant();
    let report = strictly_monotone(&v, Direction::NonIncreasing, cfg)?;

    let reach = Interval::closed(XReal::Finite(a_new), XReal::PosInf);
    let v_new = v.restrict(reach)?;
    let top = v.eval(XReal::Finite(a_new))?;
    let inverse = UnaryFn::inverse_of(v.clone(), tol)?.restrict(Interval::closed(v.eval(XReal::PosInf)?, top))?;
    let rescaled = UnaryFn::affine_inner(AffineMap::new(1.0 / k, -2.0 * b / k), v)?;
    let g = compose(rescaled, inverse)?;
    let vartheta = compose(g, v_new)?;
    let theta = UnaryFn::affine_outer(AffineMap::new(k, b), p.theta().clone());
    let pair = GeneratorPair::new(theta, vartheta, Orientation::StandardDecreasing)?;
    Ok((pair, report))
}

fn inner_map(p: &GeneratorPair, c: f64, m: f64, tol: f64, cfg: &ProbeConfig) -> Result<UnaryFn, TransformError> {
    finite_params(&[("c", c), ("m", m), ("tol", tol)])?;
    if !(c > 0.0 && m >= 0.0 && tol > 0.0) {
        return Err(TransformError::InvalidParams(format!("needs c > 0, m >= 0 and tol > 0; got c={c}, m={m}, tol={tol}")));
    }
    strictly_monotone(p.theta(), theta_direction(p), cfg)?;
    let lifted = UnaryFn::affine_outer(AffineMap::new(c, m), p.theta().clone());
    let inverse = UnaryFn::inverse_of(p.theta().clone(), tol)?;
    compose(inverse, lifted).map_err(|e| match e {
        GenFnError::DomainMismatch { x, inner_value, .. } => TransformError::InvalidParams(format!(
            "c*theta + m leaves the range of theta: value {inner_value} at x = {x}"
        )),
        other => other.into(),
    })
}

/// `(θ∘h, ϑ∘g)` where `θ∘h = cθ + m` is used in closed form and
/// `g(s) = (s − 2m)/c`.
pub fn inner_composition(p: &GeneratorPair, c: f64, m: f64, tol: f64) -> Result<Transformed, TransformError> {
    inner_composition_with(p, c, m, tol, &ProbeConfig::default())
}

pub fn inner_composition_with(
    p: &GeneratorPair,
    c: f64,
    m: f64,
    tol: f64,
    cfg: &ProbeConfig,
) -> Result<Transformed, TransformError> {
    let h = inner_map(p, c, m, tol, cfg)?;
    let out = affine_outer_unchecked(p, c, m)?;
    finish(p, out, cfg, Some(h), vec![])
}

/// `(θ∘h, G∘ϑ)` with `G = ϑ∘f⁻¹∘ϑ⁻¹` and `f(s) = cs + 2m`.
pub fn inner_composition_conjugate(p: &GeneratorPair, c: f64, m: f64, tol: f64) -> Result<Transformed, TransformError> {
    inner_composition_conjugate_with(p, c, m, tol, &ProbeConfig::default())
}

pub fn inner_composition_conjugate_with(
    p: &GeneratorPair,
    c: f64,
    m: f64,
    tol: f64,
    cfg: &ProbeConfig,
) -> Result<Transformed, TransformError> {
    let h = inner_map(p, c, m, tol, cfg)?;
    let (pair, _) = conjugated_pair(p, c, m, tol, cfg)?;
    finish(p, pair, cfg, Some(h), vec![])
}
