//! Pair-spec files: JSON documents naming θ, ϑ, the orientation and an
//! optional chain of transforms.
//!
//! ```json
//! {
//!   "theta":   {"kind": "neg_log"},
//!   "vartheta": {"kind": "exp_neg"},
//!   "orientation": "standard_decreasing",
//!   "transforms": [{"op": "shift", "params": {"b": 1}}]
//! }
//! ```
//!
//! Function descriptors carry a `kind`:
//!
//! - a catalog name, with its parameters (`{"kind": "power_neg_log", "p": 2}`);
//! - `affine` with `k`, `b`, `inner` and `side` (`outer` for `k·f + b`,
//!   `inner` for `f(k·x + b)`);
//! - `compose` with `outer` and `inner`;
//! - `piecewise` with a `domain` and `segments` of `{from, expr}`;
//! - `inverse` with `inner` and an optional bisection `tol`.
//!
//! Any descriptor may add a `domain` restricting it to a sub-interval.
//! Extended reals are written as numbers, `"inf"` or `"-inf"`.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::genfn::{compose, Builtin, Expr, Form, Interval, ProbeConfig, Segment, Side, UnaryFn};
use crate::pair::{GeneratorPair, Orientation, PairError};
use crate::transform::{TransformError, TransformOp, Transformed, DEFAULT_INVERSE_TOL};
use crate::xreal::{AffineMap, XReal};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed spec: {0}")]
    Parse(String),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error("transform {index} ({op}) failed: {source}")]
    Transform { index: usize, op: String, source: TransformError },
}

impl SpecError {
    pub fn is_parse_error(&self) -> bool {
        matches!(self, SpecError::Parse(_))
    }
}

fn bad(msg: impl Into<String>) -> SpecError {
    SpecError::Parse(msg.into())
}

/// Encodes a function descriptor.
pub fn descriptor_to_value(f: &UnaryFn) -> Value {
    let (mut obj, derived_domain) = match f.form() {
        Form::Catalog(b) => {
            let Value::Object(obj) = serde_json::to_value(b).expect("builtins serialize") else {
                unreachable!("builtins serialize to objects")
            };
            (obj, Some(b.natural_domain()))
        }
        Form::Affine { map, inner, side } => {
            let derived = match side {
                Side::Outer => Some(inner.domain()),
                Side::Inner => UnaryFn::affine_inner(*map, (**inner).clone()).ok().map(|g| g.domain()),
            };
            let obj = json!({
                "kind": "affine",
                "k": map.k,
                "b": map.b,
                "side": side,
                "inner": descriptor_to_value(inner),
            });
            (into_map(obj), derived)
        }
        Form::Compose { outer, inner } => {
            let obj = json!({
                "kind": "compose",
                "outer": descriptor_to_value(outer),
                "inner": descriptor_to_value(inner),
            });
            (into_map(obj), Some(inner.domain()))
        }
        Form::Piecewise(segments) => {
            let segs: Vec<Value> = segments.iter().map(|s| json!({"from": s.from, "expr": s.expr.source()})).collect();
            (into_map(json!({"kind": "piecewise", "segments": segs})), None)
        }
        Form::Inverse { inner, tol } => {
            let derived = UnaryFn::inverse_of((**inner).clone(), *tol).ok().map(|g| g.domain());
            let obj = json!({"kind": "inverse", "tol": tol, "inner": descriptor_to_value(inner)});
            (into_map(obj), derived)
        }
    };
    if derived_domain != Some(f.domain()) {
        obj.insert("domain".into(), serde_json::to_value(f.domain()).expect("intervals serialize"));
    }
    Value::Object(obj)
}

fn into_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

/// Decodes a function descriptor.
pub fn descriptor_from_value(v: &Value) -> Result<UnaryFn, SpecError> {
    let obj = v.as_object().ok_or_else(|| bad(format!("descriptor must be an object, got {v}")))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad(format!("descriptor without a string \"kind\": {v}")))?;
    let allow = |keys: &[&str]| -> Result<(), SpecError> {
        match obj.keys().find(|k| !["kind", "domain"].contains(&k.as_str()) && !keys.contains(&k.as_str())) {
            Some(k) => Err(bad(format!("unexpected key {k:?} in {kind} descriptor"))),
            None => Ok(()),
        }
    };
    let num = |key: &str| -> Result<f64, SpecError> {
        obj.get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| bad(format!("{kind} descriptor needs a number {key:?}")))
    };
    let child = |key: &str| -> Result<UnaryFn, SpecError> {
        descriptor_from_value(obj.get(key).ok_or_else(|| bad(format!("{kind} descriptor needs {key:?}")))?)
    };
    let domain = obj
        .get("domain")
        .map(|d| serde_json::from_value::<Interval>(d.clone()).map_err(|e| bad(format!("bad domain {d}: {e}"))))
        .transpose()?;
    if let Some(d) = domain {
        if d.lo > d.hi {
            return Err(bad(format!("domain {d} has lo > hi")));
        }
    }
    let gen = |e: crate::genfn::GenFnError| bad(format!("{kind} descriptor: {e}"));

    let f = match kind {
        "affine" => {
            allow(&["k", "b", "side", "inner"])?;
            let map = AffineMap::new(num("k")?, num("b")?);
            let side = match obj.get("side") {
                None => Side::Outer,
                Some(s) => serde_json::from_value(s.clone()).map_err(|e| bad(format!("bad side {s}: {e}")))?,
            };
            match side {
                Side::Outer => UnaryFn::affine_outer(map, child("inner")?),
                Side::Inner => UnaryFn::affine_inner(map, child("inner")?).map_err(gen)?,
            }
        }
        "compose" => {
            allow(&["outer", "inner"])?;
            compose(child("outer")?, child("inner")?).map_err(gen)?
        }
        "piecewise" => {
            allow(&["segments"])?;
            let domain = domain.ok_or_else(|| bad("piecewise descriptor needs a domain"))?;
            let segs = obj
                .get("segments")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("piecewise descriptor needs a \"segments\" array"))?;
            let segments = segs
                .iter()
                .map(|s| {
                    let from = s
                        .get("from")
                        .map(|f| serde_json::from_value::<XReal>(f.clone()))
                        .transpose()
                        .map_err(|e| bad(format!("bad breakpoint in {s}: {e}")))?
                        .ok_or_else(|| bad(format!("segment without \"from\": {s}")))?;
                    let src = s
                        .get("expr")
                        .and_then(Value::as_str)
                        .ok_or_else(|| bad(format!("segment without string \"expr\": {s}")))?;
                    let expr = Expr::parse(src).map_err(|e| bad(format!("expression {src:?}: {e}")))?;
                    Ok(Segment { from, expr })
                })
                .collect::<Result<Vec<_>, SpecError>>()?;
            return UnaryFn::piecewise(domain, segments).map_err(gen);
        }
        "inverse" => {
            allow(&["inner", "tol"])?;
            let tol = if obj.contains_key("tol") { num("tol")? } else { DEFAULT_INVERSE_TOL };
            if !(tol > 0.0) {
                return Err(bad(format!("inverse tol must be positive, got {tol}")));
            }
            UnaryFn::inverse_of(child("inner")?, tol).map_err(gen)?
        }
        name if Builtin::ALL_NAMES.contains(&name) => {
            let mut stripped = obj.clone();
            stripped.remove("domain");
            let b: Builtin =
                serde_json::from_value(Value::Object(stripped)).map_err(|e| bad(format!("{name} descriptor: {e}")))?;
            let known = into_map(serde_json::to_value(b).expect("builtins serialize"));
            allow(&known.keys().map(String::as_str).collect::<Vec<_>>())?;
            UnaryFn::builtin(b).map_err(gen)?
        }
        other => {
            return Err(bad(format!(
                "unknown kind {other:?}; expected affine, compose, piecewise, inverse or one of {}",
                Builtin::ALL_NAMES.join(", ")
            )))
        }
    };
    match domain {
        Some(d) if d != f.domain() => f.restrict(d).map_err(gen),
        _ => Ok(f),
    }
}

impl Serialize for UnaryFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        descriptor_to_value(self).serialize(s).map_err(S::Error::custom)
    }
}

impl<'de> Deserialize<'de> for UnaryFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        descriptor_from_value(&v).map_err(D::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOp {
    op: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    theta: Value,
    vartheta: Value,
    #[serde(default = "standard")]
    orientation: Orientation,
    #[serde(default)]
    transforms: Vec<RawOp>,
}

fn standard() -> Orientation {
    Orientation::StandardDecreasing
}

/// A parsed pair-spec file.
#[derive(Debug, Clone, Serialize)]
pub struct PairSpec {
    pub theta: UnaryFn,
    pub vartheta: UnaryFn,
    pub orientation: Orientation,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformOp>,
}

impl PairSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let transforms = raw
            .transforms
            .iter()
            .map(|r| TransformOp::from_parts(&r.op, &r.params).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PairSpec {
            theta: descriptor_from_value(&raw.theta)?,
            vartheta: descriptor_from_value(&raw.vartheta)?,
            orientation: raw.orientation,
            transforms,
        })
    }

    /// A pair-spec for an existing pair, without transforms.
    pub fn of_pair(p: &GeneratorPair) -> Self {
        PairSpec {
            theta: p.theta().clone(),
            vartheta: p.vartheta().clone(),
            orientation: p.orientation(),
            transforms: vec![],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs serialize")
    }

    /// Assembles the pair and runs the transform chain in order.
    pub fn build(&self, cfg: &ProbeConfig) -> Result<(GeneratorPair, Vec<Transformed>), SpecError> {
        let mut pair = GeneratorPair::new(self.theta.clone(), self.vartheta.clone(), self.orientation)?;
        let mut steps = Vec::with_capacity(self.transforms.len());
        for (index, op) in self.transforms.iter().enumerate() {
            let t = op.apply(&pair, cfg).map_err(|source| SpecError::Transform {
                index,
                op: serde_json::to_value(op).ok().and_then(|v| v["op"].as_str().map(String::from)).unwrap_or_default(),
                source,
            })?;
            pair = t.pair.clone();
            steps.push(t);
        }
        Ok((pair, steps))
    }
}
