//! Extended reals `ℝ ∪ {−∞, +∞}` and affine maps over them.
//!
//! Infinities are explicit tags rather than IEEE infinities, so checks such
//! as "θ(x) = +∞ exactly when x = 0" compare tags and never depend on a
//! float overflowing. Finite values are never NaN, which makes the order
//! total: `−∞ < finite < +∞`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum XRealError {
    #[error("indeterminate sum (+inf) + (-inf)")]
    IndeterminateSum,
    #[error("NaN is not an extended real")]
    NotANumber,
}

/// A value in the extended real line.
#[derive(Debug, Clone, Copy)]
pub enum XReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl XReal {
    pub const ZERO: XReal = XReal::Finite(0.0);
    pub const ONE: XReal = XReal::Finite(1.0);

    /// Converts a float, mapping IEEE infinities onto the tags.
    pub fn from_f64(v: f64) -> Result<Self, XRealError> {
        if v.is_nan() {
            Err(XRealError::NotANumber)
        } else if v == f64::INFINITY {
            Ok(XReal::PosInf)
        } else if v == f64::NEG_INFINITY {
            Ok(XReal::NegInf)
        } else {
            // canonical zero, so "-0" never leaks into reports
            Ok(XReal::Finite(v + 0.0))
        }
    }

    /// Panics on NaN. For literals and values already known to be numbers.
    pub fn new(v: f64) -> Self {
        Self::from_f64(v).expect("XReal::new called with NaN")
    }

    pub fn is_finite(self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            XReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// The IEEE encoding, for feeding into float-only code paths.
    pub fn to_f64(self) -> f64 {
        match self {
            XReal::NegInf => f64::NEG_INFINITY,
            XReal::Finite(v) => v,
            XReal::PosInf => f64::INFINITY,
        }
    }

    /// Sum with absorption by infinities. `(+∞) + (−∞)` is an error.
    ///
    /// A finite sum that overflows the double range saturates to the
    /// matching infinity tag.
    pub fn xadd(self, other: XReal) -> Result<XReal, XRealError> {
        use XReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(XRealError::IndeterminateSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => XReal::from_f64(a + b),
        }
    }

    pub fn xcmp(self, other: XReal) -> Ordering {
        self.cmp(&other)
    }

    /// `|self − other|` for finite pairs; `None` if either side is infinite.
    pub fn finite_distance(self, other: XReal) -> Option<f64> {
        Some((self.finite()? - other.finite()?).abs())
    }
}

impl PartialEq for XReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for XReal {}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use XReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            // finite values are never NaN
            (Finite(a), Finite(b)) => a.partial_cmp(b).unwrap(),
        }
    }
}

impl From<f64> for XReal {
    fn from(v: f64) -> Self {
        XReal::new(v)
    }
}

impl std::ops::Neg for XReal {
    type Output = XReal;

    fn neg(self) -> XReal {
        match self {
            XReal::NegInf => XReal::PosInf,
            XReal::Finite(v) => XReal::new(-v),
            XReal::PosInf => XReal::NegInf,
        }
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::NegInf => f.write_str("-inf"),
            XReal::Finite(v) => write!(f, "{v}"),
            XReal::PosInf => f.write_str("inf"),
        }
    }
}

// Serialized as a JSON number, "inf" or "-inf".
impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            XReal::NegInf => s.serialize_str("-inf"),
            XReal::Finite(v) => s.serialize_f64(*v),
            XReal::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct XRealVisitor;

        impl Visitor<'_> for XRealVisitor {
            type Value = XReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<XReal, E> {
                XReal::from_f64(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<XReal, E> {
                Ok(XReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<XReal, E> {
                Ok(XReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<XReal, E> {
                match v {
                    "inf" | "+inf" => Ok(XReal::PosInf),
                    "-inf" => Ok(XReal::NegInf),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(XRealVisitor)
    }
}

/// `x ↦ kx + b` with the usual conventions on the infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub k: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn new(k: f64, b: f64) -> Self {
        debug_assert!(k.is_finite() && b.is_finite());
        AffineMap { k, b }
    }

    pub fn identity() -> Self {
        AffineMap { k: 1.0, b: 0.0 }
    }

    /// Applies the map. A zero slope sends every input, infinite or not, to `b`.
    pub fn apply(&self, x: XReal) -> XReal {
        if self.k == 0.0 {
            return XReal::Finite(self.b);
        }
        match x {
            XReal::Finite(v) => XReal::new(self.k * v + self.b),
            XReal::PosInf if self.k > 0.0 => XReal::PosInf,
            XReal::PosInf => XReal::NegInf,
            XReal::NegInf if self.k > 0.0 => XReal::NegInf,
            XReal::NegInf => XReal::PosInf,
        }
    }

    /// `(1/k, −b/k)`, or `None` for a constant map.
    pub fn inverse(&self) -> Option<AffineMap> {
        (self.k != 0.0).then(|| AffineMap::new(1.0 / self.k, -self.b / self.k))
    }
}

/// Free-function form of [`XReal::xadd`].
pub fn xadd(a: XReal, b: XReal) -> Result<XReal, XRealError> {
    a.xadd(b)
}

/// Free-function form of [`AffineMap::apply`].
pub fn affine_apply(m: AffineMap, x: XReal) -> XReal {
    m.apply(x)
}

/// Free-function form of the total order.
pub fn xcmp(a: XReal, b: XReal) -> Ordering {
    a.cmp(&b)
}
