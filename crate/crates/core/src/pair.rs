//! Generator pairs `(θ, ϑ)` and the overlap function `O(x,y) = ϑ(θ(x) + θ(y))`.
//!
//! [`validate_pair`] decides whether a pair generates an overlap function by
//! probing five conditions on the generators alone:
//!
//! | key | condition (standard orientation) |
//! |-----|----------------------------------|
//! | T1 | θ continuous and non-increasing on `[0,1]` |
//! | T2 | ϑ continuous and non-increasing on `[a,+∞]`, `a = 2θ(1)` |
//! | T3 | `θ(x) = +∞` exactly when `x = 0` |
//! | T4 | `ϑ(s) = 0` on `[a,+∞]` exactly when `s = +∞` |
//! | T5 | `θ(x) > θ(1)` for `x < 1`, and `ϑ(s) = 1` on `[a,+∞]` exactly when `s = a` |
//!
//! In the extended orientation θ is non-decreasing with `θ(0) = −∞`, and ϑ
//! is read on `[−∞, a]` with every direction reversed.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genfn::probe::{monotonicity_of_samples, sample_grid_with};
use crate::genfn::{
    continuity_probe, monotonicity_probe, Direction, GenFnError, Interval, ProbeConfig, ProbeReport, UnaryFn,
    Verdict, Witness,
};
use crate::xreal::{AffineMap, XReal};

/// Overlap values this far outside `[0,1]` are rounding and get clamped.
pub const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// θ decreases from `θ(0) = +∞`; ϑ is read on `[a, +∞]`.
    StandardDecreasing,
    /// θ increases from `θ(0) = −∞`; ϑ is read on `[−∞, a]`.
    ExtendedIncreasing,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::StandardDecreasing => Orientation::ExtendedIncreasing,
            Orientation::ExtendedIncreasing => Orientation::StandardDecreasing,
        }
    }

    /// Value θ must take at 0.
    pub fn theta_at_zero(self) -> XReal {
        match self {
            Orientation::StandardDecreasing => XReal::PosInf,
            Orientation::ExtendedIncreasing => XReal::NegInf,
        }
    }

    fn theta_direction(self) -> Direction {
        match self {
            Orientation::StandardDecreasing => Direction::NonIncreasing,
            Orientation::ExtendedIncreasing => Direction::NonDecreasing,
        }
    }

    /// ϑ moves away from 1 as its argument moves away from the anchor, so in
    /// the extended case it increases towards the anchor.
    fn vartheta_direction(self) -> Direction {
        self.theta_direction()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PairError {
    #[error("theta must be defined on [0, 1], got {0}")]
    ThetaDomain(Interval),
    #[error("anchor 2*theta(1) must be finite, got {0}")]
    InfiniteAnchor(XReal),
    #[error("vartheta's domain {domain} does not cover {required}")]
    VarthetaDomain { domain: Interval, required: Interval },
    #[error("O({x}, {y}) = {value} lies outside [0, 1]")]
    Range { x: f64, y: f64, value: XReal },
    #[error(transparent)]
    Gen(#[from] GenFnError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    theta: UnaryFn,
    vartheta: UnaryFn,
    orientation: Orientation,
    anchor: f64,
}

impl GeneratorPair {
    pub fn new(theta: UnaryFn, vartheta: UnaryFn, orientation: Orientation) -> Result<Self, PairError> {
        if theta.domain() != Interval::unit() {
            return Err(PairError::ThetaDomain(theta.domain()));
        }
        let t1 = theta.eval(XReal::ONE)?;
        let anchor = match t1.xadd(t1) {
            Ok(XReal::Finite(a)) => a,
            Ok(inf) => return Err(PairError::InfiniteAnchor(inf)),
            Err(_) => unreachable!("x + x is never indeterminate"),
        };
        let anchor = vartheta.domain().snap(XReal::Finite(anchor)).finite().unwrap_or(anchor);
        let required = relevant_interval(anchor, orientation);
        if !vartheta.domain().contains_interval(&required) {
            return Err(PairError::VarthetaDomain { domain: vartheta.domain(), required });
        }
        Ok(GeneratorPair { theta, vartheta, orientation, anchor })
    }

    pub fn theta(&self) -> &UnaryFn {
        &self.theta
    }

    pub fn vartheta(&self) -> &UnaryFn {
        &self.vartheta
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// `a = 2θ(1)`.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// The part of ϑ's domain that the overlap function can reach.
    pub fn relevant_interval(&self) -> Interval {
        relevant_interval(self.anchor, self.orientation)
    }

    /// ϑ restricted to [`relevant_interval`](Self::relevant_interval).
    pub fn vartheta_relevant(&self) -> UnaryFn {
        self.vartheta
            .restrict(self.relevant_interval())
            .expect("coverage checked at construction")
    }

    /// `O(x, y)`; see [`eval_overlap`].
    pub fn overlap(&self, x: f64, y: f64) -> Result<f64, PairError> {
        eval_overlap(self, x, y)
    }
}

fn relevant_interval(anchor: f64, orientation: Orientation) -> Interval {
    match orientation {
        Orientation::StandardDecreasing => Interval::closed(XReal::Finite(anchor), XReal::PosInf),
        Orientation::ExtendedIncreasing => Interval::closed(XReal::NegInf, XReal::Finite(anchor)),
    }
}

/// `ϑ(θ(x) + θ(y))`, clamped to `[0,1]` when it overshoots by at most
/// [`RANGE_SLACK`].
pub fn eval_overlap(p: &GeneratorPair, x: f64, y: f64) -> Result<f64, PairError> {
    let s = p.theta.eval_f64(x)?.xadd(p.theta.eval_f64(y)?).map_err(GenFnError::from)?;
    let dom = p.vartheta.domain();
    let value = p.vartheta.eval(dom.snap(s))?;
    match value {
        XReal::Finite(v) if (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) => Ok(v.clamp(0.0, 1.0)),
        _ => Err(PairError::Range { x, y, value }),
    }
}

/// `O` on the `n × n` grid `x_i = i/(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapGrid {
    pub n: usize,
    pub xs: Vec<f64>,
    /// `values[i][j] = O(xs[i], xs[j])`.
    pub values: Vec<Vec<f64>>,
}

impl OverlapGrid {
    pub fn max_deviation(&self, other: &OverlapGrid) -> f64 {
        assert_eq!(self.n, other.n, "grids of different size");
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn unit_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least 2 points");
    (0..n).map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 }).collect()
}

pub fn overlap_grid(p: &GeneratorPair, n: usize) -> Result<OverlapGrid, PairError> {
    let xs = unit_grid(n);
    let values = xs
        .par_iter()
        .map(|&x| xs.iter().map(|&y| eval_overlap(p, x, y)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OverlapGrid { n, xs, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Valid,
    Invalid,
    Inconclusive,
}

impl From<Verdict> for Validity {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Validity::Valid,
            Verdict::Fail => Validity::Invalid,
            Verdict::Inconclusive => Validity::Inconclusive,
        }
    }
}

pub const T1: &str = "T1_theta_monotone_continuous";
pub const T2: &str = "T2_vartheta_monotone_continuous";
pub const T3: &str = "T3_theta_infinity_iff_zero";
pub const T4: &str = "T4_vartheta_zero_iff_infinity";
pub const T5: &str = "T5_boundary_one_iff_anchor";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub orientation: Orientation,
    pub anchor: f64,
    pub conditions: BTreeMap<String, ProbeReport>,
    pub overall: Validity,
}

impl ValidationReport {
    pub fn condition(&self, key: &str) -> &ProbeReport {
        &self.conditions[key]
    }

    /// Keys of the conditions that failed.
    pub fn failed(&self) -> Vec<&str> {
        self.conditions.iter().filter(|(_, r)| r.failed()).map(|(k, _)| k.as_str()).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.overall == Validity::Valid
    }
}

/// Checks on θ alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaChecks {
    pub continuity: ProbeReport,
    pub monotonicity: ProbeReport,
    pub infinity_at_zero: ProbeReport,
    pub separation: ProbeReport,
}

/// Checks on ϑ over the relevant interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarthetaChecks {
    pub continuity: ProbeReport,
    pub monotonicity: ProbeReport,
    pub zero_at_infinity: ProbeReport,
    pub one_at_anchor: ProbeReport,
}

pub fn validate_theta(p: &GeneratorPair, cfg: &ProbeConfig) -> ThetaChecks {
    let theta = &p.theta;
    let o = p.orientation;
    let continuity = continuity_probe(theta, cfg);
    let monotonicity = monotonicity_probe(theta, cfg, o.theta_direction(), false);
    let samples = match sample_grid_with(theta, cfg.n, cfg.scheme, cfg.x_max) {
        Ok(s) => s,
        Err(e) => {
            let fail = ProbeReport::fail(cfg.n, Witness::new(format!("evaluation_error: {e}"), vec![]));
            return ThetaChecks {
                continuity,
                monotonicity,
                infinity_at_zero: fail.clone(),
                separation: fail,
            };
        }
    };

    let infinity_at_zero = {
        let (x0, v0) = samples[0];
        debug_assert_eq!(x0, XReal::ZERO);
        if v0 != o.theta_at_zero() {
            ProbeReport::fail(samples.len(), Witness::new("theta_not_infinite_at_zero", vec![(x0, v0)]))
        } else if let Some(&bad) = samples[1..].iter().find(|(_, v)| v.is_infinite()) {
            ProbeReport::fail(samples.len(), Witness::new("theta_infinite_away_from_zero", vec![bad]))
        } else {
            ProbeReport::pass(samples.len())
        }
    };

    let separation = {
        let t1 = XReal::Finite(p.anchor / 2.0);
        let edge = 1.0 - cfg.delta;
        let separated = |v: XReal| match (o, v) {
            (Orientation::StandardDecreasing, XReal::Finite(v)) => v >= t1.to_f64() + cfg.tol_strict,
            (Orientation::ExtendedIncreasing, XReal::Finite(v)) => v <= t1.to_f64() - cfg.tol_strict,
            (Orientation::StandardDecreasing, inf) => inf == XReal::PosInf,
            (Orientation::ExtendedIncreasing, inf) => inf == XReal::NegInf,
        };
        let failing: Vec<(XReal, XReal)> = samples
            .iter()
            .filter(|(x, v)| x.to_f64() <= edge && !separated(*v))
            .copied()
            .collect();
        let coarse = if failing.is_empty() {
            ProbeReport::pass(samples.len())
        } else {
            let mid = failing[failing.len() / 2];
            let desc = format!("theta_not_above_theta_1 ({} sample(s))", failing.len());
            ProbeReport::fail(samples.len(), Witness::new(desc, vec![mid, (XReal::ONE, t1)]))
        };
        let near_one = Interval::closed(XReal::Finite(edge), XReal::ONE);
        let fine = match theta.restrict(near_one) {
            Ok(f) => match sample_grid_with(&f, cfg.n, cfg.scheme, cfg.x_max) {
                Ok(s) => monotonicity_of_samples(&s, cfg, o.theta_direction(), true),
                Err(e) => ProbeReport::fail(cfg.n, Witness::new(format!("evaluation_error: {e}"), vec![])),
            },
            Err(e) => ProbeReport::fail(cfg.n, Witness::new(format!("evaluation_error: {e}"), vec![])),
        };
        ProbeReport::combine(&[&coarse, &fine])
    };

    ThetaChecks { continuity, monotonicity, infinity_at_zero, separation }
}

pub fn validate_vartheta(p: &GeneratorPair, cfg: &ProbeConfig) -> VarthetaChecks {
    let o = p.orientation;
    let v = p.vartheta_relevant();
    let continuity = continuity_probe(&v, cfg);
    let monotonicity = monotonicity_probe(&v, cfg, o.vartheta_direction(), false);
    let samples = match sample_grid_with(&v, cfg.n, cfg.scheme, cfg.x_max) {
        Ok(s) => s,
        Err(e) => {
            let fail = ProbeReport::fail(cfg.n, Witness::new(format!("evaluation_error: {e}"), vec![]));
            return VarthetaChecks { continuity, monotonicity, zero_at_infinity: fail.clone(), one_at_anchor: fail };
        }
    };
    let (far, anchor_sample) = match o {
        Orientation::StandardDecreasing => (*samples.last().unwrap(), samples[0]),
        Orientation::ExtendedIncreasing => (samples[0], *samples.last().unwrap()),
    };
    let finite_part = samples.iter().filter(|(s, _)| s.is_finite());

    let zero_at_infinity = if far.1 != XReal::ZERO {
        ProbeReport::fail(samples.len(), Witness::new("vartheta_nonzero_at_infinity", vec![far]))
    } else if let Some(&bad) = finite_part.clone().find(|(_, val)| *val <= XReal::ZERO) {
        ProbeReport::fail(samples.len(), Witness::new("vartheta_zero_at_finite_argument", vec![bad]))
    } else {
        ProbeReport::pass(samples.len())
    };

    let one_at_anchor = {
        let hits_one = anchor_sample.1.finite().is_some_and(|val| (val - 1.0).abs() <= cfg.tol);
        if !hits_one {
            ProbeReport::fail(samples.len(), Witness::new("vartheta_not_one_at_anchor", vec![anchor_sample]))
        } else if let Some(&bad) = samples
            .iter()
            .filter(|(s, _)| *s != anchor_sample.0)
            .find(|(_, val)| *val >= XReal::Finite(1.0 - cfg.tol_strict))
        {
            ProbeReport::fail(samples.len(), Witness::new("vartheta_one_beyond_anchor", vec![bad, anchor_sample]))
        } else {
            ProbeReport::pass(samples.len())
        }
    };

    VarthetaChecks { continuity, monotonicity, zero_at_infinity, one_at_anchor }
}

/// Runs both generator check bundles and folds them into the five conditions.
pub fn validate_pair(p: &GeneratorPair, cfg: &ProbeConfig) -> ValidationReport {
    let (t, v) = rayon::join(|| validate_theta(p, cfg), || validate_vartheta(p, cfg));
    let mut conditions = BTreeMap::new();
    conditions.insert(T1.to_string(), ProbeReport::combine(&[&t.continuity, &t.monotonicity]));
    conditions.insert(T2.to_string(), ProbeReport::combine(&[&v.continuity, &v.monotonicity]));
    conditions.insert(T3.to_string(), t.infinity_at_zero);
    conditions.insert(T4.to_string(), v.zero_at_infinity);
    conditions.insert(T5.to_string(), ProbeReport::combine(&[&t.separation, &v.one_at_anchor]));
    let overall = conditions.values().fold(Verdict::Pass, |acc, r| acc.and(r.verdict)).into();
    ValidationReport { orientation: p.orientation, anchor: p.anchor, conditions, overall }
}

/// `(kθ + b, ϑ∘((· − 2b)/k))` without validation. Flips the orientation for
/// `k < 0`.
pub(crate) fn affine_outer_unchecked(p: &GeneratorPair, k: f64, b: f64) -> Result<GeneratorPair, PairError> {
    assert!(k != 0.0 && k.is_finite() && b.is_finite());
    let theta = UnaryFn::affine_outer(AffineMap::new(k, b), p.theta.clone());
    let g = AffineMap::new(1.0 / k, -2.0 * b / k);
    let vartheta = UnaryFn::affine_inner(g, p.vartheta.clone())?;
    let orientation = if k > 0.0 { p.orientation } else { p.orientation.flipped() };
    GeneratorPair::new(theta, vartheta, orientation)
}

/// Shifts θ so that `θ(1) = 0` and the anchor becomes 0. Pairs already
/// normalized are returned unchanged.
pub fn normalize(p: &GeneratorPair) -> GeneratorPair {
    let b = -p.anchor / 2.0;
    if b == 0.0 {
        return p.clone();
    }
    affine_outer_unchecked(p, 1.0, b).expect("a shift preserves domain coverage")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cfg() -> ProbeConfig {
        ProbeConfig::default()
    }

    #[test]
    fn eval_examples() {
        let p = fixtures::product_pair();
        assert!((eval_overlap(&p, 0.5, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(eval_overlap(&p, 0.0, 0.7).unwrap(), 0.0);
        let q = fixtures::reciprocal_cauchy_pair();
        assert!((eval_overlap(&q, 0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_cauchy_matches_closed_form() {
        let q = fixtures::reciprocal_cauchy_pair();
        let g = overlap_grid(&q, 101).unwrap();
        for (i, &x) in g.xs.iter().enumerate() {
            for (j, &y) in g.xs.iter().enumerate() {
                let expect = if x * y == 0.0 { 0.0 } else { x * y / (x + y - x * y) };
                assert!((g.values[i][j] - expect).abs() <= 1e-12, "({x},{y})");
            }
        }
    }

    #[test]
    fn symmetric_bit_exact() {
        for p in [fixtures::product_pair(), fixtures::neg_log_cauchy_pair(), fixtures::extended_product_pair()] {
            let g = overlap_grid(&p, 33).unwrap();
            for i in 0..g.n {
                for j in 0..g.n {
                    assert_eq!(g.values[i][j].to_bits(), g.values[j][i].to_bits());
                }
            }
        }
    }

    #[test]
    fn construction_invariants() {
        let bad_domain = UnaryFn::exp_neg();
        assert!(matches!(
            GeneratorPair::new(bad_domain, UnaryFn::exp_neg(), Orientation::StandardDecreasing),
            Err(PairError::ThetaDomain(_))
        ));
        let inf_at_one = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "1/(1-x)")]).unwrap();
        assert!(matches!(
            GeneratorPair::new(inf_at_one, UnaryFn::exp_neg(), Orientation::StandardDecreasing),
            Err(PairError::InfiniteAnchor(_))
        ));
        // anchor −2 is not covered by [0, +inf]
        let low = UnaryFn::affine_outer(AffineMap::new(1.0, -1.0), UnaryFn::neg_log());
        assert!(matches!(
            GeneratorPair::new(low, UnaryFn::exp_neg(), Orientation::StandardDecreasing),
            Err(PairError::VarthetaDomain { .. })
        ));
    }

    #[test]
    fn anchor_snaps_onto_domain_end() {
        let lo = 0.1 + 0.2;
        let theta = UnaryFn::affine_outer(AffineMap::new(1.0, 0.15), UnaryFn::neg_log());
        assert!(2.0 * 0.15 < lo);
        let v = UnaryFn::affine_inner(AffineMap::new(1.0, -lo), UnaryFn::exp_neg()).unwrap();
        let p = GeneratorPair::new(theta, v, Orientation::StandardDecreasing).unwrap();
        assert_eq!(p.anchor(), lo);
        assert_eq!(p.overlap(1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn range_error_beyond_slack() {
        // ϑ = 2e^{-x} exceeds 1 near the anchor
        let v = UnaryFn::piecewise_from(Interval::closed(XReal::ZERO, XReal::PosInf), &[(0.0, "2*exp(-x)")]).unwrap();
        let p = GeneratorPair::new(UnaryFn::neg_log(), v, Orientation::StandardDecreasing).unwrap();
        assert!(matches!(eval_overlap(&p, 1.0, 1.0), Err(PairError::Range { .. })));
        assert!(overlap_grid(&p, 5).is_err());
    }

    #[test]
    fn valid_catalog_pairs() {
        for p in [
            fixtures::product_pair(),
            fixtures::reciprocal_cauchy_pair(),
            fixtures::extended_product_pair(),
            fixtures::neg_log_cauchy_pair(),
        ] {
            let r = validate_pair(&p, &cfg());
            assert!(r.is_valid(), "{:?}: {:#?}", p.theta(), r);
        }
    }

    #[test]
    fn finite_theta_at_zero() {
        let r = validate_pair(&fixtures::finite_theta_at_zero(), &cfg());
        assert_eq!(r.overall, Validity::Invalid);
        assert_eq!(r.failed(), vec![T3]);
        let w = &r.condition(T3).witnesses[0].points[0];
        assert_eq!(*w, (XReal::ZERO, XReal::ONE));
    }

    #[test]
    fn plateau_theta() {
        let r = validate_pair(&fixtures::plateau_theta(), &cfg());
        assert_eq!(r.failed(), vec![T5]);
        let (x, v) = r.condition(T5).witnesses[0].points[0];
        assert_eq!(x, XReal::new(0.75));
        assert_eq!(v, XReal::ZERO);
    }

    #[test]
    fn hinge_vartheta() {
        let r = validate_pair(&fixtures::hinge_vartheta(), &cfg());
        assert_eq!(r.failed(), vec![T4]);
        let (s, v) = r.condition(T4).witnesses[0].points[0];
        assert_eq!((s, v), (XReal::ONE, XReal::ZERO));
    }

    #[test]
    fn wrong_anchor() {
        let r = validate_pair(&fixtures::wrong_anchor(), &cfg());
        assert_eq!(r.failed(), vec![T5]);
        let (s, v) = r.condition(T5).witnesses[0].points[0];
        assert_eq!(s, XReal::new(2.0));
        assert!((v.to_f64() - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn vartheta_jump() {
        let r = validate_pair(&fixtures::vartheta_jump(), &cfg());
        assert_eq!(r.failed(), vec![T2]);
        let w = &r.condition(T2).witnesses[0].points;
        assert!((w[0].0.to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let p = fixtures::product_pair();
        assert_eq!(normalize(&p), p);

        let shifted = fixtures::shifted_product_pair();
        assert_eq!(shifted.anchor(), 2.0);
        let n = normalize(&shifted);
        assert_eq!(n.anchor(), 0.0);
        let d = overlap_grid(&n, 65).unwrap().max_deviation(&overlap_grid(&p, 65).unwrap());
        assert!(d <= 1e-12, "{d}");
        assert_eq!(normalize(&n), n);
        assert!(validate_pair(&n, &cfg()).is_valid());
    }

    #[test]
    fn normalize_reaches_zero_anchor_exactly() {
        for b in [0.1, 1.0 / 3.0, -0.7, 2.9] {
            let p = affine_outer_unchecked(&fixtures::product_pair(), 1.0, b).unwrap();
            let n = normalize(&p);
            assert_eq!(n.anchor(), 0.0, "b={b}");
            assert_eq!(n.theta().eval(XReal::ONE).unwrap(), XReal::ZERO);
        }
    }
}
