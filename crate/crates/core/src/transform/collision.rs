use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::TransformError;
use crate::genfn::{Interval, UnaryFn, BISECTION_BUDGET};
use crate::xreal::XReal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifierConfig {
    /// Grid size per coordinate of the sum table.
    pub probes: usize,
    /// How closely two transformed sums must agree to count as a collision.
    pub tol_match: f64,
    /// How far apart the original sums must be for a contradiction.
    pub tol_sep: f64,
    /// Pairs `(x1, y1)` tried first against their diagonal partner `(t, t)`.
    pub anchors: Vec<(f64, f64)>,
}

impl Default for FalsifierConfig {
    fn default() -> Self {
        FalsifierConfig { probes: 64, tol_match: 1e-12, tol_sep: 1e-6, anchors: vec![(0.5, 1.0)] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CollisionVerdict {
    Consistent,
    /// `θ'(x1) + θ'(y1) = θ'(x2) + θ'(y2) = lhs_sum` while the original sums
    /// `rhs_sum_1 = θ(x1) + θ(y1)` and `rhs_sum_2 = θ(x2) + θ(y2)` differ.
    Contradiction { x1: f64, y1: f64, x2: f64, y2: f64, lhs_sum: f64, rhs_sum_1: f64, rhs_sum_2: f64 },
}

impl CollisionVerdict {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, CollisionVerdict::Contradiction { .. })
    }
}

fn finite(f: &UnaryFn, x: f64) -> Option<f64> {
    f.eval_f64(x).ok().and_then(XReal::finite)
}

fn sum(f: &UnaryFn, x: f64, y: f64) -> Option<f64> {
    Some(finite(f, x)? + finite(f, y)?)
}

/// Finds `t ∈ [0,1]` with `φ(t) = target` for monotone `φ`, bisecting until
/// the bracket collapses. Returns the better end of the final bracket.
fn solve(phi: &dyn Fn(f64) -> Option<XReal>, target: f64) -> Option<f64> {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (fa, fb) = (phi(a)?, phi(b)?);
    let t = XReal::Finite(target);
    let increasing = match fa.cmp(&fb) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => return None,
    };
    if t < fa.min(fb) || t > fa.max(fb) {
        return None;
    }
    for _ in 0..BISECTION_BUDGET * 6 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let fm = phi(mid)?;
        if fm == t {
            return Some(mid);
        }
        if (fm < t) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    let miss = |x: f64| phi(x).and_then(|v| v.finite_distance(t)).unwrap_or(f64::INFINITY);
    Some(if miss(a) <= miss(b) { a } else { b })
}

/// Searches for argument pairs whose `θ'`-sums collide while their `θ`-sums
/// do not. Such a collision rules out any `g` with `ϑ∘g` regenerating the
/// overlap function of `(θ, ϑ)` from `θ'`.
///
/// Each configured anchor `(x1, y1)` is first matched against the diagonal
/// point `t` with `2θ'(t) = θ'(x1) + θ'(y1)`. If no anchor yields a
/// contradiction, neighbouring entries of the sorted sum table over a
/// `probes × probes` grid are matched by re-solving one coordinate.
pub fn collision_falsifier(
    theta: &UnaryFn,
    theta_new: &UnaryFn,
    cfg: &FalsifierConfig,
) -> Result<CollisionVerdict, TransformError> {
    for f in [theta, theta_new] {
        if f.domain() != Interval::unit() {
            return Err(TransformError::InvalidParams(format!("generator domain {} is not [0, 1]", f.domain())));
        }
    }
    if cfg.probes < 2 {
        return Err(TransformError::InvalidParams("probes must be at least 2".into()));
    }

    let judge = |x1: f64, y1: f64, x2: f64, y2: f64| -> Option<CollisionVerdict> {
        let lhs_sum = sum(theta_new, x1, y1)?;
        let lhs_2 = sum(theta_new, x2, y2)?;
        if (lhs_sum - lhs_2).abs() > cfg.tol_match {
            return None;
        }
        let (rhs_sum_1, rhs_sum_2) = (sum(theta, x1, y1)?, sum(theta, x2, y2)?);
        ((rhs_sum_1 - rhs_sum_2).abs() > cfg.tol_sep)
            .then_some(CollisionVerdict::Contradiction { x1, y1, x2, y2, lhs_sum, rhs_sum_1, rhs_sum_2 })
    };

    let diagonal = |t: f64| theta_new.eval_f64(t).ok().map(|v| v.xadd(v).unwrap());
    for &(x1, y1) in &cfg.anchors {
        let Some(target) = sum(theta_new, x1, y1) else { continue };
        if let Some(t) = solve(&diagonal, target) {
            if let Some(found) = judge(x1, y1, t, t) {
                return Ok(found);
            }
        }
    }

    let us: Vec<f64> = (1..=cfg.probes).map(|i| i as f64 / cfg.probes as f64).collect();
    let mut table: Vec<(f64, f64, f64, f64)> = Vec::new();
    for (i, &x) in us.iter().enumerate() {
        for &y in &us[i..] {
            if let (Some(s_new), Some(s)) = (sum(theta_new, x, y), sum(theta, x, y)) {
                table.push((s_new, s, x, y));
            }
        }
    }
    table.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.2.total_cmp(&q.2)));
    for w in table.windows(2) {
        let ((_, s1, x1, y1), (_, s2, x2, _)) = (w[0], w[1]);
        if (s1 - s2).abs() <= cfg.tol_sep {
            continue;
        }
        let target = sum(theta_new, x1, y1).expect("tabulated");
        let Some(fx2) = theta_new.eval_f64(x2).ok() else { continue };
        let row = |y: f64| theta_new.eval_f64(y).ok().and_then(|v| v.xadd(fx2).ok());
        if let Some(y2) = solve(&row, target) {
            if let Some(found) = judge(x1, y1, x2, y2) {
                return Ok(found);
            }
        }
    }
    Ok(CollisionVerdict::Consistent)
}
