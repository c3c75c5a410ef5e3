use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TransformError;
use crate::genfn::{Interval, UnaryFn, Witness};
use crate::xreal::XReal;

/// Random midpoint pairs checked after the window ends.
pub const JENSEN_BATCH: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AffinityVerdict {
    /// `f(x) = c·x + a` on the samples.
    Affine { c: f64, a: f64, max_residual: f64 },
    /// The worst midpoint triple `(x, f(x)), (y, f(y)), ((x+y)/2, f((x+y)/2))`.
    Violation { witness: Witness, gap: f64 },
}

impl AffinityVerdict {
    pub fn is_affine(&self) -> bool {
        matches!(self, AffinityVerdict::Affine { .. })
    }
}

/// Decides whether `f` solves `f((x+y)/2) = (f(x)+f(y))/2` on `window`.
///
/// A least-squares line is fitted through `n` equally spaced samples, and
/// the midpoint identity is checked on the window ends and on
/// [`JENSEN_BATCH`] random pairs drawn with `seed`. Both must hold within
/// `tol`.
pub fn jensen_affinity_test(
    f: &UnaryFn,
    window: Interval,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<AffinityVerdict, TransformError> {
    let (XReal::Finite(lo), XReal::Finite(hi)) = (window.lo, window.hi) else {
        return Err(TransformError::InvalidParams(format!("window {window} must be finite")));
    };
    if !(lo < hi) || n < 8 {
        return Err(TransformError::InvalidParams(format!("need a proper window and n >= 8, got {window}, n={n}")));
    }
    if !f.domain().contains_interval(&window) {
        return Err(TransformError::InvalidParams(format!("window {window} leaves the domain {}", f.domain())));
    }
    let eval = |x: f64| -> Result<f64, TransformError> {
        let v = f.eval(XReal::Finite(x))?;
        v.finite().ok_or_else(|| TransformError::InvalidParams(format!("f({x}) = {v} is not finite")))
    };

    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    let ys = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>, _>>()?;
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let c = sxy / sxx;
    let a = ym - c * xm;
    let max_residual = xs.iter().zip(&ys).map(|(x, y)| (y - (c * x + a)).abs()).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = std::iter::once((lo, hi))
        .chain((0..JENSEN_BATCH).map(|_| (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi))))
        .collect::<Vec<_>>();
    let mut worst: Option<(f64, [(f64, f64); 3])> = None;
    for (x, y) in pairs {
        let mid = x + 0.5 * (y - x);
        let (fx, fy, fm) = (eval(x)?, eval(y)?, eval(mid)?);
        let gap = (fm - 0.5 * (fx + fy)).abs();
        if worst.is_none_or(|w| gap > w.0) {
            worst = Some((gap, [(x, fx), (y, fy), (mid, fm)]));
        }
    }
    let (gap, triple) = worst.expect("at least the window ends are checked");
    if max_residual <= tol && gap <= tol {
        return Ok(AffinityVerdict::Affine { c, a, max_residual });
    }
    let points = triple.iter().map(|&(x, v)| (XReal::Finite(x), XReal::Finite(v))).collect();
    Ok(AffinityVerdict::Violation { witness: Witness::new("midpoint_identity_violated", points), gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::AffineMap;

    fn on(lo: f64, hi: f64) -> Interval {
        Interval::closed(XReal::new(lo), XReal::new(hi))
    }

    fn expr(src: &str) -> UnaryFn {
        UnaryFn::piecewise_from(Interval::closed(XReal::new(-100.0), XReal::new(100.0)), &[(-100.0, src)]).unwrap()
    }

    #[test]
    fn affine_line_is_recovered() {
        let f = UnaryFn::affine_outer(AffineMap::new(3.0, 2.0), UnaryFn::identity());
        match jensen_affinity_test(&f, on(0.0, 10.0), 64, 1e-9, 1).unwrap() {
            AffinityVerdict::Affine { c, a, .. } => {
                assert!((c - 3.0).abs() <= 1e-12 && (a - 2.0).abs() <= 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn square_violates_at_window_ends() {
        match jensen_affinity_test(&expr("x^2"), on(0.0, 4.0), 64, 1e-9, 1).unwrap() {
            AffinityVerdict::Violation { witness, gap } => {
                assert_eq!(gap, 4.0);
                let p = &witness.points;
                assert_eq!((p[0].0, p[1].0, p[2].0), (XReal::ZERO, XReal::new(4.0), XReal::new(2.0)));
                assert_eq!((p[2].1, p[0].1, p[1].1), (XReal::new(4.0), XReal::ZERO, XReal::new(16.0)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponential_gap() {
        match jensen_affinity_test(&expr("exp(x)"), on(0.0, 2.0), 64, 1e-9, 1).unwrap() {
            AffinityVerdict::Violation { gap, .. } => {
                let e = 1f64.exp();
                assert!((gap - ((1.0 + e * e) / 2.0 - e).abs()).abs() < 1e-12);
                assert!((gap - 1.4762).abs() < 1e-4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cauchy_violates() {
        for (lo, hi) in [(0.0, 1.0), (3.0, 10.0)] {
            let r = jensen_affinity_test(&expr("1/(1+x)"), on(lo, hi), 64, 1e-9, 9).unwrap();
            assert!(!r.is_affine());
        }
    }

    #[test]
    fn rejects_bad_windows() {
        let f = expr("x");
        assert!(jensen_affinity_test(&f, Interval::closed(XReal::ZERO, XReal::PosInf), 64, 1e-9, 0).is_err());
        assert!(jensen_affinity_test(&f, on(0.0, 1.0), 4, 1e-9, 0).is_err());
        assert!(jensen_affinity_test(&UnaryFn::neg_log(), on(0.0, 2.0), 64, 1e-9, 0).is_err());
    }
}
