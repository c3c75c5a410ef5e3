use std::cmp::Ordering;

use super::{GenFnError, UnaryFn};
use crate::xreal::XReal;

/// Maximum bisection steps for [`inverse_monotone`].
pub const BISECTION_BUDGET: usize = 200;

/// Solves `f(x) = y` for continuous strictly monotone `f` by bisection.
///
/// Endpoint values are matched by tag, so `y = f(lo)` or `y = f(hi)` returns
/// the endpoint itself, infinite or not. Otherwise the bracket is shrunk
/// until its width is at most `tol·max(1, |x|)` and the residual is at most
/// `tol`, or until it collapses to adjacent doubles.
pub fn inverse_monotone(f: &UnaryFn, y: XReal, tol: f64) -> Result<XReal, GenFnError> {
    let dom = f.domain();
    let f_lo = f.eval(dom.lo)?;
    let f_hi = f.eval(dom.hi)?;
    if y == f_lo {
        return Ok(dom.lo);
    }
    if y == f_hi {
        return Ok(dom.hi);
    }
    let increasing = match f_lo.cmp(&f_hi) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => return Err(GenFnError::MonotonicityViolation { x: dom.lo }),
    };
    let (min_v, max_v) = if increasing { (f_lo, f_hi) } else { (f_hi, f_lo) };
    if y < min_v || y > max_v {
        return Err(GenFnError::NotBracketed { y, lo_value: f_lo, hi_value: f_hi });
    }
    // "before" means f(x) is on the same side of y as f(lo)
    let before = |v: XReal| if increasing { v < y } else { v > y };

    let (mut a, mut b) = finite_bracket(f, y, &before)?;
    let mut fa = f.eval(XReal::Finite(a))?;
    let mut fb = f.eval(XReal::Finite(b))?;
    for _ in 0..BISECTION_BUDGET {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            return Ok(XReal::Finite(mid));
        }
        let fm = f.eval(XReal::Finite(mid))?;
        let inside = if increasing { fa <= fm && fm <= fb } else { fa >= fm && fm >= fb };
        if !inside {
            return Err(GenFnError::MonotonicityViolation { x: XReal::Finite(mid) });
        }
        if fm == y {
            return Ok(XReal::Finite(mid));
        }
        let width_ok = b - a <= tol * mid.abs().max(1.0);
        let resid_ok = fm.finite_distance(y).is_some_and(|r| r <= tol);
        if width_ok && resid_ok {
            return Ok(XReal::Finite(mid));
        }
        if before(fm) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    Err(GenFnError::BudgetExhausted(BISECTION_BUDGET))
}

/// A finite bracket `[a, b]` with `before(f(a))` and `!before(f(b))`.
/// Infinite domain ends are replaced by doubling outward.
fn finite_bracket(
    f: &UnaryFn,
    y: XReal,
    before: &dyn Fn(XReal) -> bool,
) -> Result<(f64, f64), GenFnError> {
    let dom = f.domain();
    let probe = |v: f64| f.eval(XReal::Finite(v));
    let mut a = match dom.lo {
        XReal::Finite(v) => v,
        _ => {
            let anchor = dom.hi.finite().map_or(0.0, |h| h.min(0.0));
            let mut step = 1.0;
            let mut a = anchor - step;
            while !before(probe(a)?) {
                step *= 2.0;
                a = anchor - step;
                if !a.is_finite() {
                    return Err(GenFnError::NotBracketed { y, lo_value: dom.lo, hi_value: dom.hi });
                }
            }
            a
        }
    };
    let b = match dom.hi {
        XReal::Finite(v) => v,
        _ => {
            let anchor = a.max(0.0);
            let mut step = 1.0;
            let mut b = anchor + step;
            while before(probe(b)?) {
                a = b;
                step *= 2.0;
                b = anchor + step;
                if !b.is_finite() {
                    return Err(GenFnError::NotBracketed { y, lo_value: dom.lo, hi_value: dom.hi });
                }
            }
            b
        }
    };
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfn::Interval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let x = inverse_monotone(&UnaryFn::neg_log(), XReal::new(2f64.ln()), 1e-12).unwrap();
        assert!((x.to_f64() - 0.5).abs() < 1e-12);

        let x = inverse_monotone(&UnaryFn::exp_neg(), XReal::new(0.25), 1e-12).unwrap();
        assert!((x.to_f64() - 4f64.ln()).abs() < 1e-11);

        let err = inverse_monotone(&UnaryFn::exp_neg(), XReal::new(2.0), 1e-12).unwrap_err();
        assert!(matches!(err, GenFnError::NotBracketed { .. }));
    }

    #[test]
    fn infinite_endpoint_values_by_tag() {
        assert_eq!(inverse_monotone(&UnaryFn::neg_log(), XReal::PosInf, 1e-12).unwrap(), XReal::ZERO);
        assert_eq!(inverse_monotone(&UnaryFn::exp_neg(), XReal::ZERO, 1e-12).unwrap(), XReal::PosInf);
        assert_eq!(inverse_monotone(&UnaryFn::exp_pos(), XReal::ZERO, 1e-12).unwrap(), XReal::NegInf);
    }

    #[test]
    fn increasing_with_infinite_lower_end() {
        let x = inverse_monotone(&UnaryFn::exp_pos(), XReal::new(0.125), 1e-13).unwrap();
        assert!((x.to_f64() - 0.125f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn detects_non_monotone() {
        let bump = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "4*x*(1-x) + x")]).unwrap();
        // endpoints 0 and 1 bracket 0.9, but the function overshoots inside
        let r = inverse_monotone(&bump, XReal::new(0.9), 1e-12);
        assert!(matches!(r, Err(GenFnError::MonotonicityViolation { .. })), "{r:?}");
    }

    #[test]
    fn round_trip_on_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases: [(UnaryFn, f64, f64); 4] = [
            (UnaryFn::neg_log(), 0.0, 30.0),
            (UnaryFn::exp_neg(), 1e-12, 1.0),
            (UnaryFn::cauchy(), 1e-6, 1.0),
            (UnaryFn::reciprocal_residual(), 0.0, 1e3),
        ];
        for (f, lo, hi) in cases {
            for _ in 0..100 {
                let y: f64 = rng.gen_range(lo..hi);
                let x = inverse_monotone(&f, XReal::new(y), 1e-12).unwrap();
                let back = f.eval(x).unwrap().to_f64();
                assert!((back - y).abs() <= 1e-10, "{f:?} y={y} back={back}");
            }
        }
    }
}
