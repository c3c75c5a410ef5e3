//! Reference generator pairs: the catalog's valid pairs and invalid pairs
//! built to break exactly one condition each.

use crate::genfn::{Interval, UnaryFn};
use crate::pair::{GeneratorPair, Orientation};
use crate::xreal::{AffineMap, XReal};

fn half_line() -> Interval {
    Interval::closed(XReal::ZERO, XReal::PosInf)
}

fn standard(theta: UnaryFn, vartheta: UnaryFn) -> GeneratorPair {
    GeneratorPair::new(theta, vartheta, Orientation::StandardDecreasing).expect("fixture pair is well formed")
}

/// `(−ln x, e^{−x})`, generating `O(x,y) = xy`.
pub fn product_pair() -> GeneratorPair {
    standard(UnaryFn::neg_log(), UnaryFn::exp_neg())
}

/// `((1−x)/x, 1/(1+x))`, generating `xy/(x+y−xy)`.
pub fn reciprocal_cauchy_pair() -> GeneratorPair {
    standard(UnaryFn::reciprocal_residual(), UnaryFn::cauchy())
}

/// `(ln x, e^{x})` in the extended orientation, generating `xy`.
pub fn extended_product_pair() -> GeneratorPair {
    GeneratorPair::new(UnaryFn::log_pos(), UnaryFn::exp_pos(), Orientation::ExtendedIncreasing)
        .expect("fixture pair is well formed")
}

/// `(−ln x, 1/(1+x))`, generating `1/(1 − ln xy)`.
pub fn neg_log_cauchy_pair() -> GeneratorPair {
    standard(UnaryFn::neg_log(), UnaryFn::cauchy())
}

/// `(1 − ln x, e^{−(x−2)})` on `[2,+∞]`: the product pair shifted by 1.
pub fn shifted_product_pair() -> GeneratorPair {
    let theta = UnaryFn::affine_outer(AffineMap::new(1.0, 1.0), UnaryFn::neg_log());
    let vartheta = UnaryFn::affine_inner(AffineMap::new(1.0, -2.0), UnaryFn::exp_neg()).unwrap();
    standard(theta, vartheta)
}

/// `θ(x) = 1 − x` is finite at 0, so `O(x,0) > 0`.
pub fn finite_theta_at_zero() -> GeneratorPair {
    let theta = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "1 - x")]).unwrap();
    standard(theta, UnaryFn::exp_neg())
}

/// `θ(x) = −ln(min(2x, 1))` is flat on `[0.5, 1]`, so `O = 1` on `[0.5,1]²`.
pub fn plateau_theta() -> GeneratorPair {
    let theta = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "-ln(2*x)"), (0.5, "0")]).unwrap();
    standard(theta, UnaryFn::exp_neg())
}

/// ϑ halves at `s = 1`, a jump inside `[0,+∞)`.
pub fn vartheta_jump() -> GeneratorPair {
    let v = UnaryFn::piecewise_from(half_line(), &[(0.0, "exp(-x)"), (1.0, "0.5*exp(-x)")]).unwrap();
    standard(UnaryFn::neg_log(), v)
}

/// `ϑ(s) = max(0, 1 − s)` vanishes at the finite argument 1.
pub fn hinge_vartheta() -> GeneratorPair {
    let v = UnaryFn::piecewise_from(half_line(), &[(0.0, "1 - x"), (1.0, "0")]).unwrap();
    standard(UnaryFn::neg_log(), v)
}

/// `θ = 1 − ln x` with `ϑ = e^{−x}`: anchor 2 but `ϑ(2) = e^{−2}`.
pub fn wrong_anchor() -> GeneratorPair {
    let theta = UnaryFn::affine_outer(AffineMap::new(1.0, 1.0), UnaryFn::neg_log());
    standard(theta, UnaryFn::exp_neg())
}

/// Unit step at 0.5 on `[0,1]`.
pub fn unit_step() -> UnaryFn {
    UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "0"), (0.5, "1")]).unwrap()
}

/// The constant 1 on `[0,1]`.
pub fn constant_one() -> UnaryFn {
    UnaryFn::constant(1.0).restrict(Interval::unit()).unwrap()
}

/// A named pair with the verdicts it is expected to produce.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub pair: GeneratorPair,
    /// Condition key expected to fail, `None` for valid pairs.
    pub failing_condition: Option<&'static str>,
    /// Axiom key expected to fail, `None` for valid pairs.
    pub failing_axiom: Option<&'static str>,
}

impl Fixture {
    pub fn is_valid(&self) -> bool {
        self.failing_condition.is_none()
    }
}

/// Every fixture, valid ones first.
pub fn corpus() -> Vec<Fixture> {
    use crate::axioms::{O2, O3, O5};
    use crate::pair::{T2, T3, T4, T5};
    let valid = |name, pair| Fixture { name, pair, failing_condition: None, failing_axiom: None };
    let invalid = |name, pair, c, a| Fixture { name, pair, failing_condition: Some(c), failing_axiom: Some(a) };
    vec![
        valid("product", product_pair()),
        valid("reciprocal_cauchy", reciprocal_cauchy_pair()),
        valid("extended_product", extended_product_pair()),
        valid("neg_log_cauchy", neg_log_cauchy_pair()),
        valid("shifted_product", shifted_product_pair()),
        invalid("finite_theta_at_zero", finite_theta_at_zero(), T3, O2),
        invalid("plateau_theta", plateau_theta(), T5, O3),
        invalid("vartheta_jump", vartheta_jump(), T2, O5),
        invalid("hinge_vartheta", hinge_vartheta(), T4, O2),
        invalid("wrong_anchor", wrong_anchor(), T5, O3),
    ]
}
