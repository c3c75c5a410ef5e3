//! A direct numerical check of the overlap axioms on a grid.
//!
//! The checker only evaluates `O`; it never looks at generators. Axioms:
//!
//! - O1 `O(x,y) = O(y,x)`
//! - O2 `O(x,y) = 0` exactly when `xy = 0`
//! - O3 `O(x,y) = 1` exactly when `xy = 1`
//! - O4 `O` is non-decreasing in each argument
//! - O5 `O` is continuous
//!
//! The "only if" halves of O2 and O3 are read at a margin `δ` from the
//! boundary: values near `xy = 0` or `xy = 1` are numerically
//! indistinguishable from the limit.

use std::collections::BTreeMap;
use std::convert::Infallible;

use rayon::prelude::*;
use serde::Serialize;

use crate::genfn::probe::Slice;
use crate::genfn::{ProbeReport, Verdict};
use crate::pair::{eval_overlap, unit_grid, GeneratorPair};

pub const O1: &str = "O1_symmetry";
pub const O2: &str = "O2_zero_iff_product_zero";
pub const O3: &str = "O3_one_iff_product_one";
pub const O4: &str = "O4_non_decreasing";
pub const O5: &str = "O5_continuity";

/// Distance from the boundary at which strict positivity and strict
/// separation from 1 are required.
pub const DELTA: f64 = 1e-3;
/// Required gap below 1 where `min(x,y) ≤ 1 − δ`.
pub const TOL_SEP: f64 = 1e-9;

/// Anything that can be evaluated on `[0,1]²`. Failed evaluations are NaN.
pub trait BlackBoxOverlap: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Sync> BlackBoxOverlap for F {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

impl BlackBoxOverlap for GeneratorPair {
    fn eval(&self, x: f64, y: f64) -> f64 {
        eval_overlap(self, x, y).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridWitness {
    pub description: String,
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomEntry {
    pub verdict: Verdict,
    pub witnesses: Vec<GridWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomEntry {
    fn pass() -> Self {
        AxiomEntry { verdict: Verdict::Pass, witnesses: vec![], note: None }
    }

    fn fail(description: impl Into<String>, points: Vec<GridPoint>) -> Self {
        AxiomEntry {
            verdict: Verdict::Fail,
            witnesses: vec![GridWitness { description: description.into(), points }],
            note: None,
        }
    }

    fn note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub grid_n: usize,
    pub tol: f64,
    pub delta: f64,
    pub tol_sep: f64,
    /// Every value must be a number in `[0,1]`.
    pub codomain: AxiomEntry,
    pub axioms: BTreeMap<String, AxiomEntry>,
    pub overall: Verdict,
}

impl AxiomReport {
    pub fn axiom(&self, key: &str) -> &AxiomEntry {
        &self.axioms[key]
    }

    pub fn failed(&self) -> Vec<&str> {
        self.axioms.iter().filter(|(_, e)| e.verdict == Verdict::Fail).map(|(k, _)| k.as_str()).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.overall == Verdict::Pass
    }
}

fn pt(x: f64, y: f64, value: f64) -> GridPoint {
    GridPoint { x, y, value }
}

/// Checks O1–O5 on the grid `x_i = i/(n−1)`.
pub fn check_axioms<O: BlackBoxOverlap + ?Sized>(o: &O, n: usize, tol: f64) -> AxiomReport {
    assert!(n >= 2, "grid needs at least 2 points");
    let xs = unit_grid(n);
    let v: Vec<Vec<f64>> = xs.par_iter().map(|&x| xs.iter().map(|&y| o.eval(x, y)).collect()).collect();

    let codomain = match (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !(0.0..=1.0).contains(&v[i][j])) {
        Some((i, j)) => AxiomEntry::fail("value_outside_unit_interval", vec![pt(xs[i], xs[j], v[i][j])]),
        None => AxiomEntry::pass(),
    };

    let mut axioms = BTreeMap::new();
    axioms.insert(O1.to_string(), symmetry(&xs, &v, tol));
    axioms.insert(O2.to_string(), zero_iff(o, &xs, &v, tol));
    axioms.insert(O3.to_string(), one_iff(o, &xs, &v, tol));
    axioms.insert(O4.to_string(), non_decreasing(&xs, &v, tol));
    axioms.insert(O5.to_string(), continuity(o, n, tol));

    let overall = axioms.values().chain([&codomain]).fold(Verdict::Pass, |acc, e| acc.and(e.verdict));
    AxiomReport { grid_n: n, tol, delta: DELTA, tol_sep: TOL_SEP, codomain, axioms, overall }
}

fn symmetry(xs: &[f64], v: &[Vec<f64>], tol: f64) -> AxiomEntry {
    let n = xs.len();
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = (v[i][j] - v[j][i]).abs();
            let d = if d.is_nan() { f64::INFINITY } else { d };
            if worst.is_none_or(|w| d > w.2) {
                worst = Some((i, j, d));
            }
        }
    }
    match worst {
        Some((i, j, d)) if d > tol => AxiomEntry::fail(
            format!("asymmetry {d:.6e}"),
            vec![pt(xs[i], xs[j], v[i][j]), pt(xs[j], xs[i], v[j][i])],
        ),
        _ => AxiomEntry::pass(),
    }
}

fn zero_iff<O: BlackBoxOverlap + ?Sized>(o: &O, xs: &[f64], v: &[Vec<f64>], tol: f64) -> AxiomEntry {
    let n = xs.len();
    // boundary: (0, y) first, then (x, 0)
    let boundary = (0..n).map(|j| (0, j)).chain((0..n).map(|i| (i, 0)));
    let mut worst: Option<(usize, usize, f64)> = None;
    for (i, j) in boundary {
        let a = v[i][j].abs();
        let a = if a.is_nan() { f64::INFINITY } else { a };
        if a > tol && worst.is_none_or(|w| a > w.2) {
            worst = Some((i, j, a));
        }
    }
    if let Some((i, j, _)) = worst {
        return AxiomEntry::fail("nonzero_on_boundary", vec![pt(xs[i], xs[j], v[i][j])]);
    }

    let at_delta = o.eval(DELTA, DELTA);
    let positivity = format!("O(delta, delta) = {at_delta:e}");
    if !(at_delta > tol) {
        return AxiomEntry::fail("zero_inside", vec![pt(DELTA, DELTA, at_delta)]).note(positivity);
    }
    for (i, &x) in xs.iter().enumerate().filter(|(_, &x)| x >= DELTA) {
        for (j, &y) in xs.iter().enumerate().filter(|(_, &y)| y >= DELTA) {
            if !(v[i][j] > tol) {
                return AxiomEntry::fail("zero_inside", vec![pt(x, y, v[i][j])]).note(positivity);
            }
        }
    }
    AxiomEntry::pass().note(positivity)
}

fn one_iff<O: BlackBoxOverlap + ?Sized>(o: &O, xs: &[f64], v: &[Vec<f64>], tol: f64) -> AxiomEntry {
    let n = xs.len();
    let top = v[n - 1][n - 1];
    if !(top >= 1.0 - tol) {
        return AxiomEntry::fail("not_one_at_corner", vec![pt(1.0, 1.0, top)]);
    }
    let edge = 1.0 - DELTA;
    let too_high = |val: f64| !(val <= 1.0 - TOL_SEP);

    let diagonal: Vec<GridPoint> = (0..n)
        .filter(|&i| xs[i] <= edge && too_high(v[i][i]))
        .map(|i| pt(xs[i], xs[i], v[i][i]))
        .collect();
    let grid: Vec<GridPoint> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| xs[i].min(xs[j]) <= edge && too_high(v[i][j]))
        .map(|(i, j)| pt(xs[i], xs[j], v[i][j]))
        .collect();
    let delta_line: Vec<GridPoint> = xs
        .iter()
        .flat_map(|&y| [pt(edge, y, o.eval(edge, y)), pt(y, edge, o.eval(y, edge))])
        .filter(|p| too_high(p.value))
        .collect();

    for (found, where_) in [(diagonal, "diagonal"), (grid, "grid"), (delta_line, "delta_line")] {
        if !found.is_empty() {
            let desc = format!("one_away_from_corner ({} {where_} point(s))", found.len());
            return AxiomEntry::fail(desc, vec![found[found.len() / 2]]);
        }
    }
    AxiomEntry::pass()
}

fn non_decreasing(xs: &[f64], v: &[Vec<f64>], tol: f64) -> AxiomEntry {
    let n = xs.len();
    for i in 0..n {
        for j in 0..n - 1 {
            let (a, b) = (v[i][j], v[i][j + 1]);
            if !(b >= a - tol) {
                return AxiomEntry::fail("decreasing_in_y", vec![pt(xs[i], xs[j], a), pt(xs[i], xs[j + 1], b)]);
            }
            let (a, b) = (v[j][i], v[j + 1][i]);
            if !(b >= a - tol) {
                return AxiomEntry::fail("decreasing_in_x", vec![pt(xs[j], xs[i], a), pt(xs[j + 1], xs[i], b)]);
            }
        }
    }
    AxiomEntry::pass()
}

#[derive(Clone, Copy)]
enum Line {
    Row(f64),
    Column(f64),
    Diagonal,
}

impl Line {
    fn at(self, t: f64) -> (f64, f64) {
        match self {
            Line::Row(x) => (x, t),
            Line::Column(y) => (t, y),
            Line::Diagonal => (t, t),
        }
    }

    fn name(self) -> String {
        match self {
            Line::Row(x) => format!("row x={x}"),
            Line::Column(y) => format!("column y={y}"),
            Line::Diagonal => "diagonal".to_string(),
        }
    }
}

fn continuity<O: BlackBoxOverlap + ?Sized>(o: &O, n: usize, tol: f64) -> AxiomEntry {
    let xs = unit_grid(n);
    let lines: Vec<Line> = xs
        .iter()
        .map(|&x| Line::Row(x))
        .chain(xs.iter().map(|&y| Line::Column(y)))
        .chain([Line::Diagonal])
        .collect();
    let slice = Slice { lo: 0.0, hi: 1.0, exclude_lo: false, exclude_hi: false };
    let reports: Vec<ProbeReport> = lines
        .par_iter()
        .map(|&line| {
            let f = |t: f64| -> Result<f64, Infallible> {
                let (x, y) = line.at(t);
                Ok(o.eval(x, y))
            };
            match slice.probe(&f, n, tol) {
                Ok(r) => r,
                Err(never) => match never {},
            }
        })
        .collect();

    let verdict = reports.iter().fold(Verdict::Pass, |acc, r| acc.and(r.verdict));
    let worst_ratio = reports.iter().filter_map(|r| r.refinement_ratio).fold(0.0, f64::max);
    let note = Some(format!("continuous at resolution n={n}; max refinement ratio {worst_ratio:.4}"));
    let bad: Vec<usize> = (0..reports.len()).filter(|&k| reports[k].verdict != Verdict::Pass).collect();
    let witnesses = bad
        .first()
        .map(|&k| {
            let line = lines[k];
            reports[k]
                .witnesses
                .iter()
                .map(|w| GridWitness {
                    description: format!("{} along {} ({} line(s) affected)", w.description, line.name(), bad.len()),
                    points: w
                        .points
                        .iter()
                        .map(|&(t, val)| {
                            let (x, y) = line.at(t.to_f64());
                            pt(x, y, val.to_f64())
                        })
                        .collect(),
                })
                .collect()
        })
        .unwrap_or_default();
    AxiomEntry { verdict, witnesses, note }
}

/// Outcome of comparing two overlap functions on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Equivalence {
    Equal { max_dev: f64 },
    Differ { max_dev: f64, x: f64, y: f64, value_a: f64, value_b: f64 },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal { .. })
    }

    pub fn max_dev(&self) -> f64 {
        match *self {
            Equivalence::Equal { max_dev } | Equivalence::Differ { max_dev, .. } => max_dev,
        }
    }
}

/// Largest `|Oa − Ob|` on the `n × n` grid; equal when it is at most `tol`.
pub fn equivalent<A, B>(a: &A, b: &B, n: usize, tol: f64) -> Equivalence
where
    A: BlackBoxOverlap + ?Sized,
    B: BlackBoxOverlap + ?Sized,
{
    let xs = unit_grid(n);
    let rows: Vec<(usize, f64, f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let mut best = (0, 0.0, f64::NAN, f64::NAN);
            for (j, &y) in xs.iter().enumerate() {
                let (va, vb) = (a.eval(x, y), b.eval(x, y));
                let d = (va - vb).abs();
                let d = if d.is_nan() { f64::INFINITY } else { d };
                if j == 0 || d > best.1 {
                    best = (j, d, va, vb);
                }
            }
            best
        })
        .collect();
    let mut arg = (0, rows[0]);
    for (i, r) in rows.iter().enumerate() {
        if r.1 > arg.1 .1 {
            arg = (i, *r);
        }
    }
    let (i, (j, max_dev, value_a, value_b)) = arg;
    if max_dev <= tol {
        Equivalence::Equal { max_dev }
    } else {
        Equivalence::Differ { max_dev, x: xs[i], y: xs[j], value_a, value_b }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn product_passes() {
        let r = check_axioms(&|x: f64, y: f64| x * y, 65, 1e-9);
        assert!(r.all_pass(), "{r:#?}");
    }

    #[test]
    fn arithmetic_mean_fails_o2() {
        let r = check_axioms(&|x: f64, y: f64| (x + y) / 2.0, 65, 1e-9);
        assert_eq!(r.failed(), vec![O2]);
        assert_eq!(r.axiom(O2).witnesses[0].points[0], pt(0.0, 1.0, 0.5));
    }

    #[test]
    fn plateau_fails_o3_at_three_quarters() {
        let r = check_axioms(&fixtures::plateau_theta(), 257, 1e-9);
        assert_eq!(r.failed(), vec![O3]);
        assert_eq!(r.axiom(O3).witnesses[0].points[0], pt(0.75, 0.75, 1.0));
    }

    #[test]
    fn each_invalid_fixture_fails_its_target_only() {
        for f in fixtures::corpus() {
            let r = check_axioms(&f.pair, 65, 1e-9);
            match f.failing_axiom {
                None => assert!(r.all_pass(), "{}: {:#?}", f.name, r),
                Some(target) => assert_eq!(r.failed(), vec![target], "{}", f.name),
            }
        }
    }

    #[test]
    fn jump_witness_lies_on_the_jump() {
        let r = check_axioms(&fixtures::vartheta_jump(), 65, 1e-9);
        let w = &r.axiom(O5).witnesses[0].points;
        // ϑ jumps where −ln(xy) = 1
        let prod = w[0].x * w[0].y;
        assert!((prod - (-1.0f64).exp()).abs() < 1e-6, "{w:?}");
    }

    #[test]
    fn non_monotone_and_asymmetric_are_caught() {
        let r = check_axioms(&|x: f64, y: f64| x * y * (1.5 - y) * 2.0 / (1.0 + (x - y).abs()), 33, 1e-9);
        assert!(r.failed().contains(&O4));
        let r = check_axioms(&|x: f64, y: f64| x * y * y, 33, 1e-9);
        assert!(r.failed().contains(&O1));
    }

    #[test]
    fn nan_values_fail_codomain() {
        let r = check_axioms(&|x: f64, y: f64| if x > 0.5 && y > 0.5 { f64::NAN } else { x * y }, 17, 1e-9);
        assert_eq!(r.codomain.verdict, Verdict::Fail);
        assert_eq!(r.overall, Verdict::Fail);
    }

    #[test]
    fn equivalence_examples() {
        let p = fixtures::product_pair();
        let e = equivalent(&p, &|x: f64, y: f64| x * y, 257, 1e-12);
        assert!(e.is_equal(), "{e:?}");

        let q = fixtures::reciprocal_cauchy_pair();
        match equivalent(&p, &q, 101, 1e-9) {
            Equivalence::Differ { x, y, value_a, value_b, .. } => {
                assert!((x - y).abs() < 0.2 && (0.25..=0.6).contains(&x), "({x},{y})");
                assert!((value_a - x * y).abs() < 1e-12);
                assert!(value_b > value_a);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            equivalent(&p, &p, 33, 0.0),
            Equivalence::Equal { max_dev: 0.0 }
        );
    }

    #[test]
    fn equivalence_is_symmetric() {
        let (p, q) = (fixtures::product_pair(), fixtures::neg_log_cauchy_pair());
        assert_eq!(equivalent(&p, &q, 33, 1e-9).max_dev(), equivalent(&q, &p, 33, 1e-9).max_dev());
    }
}
