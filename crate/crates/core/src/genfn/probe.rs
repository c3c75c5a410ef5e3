//! Grid sampling and numerical monotonicity / continuity probes.
//!
//! Sampling can refute but never prove continuity or strictness, so every
//! report carries the grid it was computed on and a verdict is always "at
//! resolution n".

use serde::{Deserialize, Serialize};

use super::{GenFnError, Interval, UnaryFn};
use crate::xreal::XReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates, then inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Concrete evidence: sampled `(input, output)` points plus a short code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<(XReal, XReal)>,
    pub description: String,
}

impl Witness {
    pub fn new(description: impl Into<String>, points: Vec<(XReal, XReal)>) -> Self {
        Witness { points, description: description.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub grid_n: usize,
    /// `M(4n)/M(n)` for continuity probes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl ProbeReport {
    pub fn pass(grid_n: usize) -> Self {
        ProbeReport { verdict: Verdict::Pass, witnesses: vec![], grid_n, refinement_ratio: None, caveat: None }
    }

    pub fn fail(grid_n: usize, witness: Witness) -> Self {
        ProbeReport {
            verdict: Verdict::Fail,
            witnesses: vec![witness],
            grid_n,
            refinement_ratio: None,
            caveat: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// Conjunction of several sub-reports, keeping all witnesses.
    pub fn combine(parts: &[&ProbeReport]) -> ProbeReport {
        let verdict = parts.iter().fold(Verdict::Pass, |v, p| v.and(p.verdict));
        let caveats: Vec<&str> = parts.iter().filter_map(|p| p.caveat.as_deref()).collect();
        ProbeReport {
            verdict,
            witnesses: parts.iter().flat_map(|p| p.witnesses.iter().cloned()).collect(),
            grid_n: parts.iter().map(|p| p.grid_n).max().unwrap_or(0),
            refinement_ratio: parts.iter().find_map(|p| p.refinement_ratio),
            caveat: (!caveats.is_empty()).then(|| caveats.join("; ")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Uniform,
    EndpointGeometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

/// Knobs shared by all probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub n: usize,
    pub scheme: Scheme,
    /// Jump / equality tolerance.
    pub tol: f64,
    /// Relative margin for strict monotonicity and strict separation.
    pub tol_strict: f64,
    /// Width of the window next to `x = 1` that hides plateaus.
    pub delta: f64,
    /// Length of the finite window replacing an infinite domain end.
    pub x_max: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            n: 257,
            scheme: Scheme::EndpointGeometric,
            tol: 1e-9,
            tol_strict: 1e-12,
            delta: 1e-3,
            x_max: 64.0,
        }
    }
}

impl ProbeConfig {
    pub fn with_n(n: usize) -> Self {
        ProbeConfig { n, ..Default::default() }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Number of geometric points packed against an endpoint with infinite value.
const CLUSTER_LEN: i32 = 40;

/// The finite window `[a, b]` standing in for a (possibly unbounded) domain.
pub(crate) fn finite_window(dom: &Interval, x_max: f64) -> (f64, f64) {
    match (dom.lo, dom.hi) {
        (XReal::Finite(a), XReal::Finite(b)) => (a, b),
        (XReal::Finite(a), _) => (a, a + x_max),
        (_, XReal::Finite(b)) => (b - x_max, b),
        _ => (-x_max, x_max),
    }
}

fn uniform(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let last = (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * (i as f64 / last) })
}

/// Samples `f` on its domain, sorted by abscissa.
///
/// `Uniform` takes `n` equally spaced points over the finite window plus
/// any closed infinite end. `EndpointGeometric` additionally packs points
/// `e ± w·2^{-k}` against each finite end `e` where `f` is infinite.
pub fn sample_grid(f: &UnaryFn, n: usize, scheme: Scheme) -> Result<Vec<(XReal, XReal)>, GenFnError> {
    sample_grid_with(f, n, scheme, ProbeConfig::default().x_max)
}

pub fn sample_grid_with(
    f: &UnaryFn,
    n: usize,
    scheme: Scheme,
    x_max: f64,
) -> Result<Vec<(XReal, XReal)>, GenFnError> {
    assert!(n >= 2, "grid needs at least 2 points");
    let dom = f.domain();
    let (a, b) = finite_window(&dom, x_max);
    let mut xs: Vec<XReal> = if a == b {
        vec![XReal::Finite(a)]
    } else {
        uniform(a, b, n).map(XReal::Finite).collect()
    };
    if dom.lo.is_infinite() {
        xs.insert(0, dom.lo);
    }
    if dom.hi.is_infinite() {
        xs.push(dom.hi);
    }
    xs.retain(|x| dom.contains(*x));

    if scheme == Scheme::EndpointGeometric && a < b {
        let span = b - a;
        for (end, sign) in [(dom.lo, 1.0), (dom.hi, -1.0)] {
            let XReal::Finite(e) = end else { continue };
            if !dom.contains(end) || f.eval(end)?.is_finite() {
                continue;
            }
            for k in 1..=CLUSTER_LEN {
                xs.push(XReal::Finite(e + sign * span * 2f64.powi(-k)));
            }
        }
        xs.sort();
        xs.dedup();
    }
    xs.into_iter().map(|x| Ok((x, f.eval(x)?))).collect()
}

/// Checks that adjacent samples move in `direction`.
///
/// Non-strict mode tolerates backward steps up to `tol·max(1, |f|)`. Strict
/// mode requires each step to exceed `tol_strict·max(|f(x_i)|, |f(x_{i+1})|)`,
/// which a plateau can never satisfy.
pub fn monotonicity_probe(f: &UnaryFn, cfg: &ProbeConfig, direction: Direction, strict: bool) -> ProbeReport {
    let samples = match sample_grid_with(f, cfg.n, cfg.scheme, cfg.x_max) {
        Ok(s) => s,
        Err(e) => return eval_failure(cfg.n, e),
    };
    monotonicity_of_samples(&samples, cfg, direction, strict)
}

pub(crate) fn monotonicity_of_samples(
    samples: &[(XReal, XReal)],
    cfg: &ProbeConfig,
    direction: Direction,
    strict: bool,
) -> ProbeReport {
    let mut violations = 0usize;
    let mut first = None;
    for w in samples.windows(2) {
        let (prev, next) = match direction {
            Direction::NonIncreasing => (w[0].1, w[1].1),
            Direction::NonDecreasing => (w[1].1, w[0].1),
        };
        // we need prev >= next (strictly, in strict mode)
        let ok = match (prev, next) {
            (XReal::Finite(p), XReal::Finite(q)) => {
                if strict {
                    p - q > cfg.tol_strict * p.abs().max(q.abs())
                } else {
                    q - p <= cfg.tol * p.abs().max(1.0)
                }
            }
            _ if strict => prev > next,
            _ => prev >= next,
        };
        if !ok {
            violations += 1;
            first.get_or_insert((w[0], w[1]));
        }
    }
    let mut report = match first {
        None => ProbeReport::pass(samples.len()),
        Some((p, q)) => {
            let code = if strict { "not_strictly_monotone" } else { "monotonicity_violation" };
            let desc = format!("{code} ({violations} adjacent pair(s))");
            ProbeReport::fail(samples.len(), Witness::new(desc, vec![p, q]))
        }
    };
    if strict {
        report.caveat = Some(format!("strict at resolution n={}", cfg.n));
    }
    report
}

fn eval_failure(n: usize, e: GenFnError) -> ProbeReport {
    ProbeReport::fail(n, Witness::new(format!("evaluation_error: {e}"), vec![]))
}

/// Numerical continuity check of `f` on its domain.
///
/// The interior is examined on the finite window at `n` and `4n`
/// resolution. Cells whose difference stands out from their neighbours are
/// refined until the cell collapses to adjacent doubles: a difference that
/// survives unchanged is a jump; one that keeps shrinking is a steep but
/// continuous stretch. Infinite-valued endpoints are excluded from the
/// interior scan and checked separately: the function must diverge towards
/// the tag. Infinite domain ends with a finite value must be approached by
/// far-out samples.
pub fn continuity_probe(f: &UnaryFn, cfg: &ProbeConfig) -> ProbeReport {
    let dom = f.domain();
    let (a, b) = finite_window(&dom, cfg.x_max);
    let eval = |x: f64| f.eval(XReal::Finite(x));

    let endpoint_witnesses = match endpoint_checks(f, &dom, (a, b), cfg) {
        Ok(ws) => ws,
        Err(e) => return eval_failure(cfg.n, e),
    };

    let exclude_lo = dom.lo.is_finite() && matches!(f.eval(dom.lo), Ok(v) if v.is_infinite());
    let exclude_hi = dom.hi.is_finite() && matches!(f.eval(dom.hi), Ok(v) if v.is_infinite());
    let slice = Slice { lo: a, hi: b, exclude_lo, exclude_hi };

    let mut report = match slice.probe(&|x| eval(x).map(XReal::to_f64), cfg.n, cfg.tol) {
        Ok(r) => r,
        Err(e) => return eval_failure(cfg.n, e),
    };
    if !endpoint_witnesses.is_empty() {
        report.verdict = Verdict::Fail;
        report.witnesses.extend(endpoint_witnesses);
    }
    report
}

fn endpoint_checks(
    f: &UnaryFn,
    dom: &Interval,
    (a, b): (f64, f64),
    cfg: &ProbeConfig,
) -> Result<Vec<Witness>, GenFnError> {
    let mut out = Vec::new();
    let span = (b - a).max(f64::MIN_POSITIVE);
    for (end, sign) in [(dom.lo, 1.0), (dom.hi, -1.0)] {
        if !dom.contains(end) {
            continue;
        }
        let v_end = f.eval(end)?;
        match (end, v_end) {
            // finite end with infinite value: must diverge towards the tag
            (XReal::Finite(e), XReal::PosInf | XReal::NegInf) => {
                let toward = if v_end == XReal::PosInf { 1.0 } else { -1.0 };
                let at = |k: i32| -> Result<(XReal, XReal), GenFnError> {
                    let x = XReal::Finite(e + sign * span * 2f64.powi(-k));
                    Ok((x, f.eval(x)?))
                };
                let probes = [at(20)?, at(30)?, at(40)?, at(50)?];
                let mut stalled = false;
                for w in probes.windows(2) {
                    match (w[0].1, w[1].1) {
                        (XReal::Finite(p), XReal::Finite(q)) => {
                            if toward * (q - p) <= cfg.tol {
                                stalled = true;
                            }
                        }
                        (_, q) if q == v_end => {}
                        _ => stalled = true,
                    }
                }
                if stalled {
                    let mut pts = vec![(end, v_end)];
                    pts.extend(probes);
                    out.push(Witness::new("no_divergence_at_infinite_endpoint", pts));
                }
            }
            // infinite end with finite value: far samples must approach it
            (XReal::PosInf | XReal::NegInf, XReal::Finite(v)) => {
                let dir = if end == XReal::PosInf { 1.0 } else { -1.0 };
                let base = if dir > 0.0 { b } else { a };
                let x = XReal::Finite(base + dir * cfg.x_max * 2f64.powi(40));
                let fx = f.eval(x)?;
                let close = fx.finite().is_some_and(|w| (w - v).abs() <= cfg.tol);
                if !close {
                    out.push(Witness::new("limit_mismatch_at_infinity", vec![(x, fx), (end, v_end)]));
                }
            }
            // infinite end with infinite value: far samples must trend that way
            (XReal::PosInf | XReal::NegInf, _) => {
                let dir = if end == XReal::PosInf { 1.0 } else { -1.0 };
                let base = if dir > 0.0 { b } else { a };
                let x1 = XReal::Finite(base + dir * cfg.x_max * 2f64.powi(20));
                let x2 = XReal::Finite(base + dir * cfg.x_max * 2f64.powi(40));
                let (f1, f2) = (f.eval(x1)?, f.eval(x2)?);
                let toward = if v_end == XReal::PosInf { f2 > f1 } else { f2 < f1 };
                if !(toward || f2 == v_end) {
                    out.push(Witness::new("no_divergence_at_infinity", vec![(x1, f1), (x2, f2), (end, v_end)]));
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Number of cells per slice that get the localized refinement.
const MAX_CANDIDATES: usize = 8;
/// Refinement depth cap; enough to go from unit width to subnormal spacing.
const MAX_LEVELS: usize = 700;
/// Levels between the two jump measurements that decide persistence.
const PERSISTENCE_LAG: usize = 10;
/// Relative change below which a refined difference counts as persistent.
const PERSISTENCE_REL: f64 = 1e-3;

/// A one-dimensional continuity scan over `[lo, hi]`, reused for
/// generator functions and for rows/columns of bivariate functions.
pub(crate) struct Slice {
    pub lo: f64,
    pub hi: f64,
    /// Skip the end point itself (its value is infinite and checked apart).
    pub exclude_lo: bool,
    pub exclude_hi: bool,
}

enum Refined {
    Clean,
    Jump { l: f64, r: f64, fl: f64, fr: f64 },
    Unresolved { l: f64, r: f64, fl: f64, fr: f64 },
}

impl Slice {
    fn admits(&self, x: f64) -> bool {
        let lo_ok = if self.exclude_lo { x > self.lo } else { x >= self.lo };
        let hi_ok = if self.exclude_hi { x < self.hi } else { x <= self.hi };
        lo_ok && hi_ok
    }

    /// Values at `n` equally spaced points; `None` where excluded or infinite.
    fn grid<E>(&self, f: &dyn Fn(f64) -> Result<f64, E>, n: usize) -> Result<Vec<(f64, Option<f64>)>, E> {
        uniform(self.lo, self.hi, n)
            .map(|x| {
                if !self.admits(x) {
                    return Ok((x, None));
                }
                let v = f(x)?;
                Ok((x, v.is_finite().then_some(v)))
            })
            .collect()
    }

    pub fn probe<E>(&self, f: &dyn Fn(f64) -> Result<f64, E>, n: usize, tol: f64) -> Result<ProbeReport, E> {
        if self.hi <= self.lo || n < 2 {
            return Ok(ProbeReport::pass(n));
        }
        let coarse = self.grid(f, n)?;
        let fine_n = 4 * (n - 1) + 1;
        let fine = self.grid(f, fine_n)?;

        // an infinite value strictly inside the window is a jump by itself
        for (i, (x, v)) in fine.iter().enumerate() {
            if v.is_none() && self.admits(*x) {
                let fx = f(*x)?;
                let Ok(v) = XReal::from_f64(fx) else {
                    return Ok(ProbeReport::fail(fine_n, Witness::new(format!("not_a_number at {x}"), vec![])));
                };
                let nb = fine.get(i + 1).or_else(|| i.checked_sub(1).and_then(|j| fine.get(j)));
                let mut pts = vec![(XReal::Finite(*x), v)];
                if let Some(&(nx, Some(nv))) = nb {
                    pts.push((XReal::Finite(nx), XReal::Finite(nv)));
                }
                return Ok(ProbeReport::fail(fine_n, Witness::new("infinite_value_inside_window", pts)));
            }
        }

        let m_coarse = max_step(&coarse);
        let m_fine = max_step(&fine);
        let ratio = if m_coarse > 0.0 { m_fine / m_coarse } else { 0.0 };

        let diffs: Vec<Option<f64>> = fine
            .windows(2)
            .map(|w| match (w[0].1, w[1].1) {
                (Some(p), Some(q)) => Some(q - p),
                _ => None,
            })
            .collect();
        let mut scored: Vec<(usize, f64)> = (0..diffs.len())
            .filter_map(|i| excess(&diffs, i).map(|e| (i, e)))
            .filter(|&(_, e)| e > tol)
            .collect();
        scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let mut candidates: Vec<usize> = scored.iter().take(MAX_CANDIDATES).map(|c| c.0).collect();
        if let Some(big) = argmax_abs(&diffs).filter(|&i| diffs[i].unwrap().abs() > tol) {
            if !candidates.contains(&big) {
                candidates.push(big);
            }
        }

        let mut worst_jump: Option<(f64, [f64; 4])> = None;
        let mut unresolved: Option<[f64; 4]> = None;
        for &i in &candidates {
            match self.refine(f, fine[i].0, fine[i + 1].0, tol)? {
                Refined::Clean => {}
                Refined::Jump { l, r, fl, fr } => {
                    let j = (fr - fl).abs();
                    if worst_jump.is_none_or(|(w, _)| j > w) {
                        worst_jump = Some((j, [l, r, fl, fr]));
                    }
                }
                Refined::Unresolved { l, r, fl, fr } => {
                    unresolved.get_or_insert([l, r, fl, fr]);
                }
            }
        }

        let pts = |c: [f64; 4]| {
            vec![(XReal::Finite(c[0]), XReal::Finite(c[2])), (XReal::Finite(c[1]), XReal::Finite(c[3]))]
        };
        let mut report = if let Some((j, cell)) = worst_jump {
            ProbeReport::fail(fine_n, Witness::new(format!("persistent_jump (height {j:.6e})"), pts(cell)))
        } else if let Some(cell) = unresolved {
            ProbeReport {
                verdict: Verdict::Inconclusive,
                witnesses: vec![Witness::new("unresolved_oscillation", pts(cell))],
                grid_n: fine_n,
                refinement_ratio: None,
                caveat: None,
            }
        } else {
            ProbeReport::pass(fine_n)
        };
        report.refinement_ratio = Some(ratio);
        report.caveat = Some(format!("continuous at resolution n={n}"));
        Ok(report)
    }

    /// Zooms into `[l, r]`, each level splitting the cell in four and
    /// following the sub-cell whose difference deviates most from its
    /// neighbours.
    fn refine<E>(&self, f: &dyn Fn(f64) -> Result<f64, E>, mut l: f64, mut r: f64, tol: f64) -> Result<Refined, E> {
        let value = |x: f64| -> Result<Option<f64>, E> {
            if !self.admits(x) {
                return Ok(None);
            }
            let v = f(x)?;
            Ok(v.is_finite().then_some(v))
        };
        let (Some(mut fl), Some(mut fr)) = (value(l)?, value(r)?) else {
            return Ok(Refined::Clean);
        };
        let mut history = vec![(fr - fl).abs()];
        let mut collapsed = false;
        for _ in 0..MAX_LEVELS {
            let h = (r - l) / 4.0;
            // points l - 4h ..= r + 4h; indices 4..=8 span the cell
            let xs: Vec<f64> = (-4..=8).map(|k| if k == 8 { r } else { l + h * k as f64 }).collect();
            if xs[4] != l || !(xs[4] < xs[5] && xs[5] < xs[6] && xs[6] < xs[7] && xs[7] < xs[8]) {
                collapsed = true;
                break;
            }
            let mut vs = Vec::with_capacity(xs.len());
            for &x in &xs {
                vs.push(if x == l { Some(fl) } else if x == r { Some(fr) } else { value(x)? });
            }
            let diffs: Vec<Option<f64>> = vs
                .windows(2)
                .map(|w| match (w[0], w[1]) {
                    (Some(p), Some(q)) => Some(q - p),
                    _ => None,
                })
                .collect();
            // sub-cells of [l, r] are diffs[4..8]
            let mut best = None;
            for i in 4..8 {
                let score = excess(&diffs, i).or(diffs[i].map(f64::abs));
                if let Some(s) = score {
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((i, s));
                    }
                }
            }
            let Some((i, _)) = best else { break };
            let (nl, nr) = (xs[i], xs[i + 1]);
            let (nfl, nfr) = (vs[i].unwrap(), vs[i + 1].unwrap());
            l = nl;
            r = nr;
            fl = nfl;
            fr = nfr;
            history.push((fr - fl).abs());
        }
        let j = (fr - fl).abs();
        if j <= tol {
            return Ok(Refined::Clean);
        }
        let persistent = match history.len().checked_sub(PERSISTENCE_LAG + 1) {
            Some(k) => (history[k] - j).abs() <= PERSISTENCE_REL * j,
            None => true,
        };
        Ok(if persistent {
            Refined::Jump { l, r, fl, fr }
        } else if collapsed {
            // still shrinking when doubles ran out: steep but continuous
            Refined::Clean
        } else {
            Refined::Unresolved { l, r, fl, fr }
        })
    }
}

fn max_step(grid: &[(f64, Option<f64>)]) -> f64 {
    grid.windows(2)
        .filter_map(|w| Some((w[1].1? - w[0].1?).abs()))
        .fold(0.0, f64::max)
}

fn argmax_abs(diffs: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, d) in diffs.iter().enumerate() {
        if let Some(d) = d {
            if best.is_none_or(|(_, b)| d.abs() > b) {
                best = Some((i, d.abs()));
            }
        }
    }
    best.map(|b| b.0)
}

/// How far `diffs[i]` departs from the average of its available neighbours.
fn excess(diffs: &[Option<f64>], i: usize) -> Option<f64> {
    let d = diffs[i]?;
    let left = i.checked_sub(1).and_then(|j| diffs[j]);
    let right = diffs.get(i + 1).copied().flatten();
    match (left, right) {
        (Some(a), Some(b)) => Some((d - 0.5 * (a + b)).abs()),
        (Some(a), None) | (None, Some(a)) => Some((d - a).abs()),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, tol: f64) -> ProbeConfig {
        ProbeConfig::with_n(n).tol(tol)
    }

    fn on(lo: f64, hi: f64) -> Interval {
        Interval::closed(XReal::new(lo), XReal::new(hi))
    }

    #[test]
    fn uniform_grid_example() {
        let g = sample_grid(&UnaryFn::neg_log(), 3, Scheme::Uniform).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[0], (XReal::ZERO, XReal::PosInf));
        assert_eq!(g[1].0, XReal::new(0.5));
        assert!((g[1].1.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(g[2], (XReal::ONE, XReal::ZERO));
    }

    #[test]
    fn geometric_cluster_near_asymptote() {
        let g = sample_grid(&UnaryFn::neg_log(), 5, Scheme::EndpointGeometric).unwrap();
        for k in [5, 10, 20, 40] {
            let x = XReal::new(2f64.powi(-k));
            assert!(g.iter().any(|p| p.0 == x), "missing 2^-{k}");
        }
        assert!(g.windows(2).all(|w| w[0].0 < w[1].0));
        // no cluster where the value is finite
        let g = sample_grid(&UnaryFn::exp_neg(), 5, Scheme::EndpointGeometric).unwrap();
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn unbounded_domain_uses_window_plus_tag() {
        let g = sample_grid(&UnaryFn::exp_neg(), 5, Scheme::Uniform).unwrap();
        let xs: Vec<XReal> = g.iter().map(|p| p.0).collect();
        assert_eq!(
            xs,
            vec![0.0, 16.0, 32.0, 48.0, 64.0].into_iter().map(XReal::new).chain([XReal::PosInf]).collect::<Vec<_>>()
        );
        assert_eq!(g.last().unwrap().1, XReal::ZERO);
    }

    #[test]
    fn monotonicity_examples() {
        let r = monotonicity_probe(&UnaryFn::neg_log(), &cfg(257, 1e-9), Direction::NonIncreasing, false);
        assert!(r.passed());

        let sq = UnaryFn::quadratic_h().restrict(on(0.0, 10.0)).unwrap();
        let r = monotonicity_probe(&sq, &cfg(257, 1e-9), Direction::NonIncreasing, false);
        assert!(r.failed());
        let w = &r.witnesses[0].points;
        assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);

        let one = UnaryFn::constant(1.0).restrict(on(0.0, 1.0)).unwrap();
        let r = monotonicity_probe(&one, &cfg(257, 1e-9), Direction::NonIncreasing, true);
        assert!(r.failed());
        assert!(r.caveat.is_some());
        assert!(monotonicity_probe(&one, &cfg(257, 1e-9), Direction::NonIncreasing, false).passed());
    }

    #[test]
    fn strict_decrease_survives_tiny_tail_values() {
        let r = monotonicity_probe(&UnaryFn::exp_neg(), &cfg(257, 1e-9), Direction::NonIncreasing, true);
        assert!(r.passed(), "{r:?}");
        let r = monotonicity_probe(&UnaryFn::cauchy(), &cfg(257, 1e-9), Direction::NonIncreasing, true);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn continuity_examples() {
        let f = UnaryFn::neg_log().restrict(on(0.01, 1.0)).unwrap();
        assert!(continuity_probe(&f, &cfg(256, 1e-3)).passed());

        let step = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "0"), (0.5, "1")]).unwrap();
        let r = continuity_probe(&step, &cfg(256, 1e-3));
        assert!(r.failed());
        let w = &r.witnesses[0].points;
        assert!((w[0].0.to_f64() - 0.5).abs() < 1e-9 && (w[1].0.to_f64() - 0.5).abs() < 1e-9);
        assert!(((w[1].1.to_f64() - w[0].1.to_f64()).abs() - 1.0).abs() < 1e-9);

        let r = continuity_probe(&UnaryFn::neg_log(), &cfg(256, 1e-3));
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn neg_log_passes_at_every_resolution() {
        for n in [64, 256, 1024] {
            let c = cfg(n, 1e-9);
            assert!(continuity_probe(&UnaryFn::neg_log(), &c).passed(), "n={n}");
            assert!(monotonicity_probe(&UnaryFn::neg_log(), &c, Direction::NonIncreasing, false).passed());
        }
    }

    #[test]
    fn smooth_catalog_passes_tight_tolerance() {
        for f in [UnaryFn::exp_neg(), UnaryFn::cauchy(), UnaryFn::reciprocal_residual(), UnaryFn::log_pos(), UnaryFn::exp_pos()] {
            let r = continuity_probe(&f, &cfg(257, 1e-9));
            assert!(r.passed(), "{f:?}: {r:?}");
        }
    }

    #[test]
    fn every_jump_of_ten_tol_is_found() {
        let tol = 1e-3;
        let bases = ["x", "x^2", "exp(-x)", "3*x - 1", "1/(1+x)"];
        for base in bases {
            for at in [0.1, 0.37, 0.5, 0.8123] {
                let after = format!("{base} + {}", 10.0 * tol);
                let f = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, base), (at, after.as_str())]).unwrap();
                let r = continuity_probe(&f, &cfg(256, tol));
                assert!(r.failed(), "jump in {base} at {at} missed");
                let x = r.witnesses[0].points[0].0.to_f64();
                assert!((x - at).abs() < 1e-9, "{base} at {at}: witness {x}");
            }
        }
    }

    #[test]
    fn finite_limit_at_asymptotic_end_is_caught() {
        // +inf at 0 but tends to 1 there: the reciprocal term underflows for x > 0
        let tagged = UnaryFn::piecewise_from(Interval::unit(), &[(0.0, "1 - x + 1/(x*1e300*1e300)")]).unwrap();
        assert_eq!(tagged.eval_f64(0.0).unwrap(), XReal::PosInf);
        let r = continuity_probe(&tagged, &cfg(257, 1e-9));
        assert!(r.failed(), "{r:?}");
    }

    #[test]
    fn limit_at_infinity_must_match_tag() {
        // tends to 0.5 but is 0 at +inf
        let f = UnaryFn::piecewise_from(
            Interval::closed(XReal::ZERO, XReal::PosInf),
            &[(0.0, "0.5 + 0.5*exp(-x) - 0.5/(1 + 1/(x*1e-300*1e-300))")],
        )
        .unwrap();
        assert_eq!(f.eval(XReal::PosInf).unwrap(), XReal::ZERO);
        let r = continuity_probe(&f, &cfg(257, 1e-9));
        assert!(r.failed());
        assert_eq!(r.witnesses[0].description, "limit_mismatch_at_infinity");
    }
}
