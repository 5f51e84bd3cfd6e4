//! Equilibrium problems `eq(g | A', B')` over finite candidate lists, and the
//! reductions that replace a convex tester set by its generators, extreme
//! points or exposed points.

use std::fmt;
use std::hash::Hasher;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{self, DEFAULT_EXPOSED_SAMPLES};
use crate::point::Point;
use crate::sampling;

type BiEval = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

/// A real-valued map `g(u, v)` together with the properties its constructor
/// asserts about `g(u, ·)`.
///
/// The evaluator must be free of side effects; scans call it from several
/// threads.
#[derive(Clone)]
pub struct Bifunction {
    eval: Arc<BiEval>,
    pub declared_quasiconvex_2nd: bool,
    pub declared_lsc_2nd: bool,
    pub label: String,
}

impl fmt::Debug for Bifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bifunction")
            .field("label", &self.label)
            .field("declared_quasiconvex_2nd", &self.declared_quasiconvex_2nd)
            .field("declared_lsc_2nd", &self.declared_lsc_2nd)
            .finish()
    }
}

impl Bifunction {
    /// A bifunction with no declared properties.
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Bifunction {
            eval: Arc::new(eval),
            declared_quasiconvex_2nd: false,
            declared_lsc_2nd: false,
            label: label.into(),
        }
    }

    pub fn quasiconvex_in_second(mut self, yes: bool) -> Self {
        self.declared_quasiconvex_2nd = yes;
        self
    }

    pub fn lsc_in_second(mut self, yes: bool) -> Self {
        self.declared_lsc_2nd = yes;
        self
    }

    /// `g(u, v) = f(u) − f(v)`, so that `eq(g | A, B)` collects the candidates
    /// minimizing `f` against `B`. `g(u, ·)` is quasiconvex iff `f` is
    /// quasiconcave and lower semicontinuous iff `f` is upper semicontinuous.
    pub fn from_potential(
        label: impl Into<String>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        f_quasiconcave: bool,
        f_usc: bool,
    ) -> Self {
        Bifunction::new(label, move |u, v| f(u) - f(v))
            .quasiconvex_in_second(f_quasiconcave)
            .lsc_in_second(f_usc)
    }

    /// `g(u, v) = ⟨v − u, x* − u⟩`, whose equilibria over a convex set are its
    /// metric projection of `x*`. Affine in `v`.
    pub fn best_approximation(xstar: Point) -> Self {
        let label = format!("best-approximation {xstar}");
        Bifunction::new(label, move |u, v| (v - u).dot(&(&xstar - u)))
            .quasiconvex_in_second(true)
            .lsc_in_second(true)
    }

    /// `g(u, v) = ⟨T(u), u − v⟩`, the variational-inequality bifunction of an
    /// operator `T`. Affine in `v`.
    pub fn variational(
        label: impl Into<String>,
        operator: impl Fn(&Point) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Bifunction::new(label, move |u, v| {
            operator(u)
                .iter()
                .zip(u.coords().iter().zip(v.coords()))
                .map(|(t, (a, b))| t * (a - b))
                .sum()
        })
        .quasiconvex_in_second(true)
        .lsc_in_second(true)
    }

    pub fn eval(&self, u: &Point, v: &Point) -> f64 {
        (self.eval)(u, v)
    }
}

/// Which tester set stood in for the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    None,
    Generators,
    Extreme,
    Exposed,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reduction::None => "none",
            Reduction::Generators => "generators",
            Reduction::Extreme => "extreme",
            Reduction::Exposed => "exposed",
        })
    }
}

/// Tester sets available to [`eq_reduced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    Generators,
    Extreme,
    Exposed,
}

impl From<ReductionMode> for Reduction {
    fn from(m: ReductionMode) -> Self {
        match m {
            ReductionMode::Generators => Reduction::Generators,
            ReductionMode::Extreme => Reduction::Extreme,
            ReductionMode::Exposed => Reduction::Exposed,
        }
    }
}

/// The constraint side of an equilibrium problem.
#[derive(Debug, Clone)]
pub enum ConstraintSet {
    Points(Vec<Point>),
    Body(ConvexBody),
}

/// `eq(g | A', B')` with a finite candidate list `A'`.
#[derive(Debug, Clone)]
pub struct EqProblem {
    pub g: Bifunction,
    pub candidates: Vec<Point>,
    pub constraint_set: ConstraintSet,
    pub tol: f64,
}

impl EqProblem {
    pub fn new(
        g: Bifunction,
        candidates: Vec<Point>,
        constraint_set: ConstraintSet,
        tol: f64,
    ) -> Result<Self> {
        let first = candidates
            .first()
            .ok_or_else(|| Error::InvalidInput("candidate list is empty".into()))?;
        let dim = first.dim();
        for c in &candidates {
            c.check_dim(dim)?;
        }
        match &constraint_set {
            ConstraintSet::Points(ps) => {
                for p in ps {
                    p.check_dim(dim)?;
                }
            }
            ConstraintSet::Body(b) => b.check_point(first)?,
        }
        Ok(EqProblem {
            g,
            candidates,
            constraint_set,
            tol,
        })
    }

    /// Solves against the literal tester list, or against the body through
    /// the given reduction.
    pub fn solve(&self, mode: ReductionMode, opts: &ReduceOptions) -> Result<EqReport> {
        match &self.constraint_set {
            ConstraintSet::Points(testers) => eq_set(&self.g, &self.candidates, testers, self.tol),
            ConstraintSet::Body(body) => {
                let opts = ReduceOptions {
                    tol: self.tol,
                    ..*opts
                };
                eq_reduced(&self.g, &self.candidates, body, mode, &opts)
            }
        }
    }
}

/// Solution set of an equilibrium problem plus the data needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqReport {
    pub solutions: Vec<Point>,
    pub reduction_used: Reduction,
    pub checked_set_size: usize,
    /// Largest `g(x⁰, x)` over returned solutions and checked testers; zero
    /// when either side is empty.
    pub max_violation: f64,
    pub candidate_count: usize,
    /// Fingerprint of the candidate list; two reports are comparable only if
    /// these match.
    pub candidate_digest: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub(crate) fn digest(points: &[Point]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    h.write_usize(points.len());
    for p in points {
        h.write_usize(p.dim());
        for c in p.coords() {
            h.write_u64(c.to_bits());
        }
    }
    h.finish()
}

/// `{x⁰ ∈ candidates | g(x⁰, x) ≤ tol for all x ∈ testers}`. An empty tester
/// list admits every candidate.
pub fn eq_set(
    g: &Bifunction,
    candidates: &[Point],
    testers: &[Point],
    tol: f64,
) -> Result<EqReport> {
    let outcomes: Vec<Result<Option<f64>>> = candidates
        .par_iter()
        .map(|u| {
            let mut worst = f64::NEG_INFINITY;
            for v in testers {
                let val = g.eval(u, v);
                if !val.is_finite() {
                    return Err(Error::NonFiniteValue {
                        label: g.label.clone(),
                        u: u.clone(),
                        v: Some(v.clone()),
                        value: val,
                    });
                }
                if val > tol {
                    return Ok(None);
                }
                worst = worst.max(val);
            }
            Ok(Some(worst))
        })
        .collect();

    let mut solutions = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for (u, out) in candidates.iter().zip(outcomes) {
        if let Some(worst) = out? {
            solutions.push(u.clone());
            max_violation = max_violation.max(worst);
        }
    }
    Ok(EqReport {
        solutions,
        reduction_used: Reduction::None,
        checked_set_size: testers.len(),
        max_violation: if max_violation.is_finite() {
            max_violation
        } else {
            0.0
        },
        candidate_count: candidates.len(),
        candidate_digest: digest(candidates),
        warnings: Vec::new(),
    })
}

/// Knobs for [`eq_reduced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceOptions {
    pub tol: f64,
    pub exposed_samples: usize,
    /// Run the reduction even when `g` does not declare the properties that
    /// make it sound. The report carries a warning.
    pub allow_unsound: bool,
    pub geometry: Tolerances,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        let geometry = Tolerances::default();
        ReduceOptions {
            tol: geometry.eq,
            exposed_samples: DEFAULT_EXPOSED_SAMPLES,
            allow_unsound: false,
            geometry,
        }
    }
}

fn missing_properties(g: &Bifunction, mode: ReductionMode) -> Vec<&'static str> {
    let mut missing = Vec::new();
    if !g.declared_quasiconvex_2nd {
        missing.push("g(u,·) quasiconvex");
    }
    if mode == ReductionMode::Exposed && !g.declared_lsc_2nd {
        missing.push("g(u,·) lower semicontinuous");
    }
    missing
}

/// The tester set a reduction checks for a given body.
pub fn reduced_testers(
    body: &ConvexBody,
    mode: ReductionMode,
    opts: &ReduceOptions,
) -> Result<Vec<Point>> {
    match (mode, body) {
        (ReductionMode::Generators, ConvexBody::Polytope { generators }) => Ok(generators.clone()),
        (ReductionMode::Generators, ConvexBody::Ball { .. }) => Err(Error::InvalidInput(
            "a ball has no finite generator set; use the extreme or exposed reduction".into(),
        )),
        (ReductionMode::Extreme, ConvexBody::Polytope { .. }) => {
            geometry::extreme_points(body, &opts.geometry)
        }
        // every boundary point of a ball is extreme and exposed
        (ReductionMode::Extreme | ReductionMode::Exposed, _) => {
            geometry::exposed_points_sample(body, opts.exposed_samples, &opts.geometry)
        }
    }
}

/// Solves `eq(g | candidates, S)` by checking only a reduced tester set:
/// the generators of `S` (sound for `g(u, ·)` quasiconvex), its extreme points
/// (same hypothesis, `S` compact) or a sample of its exposed points (also
/// requires `g(u, ·)` lower semicontinuous).
pub fn eq_reduced(
    g: &Bifunction,
    candidates: &[Point],
    body: &ConvexBody,
    mode: ReductionMode,
    opts: &ReduceOptions,
) -> Result<EqReport> {
    if let Some(c) = candidates.first() {
        body.check_point(c)?;
    }
    let missing = missing_properties(g, mode);
    let mut warnings = Vec::new();
    if !missing.is_empty() {
        let msg = format!("{mode:?} reduction needs {}", missing.join(" and ")).to_lowercase();
        if !opts.allow_unsound {
            return Err(Error::UnsoundReduction(msg));
        }
        warnings.push(format!("forced unsound reduction: {msg}"));
    }
    let testers = reduced_testers(body, mode, opts)?;
    let mut report = eq_set(g, candidates, &testers, opts.tol)?;
    report.reduction_used = mode.into();
    report.warnings = warnings;
    Ok(report)
}

/// Result of [`argmin_quasiconcave`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgminReport {
    pub report: EqReport,
    pub min_over_extreme: f64,
    pub min_over_candidates: f64,
    /// `min f(S) = min f(ext S)` checked against the candidate minimum.
    pub minima_agree: bool,
}

fn extreme_or_sphere(body: &ConvexBody, tols: &Tolerances) -> Result<Vec<Point>> {
    match body {
        ConvexBody::Polytope { .. } => geometry::extreme_points(body, tols),
        ConvexBody::Ball { .. } => {
            geometry::exposed_points_sample(body, DEFAULT_EXPOSED_SAMPLES, tols)
        }
    }
}

fn finite_value(label: &str, p: &Point, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue {
            label: label.to_string(),
            u: p.clone(),
            v: None,
            value: v,
        })
    }
}

/// Candidates minimizing a quasiconcave `f` over the body, found by
/// comparing against the extreme points only.
pub fn argmin_quasiconcave(
    f: &(dyn Fn(&Point) -> f64 + Sync),
    body: &ConvexBody,
    candidates: &[Point],
    tol: f64,
    tols: &Tolerances,
) -> Result<ArgminReport> {
    if let Some(c) = candidates.first() {
        body.check_point(c)?;
    }
    let ext = extreme_or_sphere(body, tols)?;
    let min_over_extreme = ext
        .iter()
        .map(|v| finite_value("objective", v, f(v)))
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))?;
    let values: Vec<f64> = candidates
        .par_iter()
        .map(|c| finite_value("objective", c, f(c)))
        .collect::<Result<_>>()?;
    let min_over_candidates = values.iter().copied().fold(f64::INFINITY, f64::min);

    let mut solutions = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for (c, v) in candidates.iter().zip(&values) {
        let excess = v - min_over_extreme;
        if excess <= tol {
            solutions.push(c.clone());
            max_violation = max_violation.max(excess);
        }
    }
    Ok(ArgminReport {
        report: EqReport {
            solutions,
            reduction_used: Reduction::Extreme,
            checked_set_size: ext.len(),
            max_violation: if max_violation.is_finite() {
                max_violation
            } else {
                0.0
            },
            candidate_count: candidates.len(),
            candidate_digest: digest(candidates),
            warnings: Vec::new(),
        },
        min_over_extreme,
        min_over_candidates,
        minima_agree: (min_over_extreme - min_over_candidates).abs() <= tol,
    })
}

/// Candidates solving the variational inequality `⟨T(x⁰), x − x⁰⟩ ≥ 0` for all
/// `x ∈ S`, checked on the extreme points of a polytope (the inequality is
/// affine in `x`) or through the support function of a ball.
pub fn solve_vi(
    operator: &(dyn Fn(&Point) -> Vec<f64> + Sync),
    body: &ConvexBody,
    candidates: &[Point],
    tol: f64,
    tols: &Tolerances,
) -> Result<EqReport> {
    let dim = body.dim();
    for c in candidates {
        c.check_dim(dim)?;
    }
    let ext = match body {
        ConvexBody::Polytope { .. } => Some(geometry::extreme_points(body, tols)?),
        ConvexBody::Ball { .. } => None,
    };
    let worst: Vec<f64> = candidates
        .par_iter()
        .map(|x0| {
            let t = operator(x0);
            if t.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.len(),
                });
            }
            let t = Point::new(t).map_err(|_| Error::NonFiniteValue {
                label: "operator".into(),
                u: x0.clone(),
                v: None,
                value: f64::NAN,
            })?;
            // min over S of ⟨T(x⁰), x − x⁰⟩
            let lowest = match &ext {
                Some(vs) => vs
                    .iter()
                    .map(|v| t.dot(&(v - x0)))
                    .fold(f64::INFINITY, f64::min),
                None => -body.support(&t.scale(-1.0)) - t.dot(x0),
            };
            Ok(-lowest)
        })
        .collect::<Result<_>>()?;

    let mut solutions = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for (c, w) in candidates.iter().zip(worst) {
        if w <= tol {
            solutions.push(c.clone());
            max_violation = max_violation.max(w);
        }
    }
    Ok(EqReport {
        solutions,
        reduction_used: Reduction::Extreme,
        checked_set_size: ext.as_ref().map_or(0, Vec::len),
        max_violation: if max_violation.is_finite() {
            max_violation
        } else {
            0.0
        },
        candidate_count: candidates.len(),
        candidate_digest: digest(candidates),
        warnings: Vec::new(),
    })
}

/// A sampled violation of quasiconvexity:
/// `h((1−t)a + t b) > max{h(a), h(b)}` by `excess`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconvexWitness {
    pub a: Point,
    pub b: Point,
    pub t: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconvexCheck {
    pub holds: bool,
    /// The largest violation found, if any.
    pub witness: Option<QuasiconvexWitness>,
    pub segments_checked: usize,
}

/// Falsification test for quasiconvexity of `h` on the body. Segments are
/// taken first between generator pairs, then between random points of the
/// body; `t` runs over a uniform grid of `[0, 1]`. A passing result is only a
/// sampled certificate.
pub fn check_quasiconvex(
    h: &(dyn Fn(&Point) -> f64 + Sync),
    body: &ConvexBody,
    segment_samples: usize,
    t_samples: usize,
    seed: u64,
    tol: f64,
) -> QuasiconvexCheck {
    let segment_samples = segment_samples.max(1);
    let t_samples = t_samples.max(1);
    let ts: Vec<f64> = if t_samples == 1 {
        vec![0.5]
    } else {
        (0..t_samples)
            .map(|k| k as f64 / (t_samples - 1) as f64)
            .collect()
    };

    let mut segments: Vec<(Point, Point)> = Vec::with_capacity(segment_samples);
    if let Some(gens) = body.generators() {
        'outer: for (i, a) in gens.iter().enumerate() {
            for b in gens.iter().skip(i + 1) {
                if segments.len() >= segment_samples {
                    break 'outer;
                }
                segments.push((a.clone(), b.clone()));
            }
        }
    }
    let mut rng = sampling::rng(seed);
    while segments.len() < segment_samples {
        let a = sampling::point_in_body(&mut rng, body);
        let b = sampling::point_in_body(&mut rng, body);
        segments.push((a, b));
        // keep the stream position independent of rayon scheduling
        let _ = rng.gen::<u8>();
    }

    let worst = segments
        .par_iter()
        .filter_map(|(a, b)| {
            let top = h(a).max(h(b));
            ts.iter()
                .map(|&t| {
                    let p = a.scale(1.0 - t).add_scaled(t, b);
                    (t, h(&p) - top)
                })
                .filter(|(_, e)| *e > tol || e.is_nan())
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(t, excess)| QuasiconvexWitness {
                    a: a.clone(),
                    b: b.clone(),
                    t,
                    excess,
                })
        })
        .max_by(|x, y| x.excess.total_cmp(&y.excess));

    QuasiconvexCheck {
        holds: worst.is_none(),
        witness: worst,
        segments_checked: segments.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    fn interval() -> ConvexBody {
        ConvexBody::interval(-1.0, 1.0).unwrap()
    }

    /// `{-1, -1 + h, …, 1}` built from integer steps.
    fn grid_1d(steps: i32) -> Vec<Point> {
        (0..=steps)
            .map(|k| pt![-1.0 + 2.0 * k as f64 / steps as f64])
            .collect()
    }

    fn square_potential(label: &str, f: fn(f64) -> f64, qc: bool) -> Bifunction {
        Bifunction::from_potential(label, move |p: &Point| f(p[0]), qc, true)
    }

    #[test]
    fn empty_testers_admit_everything() {
        let g = Bifunction::new("anything", |u, v| u[0] * 1e6 - v[0]);
        let cands = grid_1d(10);
        let r = eq_set(&g, &cands, &[], 1e-9).unwrap();
        assert_eq!(r.solutions, cands);
        assert_eq!(r.checked_set_size, 0);
    }

    #[test]
    fn squared_potential_against_endpoints_and_grid() {
        let g = square_potential("x^2", |x| x * x, false);
        let cands = grid_1d(200);
        let ends = vec![pt![-1], pt![1]];
        assert_eq!(eq_set(&g, &cands, &ends, 1e-9).unwrap().solutions, cands);
        let r = eq_set(&g, &cands, &cands, 1e-9).unwrap();
        assert_eq!(r.solutions, vec![pt![0]]);
        assert_eq!(r.max_violation, 0.0);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let g = Bifunction::new("log", |u, v| (u[0] - v[0]).ln());
        let err = eq_set(&g, &[pt![0]], &[pt![1]], 1e-9).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { ref label, .. } if label == "log"));
    }

    #[test]
    fn extreme_reduction_examples() {
        let cands = grid_1d(200);
        let opts = ReduceOptions::default();
        let g = square_potential("-x^2", |x| -x * x, true);
        let r = eq_reduced(&g, &cands, &interval(), ReductionMode::Extreme, &opts).unwrap();
        assert_eq!(r.solutions, vec![pt![-1], pt![1]]);
        assert_eq!(r.reduction_used, Reduction::Extreme);

        let g = square_potential("max(0,x)", |x| x.max(0.0), true);
        let r = eq_reduced(&g, &cands, &interval(), ReductionMode::Extreme, &opts).unwrap();
        let expected: Vec<Point> = cands.iter().filter(|p| p[0] <= 0.0).cloned().collect();
        assert_eq!(r.solutions, expected);

        let sq = ConvexBody::unit_square();
        let g = Bifunction::best_approximation(pt![2, 2]);
        let cands = vec![pt![1, 1], pt![0, 1], pt![1, 0], pt![0.5, 0.5], pt![-1, -1]];
        let r = eq_reduced(&g, &cands, &sq, ReductionMode::Extreme, &opts).unwrap();
        assert_eq!(r.solutions, vec![pt![1, 1]]);
    }

    #[test]
    fn reductions_are_gated_on_declared_properties() {
        let g = square_potential("x^2", |x| x * x, false);
        let cands = grid_1d(20);
        let err = eq_reduced(
            &g,
            &cands,
            &interval(),
            ReductionMode::Generators,
            &ReduceOptions::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("reduction unsound"));

        let forced = ReduceOptions {
            allow_unsound: true,
            ..Default::default()
        };
        let r = eq_reduced(&g, &cands, &interval(), ReductionMode::Generators, &forced).unwrap();
        assert_eq!(r.solutions, cands);
        assert_eq!(r.warnings.len(), 1);

        let no_lsc = Bifunction::new("qc only", |_, _| 0.0).quasiconvex_in_second(true);
        assert!(matches!(
            eq_reduced(
                &no_lsc,
                &cands,
                &interval(),
                ReductionMode::Exposed,
                &ReduceOptions::default()
            ),
            Err(Error::UnsoundReduction(_))
        ));
    }

    #[test]
    fn generator_mode_rejects_balls() {
        let g = Bifunction::new("zero", |_, _| 0.0).quasiconvex_in_second(true);
        let ball = ConvexBody::ball(pt![0, 0], 1.0).unwrap();
        assert!(matches!(
            eq_reduced(
                &g,
                &[pt![0, 0]],
                &ball,
                ReductionMode::Generators,
                &ReduceOptions::default()
            ),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn argmin_examples() {
        let t = Tolerances::default();
        let cands = grid_1d(200);
        let r =
            argmin_quasiconcave(&|p: &Point| p[0].max(0.0), &interval(), &cands, 1e-9, &t).unwrap();
        assert!(r.report.solutions.iter().all(|p| p[0] <= 0.0));
        assert_eq!(r.report.solutions.len(), 101);
        assert_eq!(r.min_over_extreme, 0.0);
        assert!(r.minima_agree);

        let r = argmin_quasiconcave(&|_: &Point| 3.0, &interval(), &cands, 1e-9, &t).unwrap();
        assert_eq!(r.report.solutions, cands);

        let xs = pt![0.5, 0.5];
        let sq = ConvexBody::unit_square();
        let cands: Vec<Point> = (0..=8)
            .flat_map(|i| (0..=8).map(move |j| pt![-1.0 + i as f64 / 4.0, -1.0 + j as f64 / 4.0]))
            .collect();
        let r = argmin_quasiconcave(&|p: &Point| -p.distance(&xs), &sq, &cands, 1e-9, &t).unwrap();
        assert_eq!(r.report.solutions, vec![pt![-1, -1]]);
        assert!((r.min_over_extreme + pt![-1.5, -1.5].norm()).abs() < 1e-12);
    }

    #[test]
    fn vi_examples() {
        let t = Tolerances::default();
        let sq = ConvexBody::unit_square();
        let cands = vec![
            pt![1, 1],
            pt![0, 1],
            pt![1, 0],
            pt![0, 0],
            pt![-1, -1],
            pt![-1, 1],
        ];
        let xs = pt![2, 2];
        let residual = move |p: &Point| (p - &xs).into_vec();
        assert_eq!(
            solve_vi(&residual, &sq, &cands, 1e-9, &t)
                .unwrap()
                .solutions,
            vec![pt![1, 1]]
        );

        let zero = |_: &Point| vec![0.0, 0.0];
        assert_eq!(
            solve_vi(&zero, &sq, &cands, 1e-9, &t).unwrap().solutions,
            cands
        );

        // constant operator c = (1, 0): minimizers of x ↦ x₁ form the left edge
        let constant = |_: &Point| vec![1.0, 0.0];
        let r = solve_vi(&constant, &sq, &cands, 1e-9, &t).unwrap();
        assert_eq!(r.solutions, vec![pt![-1, -1], pt![-1, 1]]);

        let disk = ConvexBody::ball(pt![0, 0], 1.0).unwrap();
        let xs = pt![3, 0];
        let residual = move |p: &Point| (p - &xs).into_vec();
        let r = solve_vi(
            &residual,
            &disk,
            &[pt![1, 0], pt![0, 1], pt![0.9, 0]],
            1e-9,
            &t,
        )
        .unwrap();
        assert_eq!(r.solutions, vec![pt![1, 0]]);
    }

    #[test]
    fn quasiconvexity_sampler() {
        let c = pt![0.3, -1.2];
        let affine = move |p: &Point| p.dot(&c) + 2.0;
        assert!(check_quasiconvex(&affine, &ConvexBody::unit_square(), 200, 11, 42, 1e-9).holds);

        let neg_sq = |p: &Point| -p[0] * p[0];
        let r = check_quasiconvex(&neg_sq, &interval(), 50, 11, 42, 1e-9);
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!((w.a.clone(), w.b.clone(), w.t), (pt![-1], pt![1], 0.5));
        assert!((w.excess - 1.0).abs() < 1e-12);

        let sq = |p: &Point| p[0] * p[0];
        assert!(check_quasiconvex(&sq, &interval(), 50, 11, 42, 1e-9).holds);

        let disk = ConvexBody::ball(pt![0, 0], 1.0).unwrap();
        let bump = |p: &Point| -p.norm_squared();
        assert!(!check_quasiconvex(&bump, &disk, 100, 11, 7, 1e-9).holds);
    }

    #[test]
    fn problem_wrapper() {
        let g = square_potential("x^2", |x| x * x, false);
        let p = EqProblem::new(g, grid_1d(10), ConstraintSet::Points(grid_1d(10)), 1e-9).unwrap();
        let r = p
            .solve(ReductionMode::Extreme, &ReduceOptions::default())
            .unwrap();
        assert_eq!(r.solutions, vec![pt![0]]);
        assert!(EqProblem::new(
            Bifunction::new("z", |_, _| 0.0),
            vec![],
            ConstraintSet::Points(vec![]),
            1e-9
        )
        .is_err());
    }
}
