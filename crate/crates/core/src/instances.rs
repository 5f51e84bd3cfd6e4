//! Worked examples and counterexamples packaged as data, with one runner that
//! replays any of them against the solvers.

use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Tolerances};
use crate::error::{Error, Result};
use crate::figure::PartitionFigure;
use crate::functions::{BifunctionKind, BifunctionSpec, OperatorSpec, ScalarFn};
use crate::geometry;
use crate::oracle;
use crate::point::Point;
use crate::problem::{
    self, CandidateSpec, ConeSpec, Expected, InstanceFile, Outcome, Problem, RunOptions,
    SolutionSet, SolveMode, FORMAT_VERSION,
};
use crate::pt;

pub mod tags {
    pub const PARTITION: &str = "normal-cone-partition";
    pub const PROJECTION: &str = "projection-characterization";
    pub const GENERATORS: &str = "generator-reduction";
    pub const EXTREME: &str = "extreme-point-reduction";
    pub const EXPOSED: &str = "exposed-point-reduction";
    pub const QUASICONCAVE_MIN: &str = "quasiconcave-minimization";
    pub const VI: &str = "variational-inequality";
    pub const FARTHEST: &str = "farthest-point";
    pub const COUNTEREXAMPLE: &str = "counterexample";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogInstance {
    pub id: String,
    pub body: ConvexBody,
    pub problem: Problem,
    pub expected: Expected,
    pub theorem_tags: Vec<String>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl CatalogInstance {
    fn new(
        id: &str,
        body: ConvexBody,
        problem: Problem,
        expected: Expected,
        tags: &[&str],
    ) -> Self {
        CatalogInstance {
            id: id.into(),
            body,
            problem,
            expected,
            theorem_tags: tags.iter().map(|t| t.to_string()).collect(),
            tolerances: Tolerances::default(),
            seed: 42,
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            version: FORMAT_VERSION,
            id: Some(self.id.clone()),
            dimension: self.body.dim(),
            body: self.body.clone(),
            problem: self.problem.clone(),
            tolerances: self.tolerances,
            seed: Some(self.seed),
            expected: Some(self.expected.clone()),
            tags: self.theorem_tags.clone(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        Ok(CatalogInstance {
            id: file
                .id
                .clone()
                .ok_or_else(|| Error::InvalidInput("catalog instances need an `id`".into()))?,
            body: file.body.clone(),
            problem: file.problem.clone(),
            expected: file.expected.clone().unwrap_or_default(),
            theorem_tags: file.tags.clone(),
            tolerances: file.tolerances,
            seed: file.seed.unwrap_or(geometry::DEFAULT_SEED),
        })
    }
}

fn points(ps: Vec<Point>) -> SolutionSet {
    SolutionSet::Points { points: ps }
}

fn potential(f: ScalarFn) -> BifunctionSpec {
    BifunctionKind::Potential { f, shift: 0.0 }.into()
}

fn eq_problem(
    bifunction: BifunctionSpec,
    candidates: CandidateSpec,
    mode: SolveMode,
    resolution: f64,
) -> Problem {
    Problem::Equilibrium {
        bifunction,
        candidates,
        mode: Some(mode),
        testers: None,
        resolution: Some(resolution),
        exposed_samples: None,
        force: false,
        open_body: false,
    }
}

fn cone(base: Point, rays: Vec<Point>) -> ConeSpec {
    ConeSpec { base, rays }
}

fn interval() -> ConvexBody {
    ConvexBody::interval(-1.0, 1.0).expect("valid interval")
}

/// The shipped instances.
#[allow(clippy::vec_init_then_push)]
pub fn catalog() -> Vec<CatalogInstance> {
    use tags::*;
    let square = ConvexBody::unit_square();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();

    out.push(CatalogInstance::new(
        "square-partition",
        square.clone(),
        Problem::PartitionFigure {
            samples: 2000,
            bound: 5.0,
        },
        Expected {
            cones: vec![
                cone(pt![1, 1], vec![pt![1, 0], pt![0, 1]]),
                cone(pt![-1, 1], vec![pt![-1, 0], pt![0, 1]]),
                cone(pt![-1, -1], vec![pt![-1, 0], pt![0, -1]]),
                cone(pt![1, -1], vec![pt![1, 0], pt![0, -1]]),
                cone(pt![0, 1], vec![pt![0, 1]]),
                cone(pt![-1, 0], vec![pt![-1, 0]]),
                cone(pt![0, -1], vec![pt![0, -1]]),
                cone(pt![1, 0], vec![pt![1, 0]]),
                cone(pt![0.5, 1], vec![pt![0, 1]]),
                cone(pt![-1, -0.3], vec![pt![-1, 0]]),
            ],
            ..Default::default()
        },
        &[PARTITION],
    ));
    out.push(CatalogInstance::new(
        "square-projection",
        square.clone(),
        Problem::Project { xstar: pt![2, 2] },
        Expected {
            solutions: Some(points(vec![pt![1, 1]])),
            ..Default::default()
        },
        &[PROJECTION, PARTITION],
    ));
    out.push(CatalogInstance::new(
        "square-projection-edge",
        square.clone(),
        Problem::Project { xstar: pt![0, 5] },
        Expected {
            solutions: Some(points(vec![pt![0, 1]])),
            ..Default::default()
        },
        &[PROJECTION, PARTITION],
    ));
    out.push(CatalogInstance::new(
        "interval-x2",
        interval(),
        eq_problem(
            potential(ScalarFn::SquaredNorm { center: vec![0.0] }),
            CandidateSpec::Grid { resolution: 0.01 },
            SolveMode::Generators,
            0.01,
        ),
        Expected {
            brute: Some(points(vec![pt![0]])),
            forced: Some(SolutionSet::AllCandidates),
            agree: Some(false),
            ..Default::default()
        },
        &[GENERATORS, COUNTEREXAMPLE],
    ));
    out.push(CatalogInstance::new(
        "interval-max0x",
        interval(),
        eq_problem(
            potential(ScalarFn::PositivePart { c: vec![1.0] }),
            CandidateSpec::Grid { resolution: 0.01 },
            SolveMode::Extreme,
            0.01,
        ),
        Expected {
            solutions: Some(SolutionSet::Interval { lo: -1.0, hi: 0.0 }),
            brute: Some(SolutionSet::Interval { lo: -1.0, hi: 0.0 }),
            agree: Some(true),
            ..Default::default()
        },
        &[EXTREME, QUASICONCAVE_MIN],
    ));
    out.push(CatalogInstance::new(
        "interval-max0x-argmin",
        interval(),
        Problem::Argmin {
            objective: ScalarFn::PositivePart { c: vec![1.0] },
            candidates: CandidateSpec::Grid { resolution: 0.01 },
            resolution: Some(0.01),
        },
        Expected {
            solutions: Some(SolutionSet::Interval { lo: -1.0, hi: 0.0 }),
            min_value: Some(0.0),
            ..Default::default()
        },
        &[QUASICONCAVE_MIN],
    ));
    out.push(CatalogInstance::new(
        "interval-neg-x2",
        interval(),
        eq_problem(
            potential(ScalarFn::NegSquaredNorm { center: vec![0.0] }),
            CandidateSpec::Grid { resolution: 0.01 },
            SolveMode::Extreme,
            0.01,
        ),
        Expected {
            solutions: Some(points(vec![pt![-1], pt![1]])),
            brute: Some(points(vec![pt![-1], pt![1]])),
            agree: Some(true),
            ..Default::default()
        },
        &[EXTREME, QUASICONCAVE_MIN],
    ));
    out.push(CatalogInstance::new(
        "open-interval-neg-x2",
        interval(),
        Problem::Equilibrium {
            bifunction: potential(ScalarFn::NegSquaredNorm { center: vec![0.0] }),
            candidates: CandidateSpec::InteriorGrid { resolution: 0.02 },
            mode: Some(SolveMode::Extreme),
            testers: Some(CandidateSpec::InteriorGrid { resolution: 0.01 }),
            resolution: None,
            exposed_samples: None,
            force: false,
            open_body: true,
        },
        Expected {
            solutions: Some(SolutionSet::AllCandidates),
            brute: Some(SolutionSet::Empty),
            agree: Some(false),
            ..Default::default()
        },
        &[EXTREME, COUNTEREXAMPLE],
    ));
    out.push(CatalogInstance::new(
        "square-farthest",
        square.clone(),
        eq_problem(
            potential(ScalarFn::NegDistance {
                xstar: vec![0.5, 0.5],
            }),
            CandidateSpec::Grid { resolution: 0.25 },
            SolveMode::Extreme,
            0.05,
        ),
        Expected {
            solutions: Some(points(vec![pt![-1, -1]])),
            brute: Some(points(vec![pt![-1, -1]])),
            agree: Some(true),
            ..Default::default()
        },
        &[FARTHEST, EXTREME, QUASICONCAVE_MIN],
    ));
    out.push(CatalogInstance::new(
        "square-farthest-points",
        square.clone(),
        Problem::Farthest {
            xstar: pt![0.5, 0.5],
        },
        Expected {
            solutions: Some(points(vec![pt![-1, -1]])),
            ..Default::default()
        },
        &[FARTHEST],
    ));
    out.push(CatalogInstance::new(
        "square-farthest-center",
        square.clone(),
        Problem::Farthest { xstar: pt![0, 0] },
        Expected {
            solutions: Some(points(vec![pt![1, 1], pt![-1, 1], pt![-1, -1], pt![1, -1]])),
            ..Default::default()
        },
        &[FARTHEST],
    ));
    out.push(CatalogInstance::new(
        "disk-exposed-reduction",
        ConvexBody::ball(pt![0, 0], 1.0).expect("valid ball"),
        Problem::Equilibrium {
            bifunction: potential(ScalarFn::NegDistance {
                xstar: vec![0.5, 0.0],
            }),
            candidates: CandidateSpec::Grid { resolution: 0.02 },
            mode: Some(SolveMode::Exposed),
            testers: None,
            resolution: Some(0.02),
            exposed_samples: Some(1024),
            force: false,
            open_body: false,
        },
        Expected {
            solutions: Some(points(vec![pt![-1, 0]])),
            brute: Some(points(vec![pt![-1, 0]])),
            agree: Some(true),
            ..Default::default()
        },
        &[EXPOSED, FARTHEST],
    ));
    out.push(CatalogInstance::new(
        "vi-from-projection",
        square.clone(),
        Problem::Vi {
            operator: OperatorSpec::Residual {
                xstar: vec![2.0, 2.0],
            },
            candidates: CandidateSpec::Grid { resolution: 0.5 },
            resolution: Some(0.05),
        },
        Expected {
            solutions: Some(points(vec![pt![1, 1]])),
            agree: Some(true),
            ..Default::default()
        },
        &[VI, PROJECTION],
    ));
    out.push(CatalogInstance::new(
        "bestapprox-equilibrium",
        square.clone(),
        eq_problem(
            BifunctionKind::BestApproximation {
                xstar: vec![2.0, 2.0],
            }
            .into(),
            CandidateSpec::Grid { resolution: 0.5 },
            SolveMode::Extreme,
            0.05,
        ),
        Expected {
            solutions: Some(points(vec![pt![1, 1]])),
            brute: Some(points(vec![pt![1, 1]])),
            agree: Some(true),
            ..Default::default()
        },
        &[VI, PROJECTION, EXTREME],
    ));
    out.push(CatalogInstance::new(
        "triangle-partition",
        ConvexBody::polytope(vec![pt![0, 0], pt![1, 0], pt![0, 1]]).expect("valid triangle"),
        Problem::PartitionFigure {
            samples: 1000,
            bound: 3.0,
        },
        Expected {
            cones: vec![
                cone(pt![0, 0], vec![pt![0, -1], pt![-1, 0]]),
                cone(pt![1, 0], vec![pt![0, -1], pt![h, h]]),
                cone(pt![0, 1], vec![pt![-1, 0], pt![h, h]]),
                cone(pt![0.5, 0], vec![pt![0, -1]]),
                cone(pt![0, 0.5], vec![pt![-1, 0]]),
                cone(pt![0.5, 0.5], vec![pt![h, h]]),
            ],
            ..Default::default()
        },
        &[PARTITION],
    ));
    out.push(CatalogInstance::new(
        "segment-partition",
        ConvexBody::polytope(vec![pt![0, 0], pt![1, 0]]).expect("valid segment"),
        Problem::PartitionFigure {
            samples: 1000,
            bound: 3.0,
        },
        Expected {
            cones: vec![
                cone(pt![0, 0], vec![pt![0, 1], pt![-1, 0], pt![0, -1]]),
                cone(pt![1, 0], vec![pt![0, 1], pt![1, 0], pt![0, -1]]),
                cone(pt![0.5, 0], vec![pt![0, 1], pt![0, -1]]),
            ],
            ..Default::default()
        },
        &[PARTITION],
    ));
    out
}

pub fn find(id: &str) -> Option<CatalogInstance> {
    catalog().into_iter().find(|i| i.id == id)
}

/// Outcome of replaying one instance: a named list of checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub id: String,
    pub checks: Vec<(String, bool)>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(_, ok)| *ok)
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }
}

/// Membership of `d` in the conic hull of planar rays: some ray or pair of
/// rays combines to `d` with nonnegative weights.
pub fn in_planar_cone(d: &Point, rays: &[Point], eps: f64) -> bool {
    if d.norm() <= eps {
        return true;
    }
    let single = |r: &Point| {
        let cross = d[0] * r[1] - d[1] * r[0];
        cross.abs() <= eps * d.norm() * r.norm() && d.dot(r) > 0.0
    };
    if rays.iter().any(single) {
        return true;
    }
    for (i, a) in rays.iter().enumerate() {
        for b in rays.iter().skip(i + 1) {
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() <= eps {
                continue;
            }
            let s = (d[0] * b[1] - d[1] * b[0]) / det;
            let t = (a[0] * d[1] - a[1] * d[0]) / det;
            if s >= -eps && t >= -eps {
                return true;
            }
        }
    }
    false
}

/// Direction probes used against expected planar cones: 16 directions on the
/// circle plus each ray and its reverse.
pub fn planar_probes(rays: &[Point]) -> Vec<Point> {
    let mut probes: Vec<Point> = (0..16)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 16.0;
            let clean = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
            pt![clean(a.cos()), clean(a.sin())].scale(1.5)
        })
        .collect();
    for r in rays {
        probes.push(r.clone());
        probes.push(r.scale(-1.0));
    }
    probes
}

fn check_solutions(
    rep: &mut ReplayReport,
    name: &str,
    expected: &Option<SolutionSet>,
    found: &[Point],
    candidates: &[Point],
    tol: f64,
) {
    if let Some(set) = expected {
        rep.check(name, set.matches(found, candidates, tol));
    }
}

/// Open-interval refinement: at every interior grid the strict minimum moves
/// toward the missing boundary, so the brute solution set stays empty while
/// the candidate minimum keeps decreasing.
fn replay_open_body(inst: &CatalogInstance, rep: &mut ReplayReport) -> Result<()> {
    let Problem::Equilibrium {
        bifunction,
        candidates: CandidateSpec::InteriorGrid { resolution },
        ..
    } = &inst.problem
    else {
        return Err(Error::InvalidInput(
            "open-body replay needs interior-grid candidates".into(),
        ));
    };
    let g = bifunction.build()?;
    let f = match &bifunction.kind {
        BifunctionKind::Potential { f, .. } => f.clone(),
        _ => {
            return Err(Error::InvalidInput(
                "open-body replay needs a potential".into(),
            ))
        }
    };
    let tols = &inst.tolerances;
    let mut previous_min = f64::INFINITY;
    let mut all_empty = true;
    let mut decreasing = true;
    for level in 0..4 {
        let h = resolution / f64::from(1u32 << level);
        let cands = oracle::interior_grid(&inst.body, h, tols)?.points;
        let testers = oracle::interior_grid(&inst.body, h / 2.0, tols)?.points;
        let brute = crate::equilibrium::eq_set(&g, &cands, &testers, tols.eq)?;
        all_empty &= brute.solutions.is_empty();
        let min = cands
            .iter()
            .map(|p| f.eval(p))
            .fold(f64::INFINITY, f64::min);
        decreasing &= min < previous_min;
        previous_min = min;
    }
    rep.check("brute empty at every refinement", all_empty);
    rep.check("candidate minimum strictly decreasing", decreasing);
    Ok(())
}

/// Replays an instance against the module its tags name.
pub fn replay(inst: &CatalogInstance) -> Result<ReplayReport> {
    let file = inst.to_file();
    let tols = &inst.tolerances;
    let opts = RunOptions::default();
    let mut rep = ReplayReport {
        id: inst.id.clone(),
        checks: Vec::new(),
    };
    let ex = &inst.expected;
    let point_tol = 1e-8;

    match &inst.problem {
        Problem::Project { xstar } => {
            let r = problem::execute(&file, &opts)?;
            let Outcome::Projection(p) = &r.outcome else {
                unreachable!()
            };
            check_solutions(
                &mut rep,
                "projection",
                &ex.solutions,
                std::slice::from_ref(&p.point),
                &[],
                point_tol,
            );
            rep.check("certificate", p.residual <= tols.feas);
            if geometry::distance(&inst.body, xstar, tols)? > tols.feas {
                let cell = geometry::locate_partition_cell(&inst.body, xstar, tols)?;
                rep.check(
                    "partition cell is the projection",
                    cell.distance(&p.point) <= point_tol,
                );
            }
        }
        Problem::Farthest { .. } => {
            let r = problem::execute(&file, &opts)?;
            let Outcome::Farthest(f) = &r.outcome else {
                unreachable!()
            };
            check_solutions(
                &mut rep,
                "farthest points",
                &ex.solutions,
                &f.points,
                &[],
                point_tol,
            );
            rep.check("farthest points are exposed", f.exposed.iter().all(|e| *e));
        }
        Problem::Argmin { .. } => {
            let r = problem::execute(&file, &opts)?;
            let Outcome::Argmin(a) = &r.outcome else {
                unreachable!()
            };
            let setup = file.eq_setup(&opts)?;
            check_solutions(
                &mut rep,
                "argmin",
                &ex.solutions,
                &a.report.solutions,
                &setup.candidates,
                point_tol,
            );
            if let Some(m) = ex.min_value {
                rep.check(
                    "min over extreme points",
                    (a.min_over_extreme - m).abs() <= tols.eq,
                );
                rep.check(
                    "min over candidates",
                    (a.min_over_candidates - m).abs() <= tols.eq,
                );
            }
            rep.check("min f(S) = min f(ext S)", a.minima_agree);
        }
        Problem::Vi { .. } => {
            let r = problem::execute(&file, &opts)?;
            let Outcome::Vi(v) = &r.outcome else {
                unreachable!()
            };
            let setup = file.eq_setup(&opts)?;
            check_solutions(
                &mut rep,
                "vi solutions",
                &ex.solutions,
                &v.solutions,
                &setup.candidates,
                point_tol,
            );
            let verify = problem::verify(&file, &opts, false)?;
            if let Some(agree) = ex.agree {
                rep.check("reduced vs brute", verify.comparison.agree == agree);
            }
            if let Some(t) = &verify.triangle {
                rep.check("vi / equilibrium / projection agree", t.consistent);
            }
        }
        Problem::Equilibrium {
            open_body, mode, ..
        } => {
            let setup = file.eq_setup(&opts)?;
            let designated = mode.unwrap_or(SolveMode::Extreme);
            let cands = &setup.candidates;
            match setup.run(designated) {
                Ok(r) => check_solutions(
                    &mut rep,
                    "solutions",
                    &ex.solutions,
                    &r.solutions,
                    cands,
                    point_tol,
                ),
                Err(Error::UnsoundReduction(_)) => {
                    rep.check(
                        "unsound reduction refused",
                        ex.solutions.is_none() && ex.forced.is_some(),
                    );
                }
                Err(e) => return Err(e),
            }
            let brute = setup.run(SolveMode::Brute)?;
            check_solutions(
                &mut rep,
                "brute",
                &ex.brute,
                &brute.solutions,
                cands,
                point_tol,
            );
            if let Some(forced_set) = &ex.forced {
                let forced_opts = RunOptions {
                    force_unsound: true,
                    ..Default::default()
                };
                let forced = file.eq_setup(&forced_opts)?.run(designated)?;
                rep.check(
                    "forced reduction",
                    forced_set.matches(&forced.solutions, cands, point_tol),
                );
                rep.check("forced report carries warning", !forced.warnings.is_empty());
            }
            if let Some(agree) = ex.agree {
                let forced_opts = RunOptions {
                    force_unsound: ex.forced.is_some(),
                    ..Default::default()
                };
                let v = problem::verify(&file, &forced_opts, !agree)?;
                rep.check("reduced vs brute", v.comparison.agree == agree && v.pass);
            }
            if *open_body {
                replay_open_body(inst, &mut rep)?;
            }
        }
        Problem::PartitionFigure { samples, bound } => {
            let fig = PartitionFigure::build(&inst.body, *samples, *bound, inst.seed, tols)?;
            let certified = fig.samples.iter().all(|s| {
                let d = &s.point - &s.base;
                geometry::normal_excess(&inst.body, &s.base, &d) <= tols.feas
                    && d.norm() > tols.feas
            });
            rep.check(
                "every sample certified",
                certified && fig.samples.len() == *samples,
            );
            for c in &ex.cones {
                let ok = planar_probes(&c.rays).iter().all(|d| {
                    let expected = in_planar_cone(d, &c.rays, 1e-12);
                    geometry::normal_cone_contains(&inst.body, &c.base, d, 1e-12)
                        .is_ok_and(|got| got == expected)
                });
                rep.check(format!("cone at {}", c.base), ok);
            }
        }
    }
    Ok(rep)
}
