//! Instance files (JSON, `"version": 1`) and the runner that executes them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Tolerances};
use crate::equilibrium::{
    argmin_quasiconcave, eq_reduced, eq_set, solve_vi, ArgminReport, Bifunction, EqReport,
    ReduceOptions, Reduction, ReductionMode,
};
use crate::error::{Error, Result};
use crate::functions::{BifunctionKind, BifunctionSpec, OperatorSpec, ScalarFn};
use crate::geometry::{self, ProjectionResult, DEFAULT_EXPOSED_SAMPLES, DEFAULT_SEED};
use crate::oracle::{self, ComparisonReport};
use crate::point::Point;

pub const FORMAT_VERSION: u32 = 1;

/// How the candidate list `A'` (or an explicit tester list) is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CandidateSpec {
    Points {
        points: Vec<Point>,
    },
    /// Lattice of the body at the given spacing.
    Grid {
        resolution: f64,
    },
    /// Lattice points strictly inside the body.
    InteriorGrid {
        resolution: f64,
    },
    /// The body's generators.
    Generators,
    Union {
        parts: Vec<CandidateSpec>,
    },
}

impl CandidateSpec {
    pub fn resolve(&self, body: &ConvexBody, tols: &Tolerances) -> Result<Vec<Point>> {
        let pts = match self {
            CandidateSpec::Points { points } => points.clone(),
            CandidateSpec::Grid { resolution } => {
                oracle::make_grid(body, *resolution, tols)?.points
            }
            CandidateSpec::InteriorGrid { resolution } => {
                oracle::interior_grid(body, *resolution, tols)?.points
            }
            CandidateSpec::Generators => body
                .generators()
                .ok_or_else(|| Error::InvalidInput("a ball has no generators".into()))?
                .to_vec(),
            CandidateSpec::Union { parts } => {
                let mut out: Vec<Point> = Vec::new();
                for part in parts {
                    for p in part.resolve(body, tols)? {
                        if !out.iter().any(|q| q.distance(&p) <= tols.pt) {
                            out.push(p);
                        }
                    }
                }
                out
            }
        };
        for p in &pts {
            body.check_point(p)?;
        }
        Ok(pts)
    }
}

/// Tester set used for the equilibrium solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Generators,
    Extreme,
    Exposed,
    Brute,
}

impl SolveMode {
    pub fn reduction(self) -> Option<ReductionMode> {
        match self {
            SolveMode::Generators => Some(ReductionMode::Generators),
            SolveMode::Extreme => Some(ReductionMode::Extreme),
            SolveMode::Exposed => Some(ReductionMode::Exposed),
            SolveMode::Brute => None,
        }
    }
}

fn default_samples() -> usize {
    2000
}

fn default_bound() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    Project {
        xstar: Point,
    },
    Farthest {
        xstar: Point,
    },
    Equilibrium {
        bifunction: BifunctionSpec,
        candidates: CandidateSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<SolveMode>,
        /// Testers for the brute-force route; defaults to the grid of the body.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        testers: Option<CandidateSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exposed_samples: Option<usize>,
        /// Run the reduction even without the declared properties.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        force: bool,
        /// The constraint set is the interior of `body`. An open set has no
        /// extreme or exposed points.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        open_body: bool,
    },
    Vi {
        operator: OperatorSpec,
        candidates: CandidateSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<f64>,
    },
    Argmin {
        objective: ScalarFn,
        candidates: CandidateSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<f64>,
    },
    PartitionFigure {
        #[serde(default = "default_samples")]
        samples: usize,
        /// Exterior points are drawn from `[-bound, bound]²`.
        #[serde(default = "default_bound")]
        bound: f64,
    },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Project { .. } => "project",
            Problem::Farthest { .. } => "farthest",
            Problem::Equilibrium { .. } => "equilibrium",
            Problem::Vi { .. } => "vi",
            Problem::Argmin { .. } => "argmin",
            Problem::PartitionFigure { .. } => "partition-figure",
        }
    }
}

/// A machine-checkable description of a solution set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SolutionSet {
    Points {
        points: Vec<Point>,
    },
    /// All candidates whose single coordinate lies in `[lo, hi]`.
    Interval {
        lo: f64,
        hi: f64,
    },
    Empty,
    AllCandidates,
}

impl SolutionSet {
    /// Whether `found` (a subset of `candidates`) is exactly this set, matching
    /// points within `tol`.
    pub fn matches(&self, found: &[Point], candidates: &[Point], tol: f64) -> bool {
        let expected: Vec<Point> = match self {
            SolutionSet::Points { points } => points.clone(),
            SolutionSet::Interval { lo, hi } => candidates
                .iter()
                .filter(|p| p.dim() == 1 && p[0] >= lo - tol && p[0] <= hi + tol)
                .cloned()
                .collect(),
            SolutionSet::Empty => Vec::new(),
            SolutionSet::AllCandidates => candidates.to_vec(),
        };
        let covered =
            |a: &[Point], b: &[Point]| a.iter().all(|p| b.iter().any(|q| p.distance(q) <= tol));
        covered(&expected, found) && covered(found, &expected)
    }
}

/// A cone `base + cone(rays)` expected at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub base: Point,
    pub rays: Vec<Point>,
}

/// Expected outcomes recorded alongside catalog instances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    /// Output of the instance's designated solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions: Option<SolutionSet>,
    /// Output of the brute-force route.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute: Option<SolutionSet>,
    /// Output of the reduction when forced past its preconditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced: Option<SolutionSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<ConeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dimension: usize,
    pub body: ConvexBody,
    pub problem: Problem,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("field `{field}`: {msg}"))
}

impl InstanceFile {
    /// Parses and validates. Syntax errors carry line and column; semantic
    /// errors name the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            Error::InvalidInput(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(field_error(
                "version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.version
                ),
            ));
        }
        self.body
            .validate(&self.tolerances)
            .map_err(|e| field_error("body", e))?;
        if self.body.dim() != self.dimension {
            return Err(field_error(
                "dimension",
                format!("declared {}, body has {}", self.dimension, self.body.dim()),
            ));
        }
        let t = &self.tolerances;
        if ![t.feas, t.pt, t.eq]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
        {
            return Err(field_error("tolerances", "must be finite and nonnegative"));
        }
        let dim = self.dimension;
        let check_pt = |name: &str, p: &Point| p.check_dim(dim).map_err(|e| field_error(name, e));
        let check_res = |r: &Option<f64>| match r {
            Some(r) if !(r.is_finite() && *r > 0.0) => {
                Err(field_error("problem.resolution", "must be positive"))
            }
            _ => Ok(()),
        };
        match &self.problem {
            Problem::Project { xstar } | Problem::Farthest { xstar } => {
                check_pt("problem.xstar", xstar)
            }
            Problem::Equilibrium {
                bifunction,
                resolution,
                ..
            } => {
                bifunction
                    .validate(dim)
                    .map_err(|e| field_error("problem.bifunction", e))?;
                check_res(resolution)
            }
            Problem::Vi {
                operator,
                resolution,
                ..
            } => {
                operator
                    .validate(dim)
                    .map_err(|e| field_error("problem.operator", e))?;
                check_res(resolution)
            }
            Problem::Argmin {
                objective,
                resolution,
                ..
            } => {
                objective
                    .validate(dim)
                    .map_err(|e| field_error("problem.objective", e))?;
                check_res(resolution)
            }
            Problem::PartitionFigure { samples, bound } => {
                if dim != 2 || self.body.is_ball() {
                    return Err(field_error(
                        "problem",
                        "partition figures need a 2-D polytope",
                    ));
                }
                if *samples == 0 || !(bound.is_finite() && *bound > 0.0) {
                    return Err(field_error("problem", "samples and bound must be positive"));
                }
                Ok(())
            }
        }
    }
}

/// Command-line overrides applied on top of an instance file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub resolution: Option<f64>,
    pub mode: Option<SolveMode>,
    pub force_unsound: bool,
}

pub const DEFAULT_RESOLUTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarthestOutcome {
    pub points: Vec<Point>,
    pub degenerate: bool,
    /// Exposedness check for each returned point.
    pub exposed: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Projection(ProjectionResult),
    Farthest(FarthestOutcome),
    Equilibrium(EqReport),
    Argmin(ArgminReport),
    Vi(EqReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub problem: String,
    pub seed: u64,
    pub tol: f64,
    pub tolerances: Tolerances,
    /// Solution points of whatever the outcome is.
    pub solutions: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction_used: Option<Reduction>,
    pub outcome: Outcome,
}

impl Outcome {
    fn solutions(&self) -> Vec<Point> {
        match self {
            Outcome::Projection(p) => vec![p.point.clone()],
            Outcome::Farthest(f) => f.points.clone(),
            Outcome::Equilibrium(r) | Outcome::Vi(r) => r.solutions.clone(),
            Outcome::Argmin(a) => a.report.solutions.clone(),
        }
    }

    fn reduction_used(&self) -> Option<Reduction> {
        match self {
            Outcome::Projection(_) | Outcome::Farthest(_) => None,
            Outcome::Equilibrium(r) | Outcome::Vi(r) => Some(r.reduction_used),
            Outcome::Argmin(a) => Some(a.report.reduction_used),
        }
    }
}

/// Everything needed to run an equilibrium-type problem, resolved from a file.
pub struct EqSetup {
    pub g: Bifunction,
    pub candidates: Vec<Point>,
    pub mode: SolveMode,
    pub brute_testers: Vec<Point>,
    pub open_body: bool,
    pub reduce: ReduceOptions,
    pub body: ConvexBody,
}

impl InstanceFile {
    fn eq_tol(&self, opts: &RunOptions) -> f64 {
        opts.tol.unwrap_or(self.tolerances.eq)
    }

    pub fn seed(&self, opts: &RunOptions) -> u64 {
        opts.seed.or(self.seed).unwrap_or(DEFAULT_SEED)
    }

    fn brute_grid(
        &self,
        resolution: Option<f64>,
        opts: &RunOptions,
        open: bool,
    ) -> Result<Vec<Point>> {
        let h = opts.resolution.or(resolution).unwrap_or(DEFAULT_RESOLUTION);
        let grid = if open {
            oracle::interior_grid(&self.body, h, &self.tolerances)?
        } else {
            oracle::make_grid(&self.body, h, &self.tolerances)?
        };
        Ok(grid.points)
    }

    /// Resolves equilibrium, argmin, farthest and VI problems into a common
    /// equilibrium form.
    pub fn eq_setup(&self, opts: &RunOptions) -> Result<EqSetup> {
        let tol = self.eq_tol(opts);
        let tols = &self.tolerances;
        let mut reduce = ReduceOptions {
            tol,
            exposed_samples: DEFAULT_EXPOSED_SAMPLES,
            allow_unsound: opts.force_unsound,
            geometry: *tols,
        };
        match &self.problem {
            Problem::Equilibrium {
                bifunction,
                candidates,
                mode,
                testers,
                resolution,
                exposed_samples,
                force,
                open_body,
            } => {
                reduce.allow_unsound |= *force;
                if let Some(n) = exposed_samples {
                    reduce.exposed_samples = *n;
                }
                let brute_testers = match testers {
                    Some(spec) => spec.resolve(&self.body, tols)?,
                    None => self.brute_grid(*resolution, opts, *open_body)?,
                };
                Ok(EqSetup {
                    g: bifunction.build()?,
                    candidates: candidates.resolve(&self.body, tols)?,
                    mode: opts.mode.or(*mode).unwrap_or(SolveMode::Extreme),
                    brute_testers,
                    open_body: *open_body,
                    reduce,
                    body: self.body.clone(),
                })
            }
            Problem::Argmin {
                objective,
                candidates,
                resolution,
            } => Ok(EqSetup {
                g: BifunctionSpec::from(BifunctionKind::Potential {
                    f: objective.clone(),
                    shift: 0.0,
                })
                .build()?,
                candidates: candidates.resolve(&self.body, tols)?,
                mode: opts.mode.unwrap_or(SolveMode::Extreme),
                brute_testers: self.brute_grid(*resolution, opts, false)?,
                open_body: false,
                reduce,
                body: self.body.clone(),
            }),
            Problem::Vi {
                operator,
                candidates,
                resolution,
            } => Ok(EqSetup {
                g: BifunctionSpec::from(BifunctionKind::Variational {
                    operator: operator.clone(),
                })
                .build()?,
                candidates: candidates.resolve(&self.body, tols)?,
                mode: opts.mode.unwrap_or(SolveMode::Extreme),
                brute_testers: self.brute_grid(*resolution, opts, false)?,
                open_body: false,
                reduce,
                body: self.body.clone(),
            }),
            Problem::Farthest { xstar } => {
                let h = opts.resolution.unwrap_or(DEFAULT_RESOLUTION);
                let mut parts = vec![CandidateSpec::Grid { resolution: h }];
                if let Some(g) = self.body.generators() {
                    parts.push(CandidateSpec::Points { points: g.to_vec() });
                }
                Ok(EqSetup {
                    g: BifunctionSpec::from(BifunctionKind::Potential {
                        f: ScalarFn::NegDistance {
                            xstar: xstar.coords().to_vec(),
                        },
                        shift: 0.0,
                    })
                    .build()?,
                    candidates: CandidateSpec::Union { parts }.resolve(&self.body, tols)?,
                    mode: opts.mode.unwrap_or(if self.body.is_ball() {
                        SolveMode::Exposed
                    } else {
                        SolveMode::Extreme
                    }),
                    brute_testers: self.brute_grid(Some(h), opts, false)?,
                    open_body: false,
                    reduce,
                    body: self.body.clone(),
                })
            }
            Problem::Project { .. } | Problem::PartitionFigure { .. } => {
                Err(Error::InvalidInput(format!(
                    "`{}` is not an equilibrium-type problem",
                    self.problem.name()
                )))
            }
        }
    }
}

impl EqSetup {
    pub fn run(&self, mode: SolveMode) -> Result<EqReport> {
        match mode.reduction() {
            None => eq_set(
                &self.g,
                &self.candidates,
                &self.brute_testers,
                self.reduce.tol,
            ),
            Some(ReductionMode::Generators) if self.open_body => Err(Error::InvalidInput(
                "an open constraint set has no generator description".into(),
            )),
            Some(m) if self.open_body => {
                // ext and exp of an open set are empty
                let mut r = eq_set(&self.g, &self.candidates, &[], self.reduce.tol)?;
                r.reduction_used = Reduction::from(m);
                Ok(r)
            }
            Some(m) => eq_reduced(&self.g, &self.candidates, &self.body, m, &self.reduce),
        }
    }
}

/// Runs the designated solver of an instance.
pub fn execute(file: &InstanceFile, opts: &RunOptions) -> Result<RunReport> {
    let tol = file.eq_tol(opts);
    let tols = &file.tolerances;
    let outcome = match &file.problem {
        Problem::Project { xstar } => {
            Outcome::Projection(geometry::project(&file.body, xstar, tols)?)
        }
        Problem::Farthest { xstar } => {
            let f = geometry::farthest_points(&file.body, xstar, tols)?;
            let exposed = f
                .points
                .iter()
                .map(|p| geometry::is_exposed(&file.body, p, tols))
                .collect::<Result<_>>()?;
            Outcome::Farthest(FarthestOutcome {
                points: f.points,
                degenerate: f.degenerate,
                exposed,
            })
        }
        Problem::Equilibrium { .. } => {
            let setup = file.eq_setup(opts)?;
            Outcome::Equilibrium(setup.run(setup.mode)?)
        }
        Problem::Argmin {
            objective,
            candidates,
            ..
        } => {
            let cands = candidates.resolve(&file.body, tols)?;
            let f = |p: &Point| objective.eval(p);
            Outcome::Argmin(argmin_quasiconcave(&f, &file.body, &cands, tol, tols)?)
        }
        Problem::Vi {
            operator,
            candidates,
            ..
        } => {
            let cands = candidates.resolve(&file.body, tols)?;
            let t = |p: &Point| operator.apply(p);
            Outcome::Vi(solve_vi(&t, &file.body, &cands, tol, tols)?)
        }
        Problem::PartitionFigure { .. } => {
            return Err(Error::InvalidInput(
                "partition-figure instances are rendered with the `figure` command".into(),
            ))
        }
    };
    Ok(RunReport {
        id: file.id.clone(),
        problem: file.problem.name().into(),
        seed: file.seed(opts),
        tol,
        tolerances: *tols,
        solutions: outcome.solutions(),
        reduction_used: outcome.reduction_used(),
        outcome,
    })
}

/// Cross-check between the variational inequality, the best-approximation
/// equilibrium and the metric projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub projection: Point,
    pub vi_solutions: Vec<Point>,
    pub eq_solutions: Vec<Point>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub problem: String,
    pub seed: u64,
    pub tol: f64,
    pub resolution_testers: usize,
    pub reduced: EqReport,
    pub brute: EqReport,
    pub comparison: ComparisonReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<TriangleCheck>,
    pub expect_disagree: bool,
    pub pass: bool,
}

/// `⟨T(x), ·⟩` residual operators are projections in disguise; checks all
/// three routes select the same point.
pub fn triangle_check(
    body: &ConvexBody,
    xstar: &Point,
    candidates: &[Point],
    tol: f64,
    tols: &Tolerances,
) -> Result<TriangleCheck> {
    let projection = geometry::project(body, xstar, tols)?.point;
    let xs = xstar.clone();
    let residual = move |p: &Point| (p - &xs).into_vec();
    let vi = solve_vi(&residual, body, candidates, tol, tols)?;
    let g = Bifunction::best_approximation(xstar.clone());
    let opts = ReduceOptions {
        tol,
        geometry: *tols,
        ..Default::default()
    };
    let eq = eq_reduced(&g, candidates, body, ReductionMode::Extreme, &opts)?;
    let near = |set: &[Point]| {
        !set.is_empty()
            && set
                .iter()
                .all(|p| p.distance(&projection) <= 10.0 * tol.max(tols.feas))
    };
    let consistent = near(&vi.solutions) && near(&eq.solutions);
    Ok(TriangleCheck {
        projection,
        vi_solutions: vi.solutions,
        eq_solutions: eq.solutions,
        consistent,
    })
}

/// Runs the reduced solver and the brute-force oracle and compares them.
pub fn verify(
    file: &InstanceFile,
    opts: &RunOptions,
    expect_disagree: bool,
) -> Result<VerifyReport> {
    let setup = file.eq_setup(opts)?;
    let reduced_mode = match setup.mode {
        SolveMode::Brute => SolveMode::Extreme,
        m => m,
    };
    let reduced = match &file.problem {
        Problem::Vi { operator, .. } if reduced_mode == SolveMode::Extreme => {
            let t = |p: &Point| operator.apply(p);
            solve_vi(
                &t,
                &file.body,
                &setup.candidates,
                setup.reduce.tol,
                &file.tolerances,
            )?
        }
        _ => setup.run(reduced_mode)?,
    };
    let brute = setup.run(SolveMode::Brute)?;
    let comparison = oracle::compare(
        &reduced,
        &brute,
        oracle::matching_tolerance(&file.tolerances),
    )?;

    let triangle = match &file.problem {
        Problem::Vi {
            operator: OperatorSpec::Residual { xstar },
            ..
        } if !setup.open_body => Some(triangle_check(
            &file.body,
            &Point::new(xstar.clone())?,
            &setup.candidates,
            setup.reduce.tol,
            &file.tolerances,
        )?),
        _ => None,
    };
    let consistent = triangle.as_ref().is_none_or(|t| t.consistent);
    let pass = if expect_disagree {
        !comparison.agree
    } else {
        comparison.agree && consistent
    };
    Ok(VerifyReport {
        id: file.id.clone(),
        problem: file.problem.name().into(),
        seed: file.seed(opts),
        tol: setup.reduce.tol,
        resolution_testers: setup.brute_testers.len(),
        reduced,
        brute,
        comparison,
        triangle,
        expect_disagree,
        pass,
    })
}
