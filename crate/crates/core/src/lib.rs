//! Convex geometry and equilibrium problems over `S = conv M`.
//!
//! The central fact exploited throughout: when the inequality defining an
//! equilibrium is quasiconvex in its second argument, it only has to be
//! checked on a generating set of `S` (generators, extreme points, or,
//! under lower semicontinuity, exposed points). The same idea certifies
//! metric projections and solves variational inequalities and farthest-point
//! problems by scanning vertices. Brute-force grid oracles in [`oracle`]
//! check every reduction.
//!
//! ```
//! use conveq::{geometry, pt, ConvexBody, Tolerances};
//!
//! let square = ConvexBody::unit_square();
//! let proj = geometry::project(&square, &pt![2, 2], &Tolerances::default()).unwrap();
//! assert!(proj.point.distance(&pt![1, 1]) < 1e-12);
//! ```

pub mod body;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod figure;
pub mod functions;
pub mod geometry;
pub mod instances;
pub mod oracle;
pub mod point;
pub mod problem;
pub mod sampling;
mod wolfe;

pub use body::{ConvexBody, Tolerances};
pub use equilibrium::{
    argmin_quasiconcave, check_quasiconvex, eq_reduced, eq_set, solve_vi, Bifunction, EqProblem,
    EqReport, ReduceOptions, Reduction, ReductionMode,
};
pub use error::{Error, Result};
pub use geometry::{
    contains, exposed_points_sample, extreme_points, farthest_points, gauss_map_contains,
    locate_partition_cell, normal_cone_contains, project, Cone, FarthestPoints, ProjectionResult,
};
pub use oracle::{brute_eq, compare, make_grid, ComparisonReport, Grid};
pub use point::Point;
