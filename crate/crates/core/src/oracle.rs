//! Brute-force ground truth: lattice grids over bodies, literal equilibrium
//! scans against those grids, and set comparison of solution reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Tolerances};
use crate::equilibrium::{eq_set, Bifunction, EqReport, Reduction};
use crate::error::{Error, Result};
use crate::geometry;
use crate::point::Point;

/// Largest dimension the lattice grid accepts.
pub const MAX_GRID_DIM: usize = 4;
/// Largest bounding-box lattice the grid will enumerate.
pub const MAX_LATTICE_POINTS: usize = 20_000_000;

/// A lattice of the body's bounding box, anchored at its minimum corner and
/// filtered by membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<Point>,
    pub resolution: f64,
    pub body: ConvexBody,
}

fn axis_values(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let steps = ((hi - lo) / h + 1e-9).floor() as usize;
    (0..=steps).map(|k| lo + k as f64 * h).collect()
}

/// Lattice points of spacing `resolution` in the bounding box that lie in the
/// body (within `tols.feas`), in lexicographic order.
pub fn make_grid(body: &ConvexBody, resolution: f64, tols: &Tolerances) -> Result<Grid> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::Grid(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let dim = body.dim();
    if dim > MAX_GRID_DIM {
        return Err(Error::Grid(format!(
            "grids are limited to dimension {MAX_GRID_DIM}, body has dimension {dim}"
        )));
    }
    let (lo, hi) = body.bounding_box();
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| axis_values(lo[k], hi[k], resolution))
        .collect();
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .filter(|&t| t <= MAX_LATTICE_POINTS)
        .ok_or_else(|| Error::Grid(format!("lattice at resolution {resolution} is too large")))?;

    // odometer over the axes, last axis fastest: lexicographic order
    let lattice: Vec<Point> = (0..total)
        .map(|mut idx| {
            let mut coords = vec![0.0; dim];
            for k in (0..dim).rev() {
                let len = axes[k].len();
                coords[k] = axes[k][idx % len];
                idx /= len;
            }
            Point::from_vec_unchecked(coords)
        })
        .collect();

    let points: Vec<Point> = match body {
        ConvexBody::Ball { center, radius } => lattice
            .into_iter()
            .filter(|p| p.distance(center) <= radius + tols.feas)
            .collect(),
        ConvexBody::Polytope { .. } => {
            let keep: Vec<bool> = lattice
                .par_iter()
                .map(|p| {
                    geometry::distance(body, p, tols)
                        .map(|d| d <= tols.feas)
                        .unwrap_or(false)
                })
                .collect();
            lattice
                .into_iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(p, _)| p)
                .collect()
        }
    };
    if points.is_empty() {
        return Err(Error::Grid(format!(
            "no lattice point of spacing {resolution} lies in the body"
        )));
    }
    Ok(Grid {
        points,
        resolution,
        body: body.clone(),
    })
}

/// Lattice points strictly inside the body: those whose axis neighbours at
/// half a grid step also lie in it. Used to model open sets.
pub fn interior_grid(body: &ConvexBody, resolution: f64, tols: &Tolerances) -> Result<Grid> {
    let full = make_grid(body, resolution, tols)?;
    let half = resolution / 2.0;
    let dim = body.dim();
    let points: Vec<Point> = full
        .points
        .into_iter()
        .filter(|p| {
            (0..dim).all(|k| {
                [-half, half].iter().all(|&s| {
                    let q = p.add_scaled(1.0, &Point::axis(dim, k, s));
                    geometry::distance(body, &q, tols).is_ok_and(|d| d <= tols.feas)
                })
            })
        })
        .collect();
    if points.is_empty() {
        return Err(Error::Grid("no interior lattice point".into()));
    }
    Ok(Grid {
        points,
        resolution,
        body: body.clone(),
    })
}

/// `eq(g | candidates, grid of S)`, the definition applied literally.
pub fn brute_eq(
    g: &Bifunction,
    candidates: &[Point],
    body: &ConvexBody,
    resolution: f64,
    tol: f64,
    tols: &Tolerances,
) -> Result<EqReport> {
    let grid = make_grid(body, resolution, tols)?;
    eq_set(g, candidates, &grid.points, tol)
}

/// Set comparison of two solution reports over the same candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub agree: bool,
    pub only_in_reduced: Vec<Point>,
    pub only_in_brute: Vec<Point>,
    /// Hausdorff distance between the two solution sets; zero when both are
    /// empty and infinite (serialized as `null`) when exactly one is.
    #[serde(with = "infinite_as_null")]
    pub hausdorff_gap: f64,
    pub reduced_reduction: Reduction,
    pub reduced_count: usize,
    pub brute_count: usize,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

fn nearest(p: &Point, set: &[Point]) -> f64 {
    set.iter()
        .map(|q| p.distance(q))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between finite point sets.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => {
            let ab = a.par_iter().map(|p| nearest(p, b)).reduce(|| 0.0, f64::max);
            let ba = b.par_iter().map(|p| nearest(p, a)).reduce(|| 0.0, f64::max);
            ab.max(ba)
        }
    }
}

/// Compares solution sets, matching points within `tol` (Euclidean).
pub fn compare(reduced: &EqReport, brute: &EqReport, tol: f64) -> Result<ComparisonReport> {
    if reduced.candidate_count != brute.candidate_count
        || reduced.candidate_digest != brute.candidate_digest
    {
        return Err(Error::CandidateMismatch);
    }
    let missing_from = |from: &[Point], other: &[Point]| -> Vec<Point> {
        from.iter()
            .filter(|p| nearest(p, other) > tol)
            .cloned()
            .collect()
    };
    let only_in_reduced = missing_from(&reduced.solutions, &brute.solutions);
    let only_in_brute = missing_from(&brute.solutions, &reduced.solutions);
    Ok(ComparisonReport {
        agree: only_in_reduced.is_empty() && only_in_brute.is_empty(),
        hausdorff_gap: hausdorff(&reduced.solutions, &brute.solutions),
        only_in_reduced,
        only_in_brute,
        reduced_reduction: reduced.reduction_used,
        reduced_count: reduced.solutions.len(),
        brute_count: brute.solutions.len(),
    })
}

/// Default point-matching tolerance for [`compare`]: `10 · tol_eq`.
pub fn matching_tolerance(tols: &Tolerances) -> f64 {
    10.0 * tols.eq
}
