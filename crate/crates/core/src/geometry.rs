//! Membership, extreme and exposed points, metric projection, normal cones and
//! the normal-cone partition of the complement of a convex body.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Tolerances};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::wolfe;

/// Sphere sample size used when a ball stands in for its (infinite) set of
/// exposed points.
pub const DEFAULT_EXPOSED_SAMPLES: usize = 1024;

/// Seed for the sphere sampler in dimensions where no lattice is available.
pub const DEFAULT_SEED: u64 = 42;

/// Nearest point of a body together with its variational certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: Point,
    /// `max_{x ∈ S} ⟨x − x⁰, x* − x⁰⟩`, clamped at zero.
    pub residual: f64,
    pub iterations: usize,
}

/// Points of a body farthest from a reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarthestPoints {
    pub points: Vec<Point>,
    /// Set when the maximizers form a whole sphere (reference point at a ball
    /// center); `points` is then a sample of that sphere.
    pub degenerate: bool,
}

/// `max_{x ∈ S} ⟨x − x⁰, d⟩`. Nonpositive exactly when `d ∈ N_S(x⁰)`.
pub fn normal_excess(body: &ConvexBody, x0: &Point, d: &Point) -> f64 {
    match body {
        ConvexBody::Polytope { generators } => generators
            .iter()
            .map(|v| (v - x0).dot(d))
            .fold(f64::NEG_INFINITY, f64::max),
        ConvexBody::Ball { .. } => body.support(d) - x0.dot(d),
    }
}

fn project_polytope(
    generators: &[Point],
    xstar: &Point,
    tols: &Tolerances,
) -> Result<ProjectionResult> {
    let dim = xstar.dim();
    let cap = tols.max_iter_for(generators.len(), dim);
    let run = wolfe::nearest_in_hull(generators, xstar, cap);
    let mut point = run.point(generators);
    let scale = generators
        .iter()
        .map(|g| g.distance(xstar))
        .fold(0.0_f64, f64::max)
        .max(1.0);
    if point.distance(xstar) <= 1e-13 * scale {
        point = xstar.clone();
    }
    let d = xstar - &point;
    let residual = generators
        .iter()
        .map(|v| (v - &point).dot(&d))
        .fold(0.0_f64, f64::max);
    if run.hit_cap && residual > tols.feas {
        return Err(Error::NotConverged {
            best: point,
            residual,
            iterations: run.iterations,
        });
    }
    Ok(ProjectionResult {
        point,
        residual,
        iterations: run.iterations,
    })
}

/// Metric projection of `xstar` onto `body`.
///
/// Polytopes are handled by a minimum-norm-point iteration over the
/// generators; the returned residual is the variational certificate checked
/// on the generators, which suffices because `x ↦ ⟨x − x⁰, x* − x⁰⟩` is affine.
/// Balls use the closed form.
pub fn project(body: &ConvexBody, xstar: &Point, tols: &Tolerances) -> Result<ProjectionResult> {
    body.check_point(xstar)?;
    match body {
        ConvexBody::Polytope { generators } => project_polytope(generators, xstar, tols),
        ConvexBody::Ball { center, radius } => {
            let offset = xstar - center;
            let dist = offset.norm();
            let point = if dist <= *radius {
                xstar.clone()
            } else {
                center.add_scaled(radius / dist, &offset)
            };
            let d = xstar - &point;
            let residual = normal_excess(body, &point, &d).max(0.0);
            Ok(ProjectionResult {
                point,
                residual,
                iterations: 0,
            })
        }
    }
}

/// Euclidean distance from `p` to the body. Falls back to the best iterate
/// if the polytope solver stops at its iteration cap.
pub fn distance(body: &ConvexBody, p: &Point, tols: &Tolerances) -> Result<f64> {
    match project(body, p, tols) {
        Ok(r) => Ok(p.distance(&r.point)),
        Err(Error::NotConverged { best, .. }) => Ok(p.distance(&best)),
        Err(e) => Err(e),
    }
}

/// `dist(p, S) ≤ tol`.
pub fn contains(body: &ConvexBody, p: &Point, tol: f64) -> Result<bool> {
    body.check_point(p)?;
    match body {
        ConvexBody::Ball { center, radius } => Ok(p.distance(center) <= radius + tol),
        ConvexBody::Polytope { .. } => Ok(distance(body, p, &Tolerances::default())? <= tol),
    }
}

/// Generators that are not in the hull of the remaining generators.
pub fn extreme_points(body: &ConvexBody, tols: &Tolerances) -> Result<Vec<Point>> {
    let generators = body.generators().ok_or_else(|| {
        Error::InvalidInput("extreme points are enumerated only for polytopes".into())
    })?;
    if generators.len() == 1 {
        return Ok(generators.to_vec());
    }
    let keep: Vec<bool> = (0..generators.len())
        .into_par_iter()
        .map(|i| {
            let others: Vec<Point> = generators
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.clone())
                .collect();
            let cap = tols.max_iter_for(others.len(), generators[i].dim());
            let run = wolfe::nearest_in_hull(&others, &generators[i], cap);
            run.point(&others).distance(&generators[i]) > tols.feas
        })
        .collect();
    Ok(generators
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(g, _)| g.clone())
        .collect())
}

/// Evenly spread points on the sphere `c + r·Sⁿ⁻¹`. Lattices are used in
/// dimensions 1 to 3; higher dimensions draw seeded Gaussian directions.
pub fn sphere_sample(center: &Point, radius: f64, count: usize, seed: u64) -> Vec<Point> {
    let count = count.max(1);
    let n = center.dim();
    let clean = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let directions: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                vec![clean(a.cos()), clean(a.sin())]
            })
            .collect(),
        3 => {
            // Fibonacci lattice
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = if count == 1 {
                        0.0
                    } else {
                        1.0 - 2.0 * (k as f64 + 0.5) / count as f64
                    };
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let a = golden * k as f64;
                    vec![clean(rho * a.cos()), clean(rho * a.sin()), clean(z)]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-9 {
                    out.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
            out
        }
    };
    directions
        .into_iter()
        .map(|d| {
            Point::from_vec_unchecked(
                center
                    .coords()
                    .iter()
                    .zip(d)
                    .map(|(c, u)| c + radius * u)
                    .collect(),
            )
        })
        .collect()
}

/// A finite stand-in for the exposed points of `body`.
///
/// For a polytope every extreme point is exposed, so `count` is ignored and
/// the extreme points are returned. For a ball every boundary point is
/// exposed and `count` sphere points are returned (two in dimension one).
pub fn exposed_points_sample(
    body: &ConvexBody,
    count: usize,
    tols: &Tolerances,
) -> Result<Vec<Point>> {
    match body {
        ConvexBody::Polytope { .. } => extreme_points(body, tols),
        ConvexBody::Ball { center, radius } => {
            Ok(sphere_sample(center, *radius, count, DEFAULT_SEED))
        }
    }
}

/// A direction `c` for which `p` is the unique maximizer of `⟨c, ·⟩` over the
/// body, or `None` if `p` is not an exposed point (at tolerance).
pub fn exposing_functional(
    body: &ConvexBody,
    p: &Point,
    tols: &Tolerances,
) -> Result<Option<Point>> {
    body.check_point(p)?;
    match body {
        ConvexBody::Ball { center, radius } => {
            let c = p - center;
            Ok(((c.norm() - radius).abs() <= tols.feas).then_some(c))
        }
        ConvexBody::Polytope { generators } => {
            if !generators.iter().any(|g| g.distance(p) <= tols.feas) {
                // not a generator, hence not a vertex of this V-polytope
                return Ok(None);
            }
            let others: Vec<Point> = generators
                .iter()
                .filter(|g| g.distance(p) > tols.feas)
                .cloned()
                .collect();
            if others.is_empty() {
                return Ok(Some(Point::zeros(p.dim())));
            }
            let cap = tols.max_iter_for(others.len(), p.dim());
            let run = wolfe::nearest_in_hull(&others, p, cap);
            let c = p - &run.point(&others);
            if c.norm() <= tols.feas {
                return Ok(None);
            }
            let top = p.dot(&c);
            let strict = others.iter().all(|w| w.dot(&c) < top);
            Ok(strict.then_some(c))
        }
    }
}

pub fn is_exposed(body: &ConvexBody, p: &Point, tols: &Tolerances) -> Result<bool> {
    Ok(exposing_functional(body, p, tols)?.is_some())
}

/// The normal cone `N_S(x⁰)` of a body at a base point in the body.
#[derive(Debug, Clone)]
pub struct Cone<'a> {
    base: Point,
    body: &'a ConvexBody,
}

impl<'a> Cone<'a> {
    /// Fails with [`Error::NotInBody`] when `base` is farther than `tols.feas`
    /// from the body.
    pub fn at(body: &'a ConvexBody, base: Point, tols: &Tolerances) -> Result<Self> {
        body.check_point(&base)?;
        let dist = distance(body, &base, tols)?;
        if dist > tols.feas {
            return Err(Error::NotInBody { distance: dist });
        }
        Ok(Cone { base, body })
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn body(&self) -> &ConvexBody {
        self.body
    }

    /// `⟨x − x⁰, d⟩ ≤ tol` for all `x` in the body.
    pub fn contains(&self, d: &Point, tol: f64) -> Result<bool> {
        d.check_dim(self.base.dim())?;
        if d.norm() <= tol {
            return Ok(true);
        }
        Ok(normal_excess(self.body, &self.base, d) <= tol)
    }
}

pub fn normal_cone_contains(body: &ConvexBody, x0: &Point, d: &Point, tol: f64) -> Result<bool> {
    Cone::at(body, x0.clone(), &Tolerances::default())?.contains(d, tol)
}

/// `u ∈ N_S(x⁰) ∩ Sⁿ⁻¹`.
pub fn gauss_map_contains(body: &ConvexBody, x0: &Point, u: &Point, tol: f64) -> Result<bool> {
    let cone = Cone::at(body, x0.clone(), &Tolerances::default())?;
    u.check_dim(x0.dim())?;
    if (u.norm() - 1.0).abs() > tol {
        return Ok(false);
    }
    cone.contains(u, tol)
}

/// The boundary point `x` whose translated cone `x + N_S(x) \ {0}` contains
/// the exterior point `xstar`. This is the metric projection; the cone
/// membership is re-checked before returning.
pub fn locate_partition_cell(body: &ConvexBody, xstar: &Point, tols: &Tolerances) -> Result<Point> {
    let proj = project(body, xstar, tols)?;
    let gap = xstar.distance(&proj.point);
    if gap <= tols.feas {
        return Err(Error::InsideBody);
    }
    let d = xstar - &proj.point;
    let excess = normal_excess(body, &proj.point, &d);
    if excess > tols.feas {
        return Err(Error::NotConverged {
            best: proj.point,
            residual: excess,
            iterations: proj.iterations,
        });
    }
    Ok(proj.point)
}

/// Points of the body at maximal distance from `xstar`.
///
/// `−‖x − x*‖` is concave, so its minimum over a polytope is attained among
/// the extreme points; only those are scanned. Ties within `tols.eq` are all
/// returned.
pub fn farthest_points(
    body: &ConvexBody,
    xstar: &Point,
    tols: &Tolerances,
) -> Result<FarthestPoints> {
    body.check_point(xstar)?;
    match body {
        ConvexBody::Polytope { .. } => {
            let ext = extreme_points(body, tols)?;
            let dists: Vec<f64> = ext.iter().map(|v| v.distance(xstar)).collect();
            let best = dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(FarthestPoints {
                points: ext
                    .into_iter()
                    .zip(dists)
                    .filter(|(_, d)| *d >= best - tols.eq)
                    .map(|(v, _)| v)
                    .collect(),
                degenerate: false,
            })
        }
        ConvexBody::Ball { center, radius } => {
            let offset = xstar - center;
            let dist = offset.norm();
            if dist <= tols.pt {
                return Ok(FarthestPoints {
                    points: sphere_sample(center, *radius, DEFAULT_EXPOSED_SAMPLES, DEFAULT_SEED),
                    degenerate: true,
                });
            }
            Ok(FarthestPoints {
                points: vec![center.add_scaled(-radius / dist, &offset)],
                degenerate: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use approx::assert_abs_diff_eq;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn square() -> ConvexBody {
        ConvexBody::unit_square()
    }

    fn disk() -> ConvexBody {
        ConvexBody::ball(pt![0, 0], 1.0).unwrap()
    }

    fn close(a: &Point, b: &Point) -> bool {
        a.distance(b) < 1e-9
    }

    #[test]
    fn membership() {
        assert!(contains(&square(), &pt![0, 0], 1e-9).unwrap());
        assert!(!contains(&square(), &pt![2, 2], 1e-9).unwrap());
        // dist((2,2), S) = √2 sits between these tolerances
        assert!(!contains(&square(), &pt![2, 2], 1.41).unwrap());
        assert!(contains(&square(), &pt![2, 2], 1.42).unwrap());
        assert!(contains(&disk(), &pt![1, 0], 1e-9).unwrap());
        assert!(matches!(
            contains(&square(), &pt![1, 2, 3], 1e-9),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn extreme_points_of_square() {
        assert_eq!(extreme_points(&square(), &tols()).unwrap().len(), 4);
        let with_center = ConvexBody::polytope(vec![
            pt![1, 1],
            pt![-1, 1],
            pt![-1, -1],
            pt![1, -1],
            pt![0, 0],
        ])
        .unwrap();
        let ext = extreme_points(&with_center, &tols()).unwrap();
        assert_eq!(ext, vec![pt![1, 1], pt![-1, 1], pt![-1, -1], pt![1, -1]]);
        let single = ConvexBody::polytope(vec![pt![3, 4]]).unwrap();
        assert_eq!(extreme_points(&single, &tols()).unwrap(), vec![pt![3, 4]]);
        assert!(extreme_points(&disk(), &tols()).is_err());
    }

    #[test]
    fn exposed_samples() {
        assert_eq!(
            exposed_points_sample(&square(), 10, &tols()).unwrap().len(),
            4
        );
        let s = exposed_points_sample(&disk(), 4, &tols()).unwrap();
        assert_eq!(s, vec![pt![1, 0], pt![0, 1], pt![-1, 0], pt![0, -1]]);
        let single = ConvexBody::polytope(vec![pt![3, 4]]).unwrap();
        assert_eq!(
            exposed_points_sample(&single, 7, &tols()).unwrap(),
            vec![pt![3, 4]]
        );
        let ball3 = ConvexBody::ball(pt![1, 1, 1], 2.0).unwrap();
        for p in exposed_points_sample(&ball3, 50, &tols()).unwrap() {
            assert_abs_diff_eq!(p.distance(&pt![1, 1, 1]), 2.0, epsilon = 1e-12);
        }
        let ball5 = ConvexBody::ball(Point::zeros(5), 1.0).unwrap();
        let a = exposed_points_sample(&ball5, 8, &tols()).unwrap();
        assert_eq!(a, exposed_points_sample(&ball5, 8, &tols()).unwrap());
    }

    #[test]
    fn projections() {
        let r = project(&square(), &pt![2, 2], &tols()).unwrap();
        assert!(close(&r.point, &pt![1, 1]));
        assert!(r.residual <= 1e-8);
        let r = project(&square(), &pt![0.3, -0.2], &tols()).unwrap();
        assert_eq!(r.point, pt![0.3, -0.2]);
        assert_eq!(r.residual, 0.0);
        let r = project(&disk(), &pt![3, 0], &tols()).unwrap();
        assert_eq!(r.point, pt![1, 0]);
        assert!(r.residual <= 1e-12);
        let r = project(&disk(), &pt![0.1, 0.2], &tols()).unwrap();
        assert_eq!(r.point, pt![0.1, 0.2]);
    }

    #[test]
    fn projection_cap_reports_best_iterate() {
        let poly = ConvexBody::polytope(vec![
            pt![0, 0],
            pt![1, 0],
            pt![0, 1],
            pt![1, 1],
            pt![0.5, 2],
        ])
        .unwrap();
        let t = Tolerances {
            max_iter: Some(0),
            ..tols()
        };
        match project(&poly, &pt![3, 3], &t) {
            Err(Error::NotConverged { residual, .. }) => assert!(residual > 1e-8),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn square_normal_cones() {
        let s = square();
        assert!(normal_cone_contains(&s, &pt![1, 1], &pt![0.5, 2], 1e-12).unwrap());
        assert!(normal_cone_contains(&s, &pt![0, 1], &pt![0, 1], 1e-12).unwrap());
        assert!(!normal_cone_contains(&s, &pt![0, 1], &pt![0.1, 1], 1e-12).unwrap());
        assert!(normal_cone_contains(&s, &pt![0.2, 0.1], &pt![0, 0], 1e-12).unwrap());
        assert!(!normal_cone_contains(&s, &pt![0.2, 0.1], &pt![0, 1e-3], 1e-12).unwrap());
        assert!(matches!(
            normal_cone_contains(&s, &pt![3, 0], &pt![1, 0], 1e-12),
            Err(Error::NotInBody { .. })
        ));
    }

    #[test]
    fn ball_normal_cones() {
        let b = disk();
        assert!(normal_cone_contains(&b, &pt![1, 0], &pt![2, 0], 1e-12).unwrap());
        assert!(!normal_cone_contains(&b, &pt![1, 0], &pt![2, 0.1], 1e-9).unwrap());
        assert!(!normal_cone_contains(&b, &pt![1, 0], &pt![-1, 0], 1e-9).unwrap());
        assert!(!normal_cone_contains(&b, &pt![0.5, 0], &pt![1, 0], 1e-9).unwrap());
    }

    #[test]
    fn gauss_map() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(gauss_map_contains(&square(), &pt![1, 1], &pt![h, h], 1e-12).unwrap());
        assert!(!gauss_map_contains(&square(), &pt![1, 1], &pt![1, 1], 1e-12).unwrap());
        assert!(gauss_map_contains(&disk(), &pt![1, 0], &pt![1, 0], 1e-12).unwrap());
    }

    #[test]
    fn partition_cells() {
        let t = tols();
        assert!(close(
            &locate_partition_cell(&square(), &pt![2, 2], &t).unwrap(),
            &pt![1, 1]
        ));
        assert!(close(
            &locate_partition_cell(&square(), &pt![0, 5], &t).unwrap(),
            &pt![0, 1]
        ));
        assert_eq!(
            locate_partition_cell(&square(), &pt![0, 0], &t),
            Err(Error::InsideBody)
        );
    }

    #[test]
    fn farthest() {
        let t = tols();
        let f = farthest_points(&square(), &pt![0.5, 0.5], &t).unwrap();
        assert_eq!(f.points, vec![pt![-1, -1]]);
        let f = farthest_points(&square(), &pt![0, 0], &t).unwrap();
        assert_eq!(f.points.len(), 4);
        let f = farthest_points(&disk(), &pt![2, 0], &t).unwrap();
        assert_eq!(f.points, vec![pt![-1, 0]]);
        let f = farthest_points(&disk(), &pt![0, 0], &t).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.points.len(), DEFAULT_EXPOSED_SAMPLES);
    }

    #[test]
    fn exposedness() {
        let t = tols();
        for v in [pt![1, 1], pt![-1, 1], pt![-1, -1], pt![1, -1]] {
            let c = exposing_functional(&square(), &v, &t).unwrap().unwrap();
            assert!(c.dot(&v) > 0.0);
        }
        assert!(!is_exposed(&square(), &pt![0, 1], &t).unwrap());
        let with_center =
            ConvexBody::polytope(vec![pt![1, 1], pt![-1, -1], pt![0, 0], pt![1, -1]]).unwrap();
        assert!(!is_exposed(&with_center, &pt![0, 0], &t).unwrap());
        assert!(is_exposed(&disk(), &pt![0, -1], &t).unwrap());
        assert!(!is_exposed(&disk(), &pt![0, -0.5], &t).unwrap());
    }
}
