//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use conveq::Point;
use nalgebra::{DMatrix, DVector};

/// Nearest point of `conv generators` to `x`, found by projecting onto the
/// affine hull of every affinely independent subset of at most `max_size`
/// generators and keeping the hits inside their simplex. Exact up to
/// rounding; exponential in `max_size`, so only for small inputs.
pub fn nearest_by_simplices(generators: &[Point], x: &Point, max_size: usize) -> (Point, f64) {
    let mut best = (generators[0].clone(), f64::INFINITY);
    let mut subset = Vec::with_capacity(max_size);
    visit(generators, x, max_size, 0, &mut subset, &mut best);
    best
}

fn visit(
    gens: &[Point],
    x: &Point,
    max_size: usize,
    start: usize,
    subset: &mut Vec<usize>,
    best: &mut (Point, f64),
) {
    if !subset.is_empty() {
        if let Some(p) = simplex_projection(gens, subset, x) {
            let d = p.distance(x);
            if d < best.1 {
                *best = (p, d);
            }
        }
    }
    if subset.len() == max_size {
        return;
    }
    for i in start..gens.len() {
        subset.push(i);
        visit(gens, x, max_size, i + 1, subset, best);
        subset.pop();
    }
}

/// Projection of `x` onto the affine hull of the chosen generators when it
/// lands inside their simplex.
fn simplex_projection(gens: &[Point], idx: &[usize], x: &Point) -> Option<Point> {
    let p0 = gens[idx[0]].coords();
    let n = p0.len();
    let k = idx.len() - 1;
    if k == 0 {
        return Some(gens[idx[0]].clone());
    }
    if k > n {
        return None;
    }
    let a = DMatrix::from_fn(n, k, |r, c| gens[idx[c + 1]].coords()[r] - p0[r]);
    let rhs = DVector::from_fn(n, |r, _| x.coords()[r] - p0[r]);
    let gram = a.transpose() * &a;
    let scale = gram.diagonal().max();
    let svd = gram.clone().svd(false, false);
    if svd.singular_values.min() <= 1e-10 * scale {
        return None;
    }
    let mu = gram.cholesky()?.solve(&(a.transpose() * rhs));
    let lead = 1.0 - mu.sum();
    if lead < -1e-12 || mu.iter().any(|m| *m < -1e-12) {
        return None;
    }
    let q = DVector::from_column_slice(p0) + a * mu;
    Point::new(q.iter().copied().collect()).ok()
}
