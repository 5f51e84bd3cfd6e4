//! Seeded random generators for bodies and points. Every randomized routine
//! in the crate draws from a [`ChaCha8Rng`] built from an explicit seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::body::{ConvexBody, Tolerances};
use crate::geometry;
use crate::point::Point;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the box `[-half_width, half_width]^dim`.
pub fn point_in_box<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> Point {
    Point::from_vec_unchecked(
        (0..dim)
            .map(|_| rng.gen_range(-half_width..=half_width))
            .collect(),
    )
}

/// Random convex weights with a flat Dirichlet distribution.
pub fn convex_weights<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.into_iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / count as f64; count]
    }
}

/// A random point of the body: a random convex combination of generators, or a
/// uniform point of the ball.
pub fn point_in_body<R: Rng>(rng: &mut R, body: &ConvexBody) -> Point {
    match body {
        ConvexBody::Polytope { generators } => {
            let w = convex_weights(rng, generators.len());
            let mut acc = vec![0.0; body.dim()];
            for (g, wi) in generators.iter().zip(w) {
                for (a, c) in acc.iter_mut().zip(g.coords()) {
                    *a += wi * c;
                }
            }
            Point::from_vec_unchecked(acc)
        }
        ConvexBody::Ball { center, radius } => {
            let n = center.dim();
            loop {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    continue;
                }
                let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
                return Point::from_vec_unchecked(
                    center
                        .coords()
                        .iter()
                        .zip(v)
                        .map(|(c, x)| c + r * x / norm)
                        .collect(),
                );
            }
        }
    }
}

/// A polytope with `count` distinct generators drawn uniformly from the box
/// `[-half_width, half_width]^dim`.
pub fn random_polytope<R: Rng>(
    rng: &mut R,
    dim: usize,
    count: usize,
    half_width: f64,
) -> ConvexBody {
    let mut generators: Vec<Point> = Vec::with_capacity(count);
    while generators.len() < count.max(1) {
        let p = point_in_box(rng, dim, half_width);
        if generators.iter().all(|g| g.distance(&p) > 1e-6) {
            generators.push(p);
        }
    }
    ConvexBody::Polytope { generators }
}

/// A polytope whose generator coordinates are integer multiples of `step`
/// inside `[-half_width, half_width]`.
pub fn random_lattice_polytope<R: Rng>(
    rng: &mut R,
    dim: usize,
    count: usize,
    half_width: f64,
    step: f64,
) -> ConvexBody {
    let k = (half_width / step).floor() as i64;
    let mut generators: Vec<Point> = Vec::with_capacity(count);
    let mut attempts = 0;
    while generators.len() < count.max(1) && attempts < 100 * count.max(1) {
        attempts += 1;
        let p = Point::from_vec_unchecked(
            (0..dim)
                .map(|_| rng.gen_range(-k..=k) as f64 * step)
                .collect(),
        );
        if !generators.contains(&p) {
            generators.push(p);
        }
    }
    ConvexBody::Polytope { generators }
}

/// Rejection-samples a point of `[-half_width, half_width]^dim` at distance
/// more than `tols.feas` from the body. Gives up after `10_000` tries.
pub fn exterior_point<R: Rng>(
    rng: &mut R,
    body: &ConvexBody,
    half_width: f64,
    tols: &Tolerances,
) -> Option<Point> {
    for _ in 0..10_000 {
        let p = point_in_box(rng, body.dim(), half_width);
        if geometry::distance(body, &p, tols).ok()? > tols.feas {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = random_polytope(&mut rng(7), 3, 5, 1.0);
        let b = random_polytope(&mut rng(7), 3, 5, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn samples_stay_in_body() {
        let mut r = rng(1);
        let ball = ConvexBody::ball(Point::zeros(3), 2.0).unwrap();
        let poly = random_polytope(&mut r, 2, 6, 1.0);
        for _ in 0..200 {
            assert!(point_in_body(&mut r, &ball).norm() <= 2.0 + 1e-12);
            let p = point_in_body(&mut r, &poly);
            assert!(geometry::contains(&poly, &p, 1e-9).unwrap());
        }
    }

    #[test]
    fn lattice_generators_are_on_lattice() {
        let poly = random_lattice_polytope(&mut rng(3), 2, 6, 1.0, 0.05);
        for g in poly.generators().unwrap() {
            for c in g.coords() {
                let k = c / 0.05;
                assert!((k - k.round()).abs() < 1e-9);
            }
        }
    }
}
