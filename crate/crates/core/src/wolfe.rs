//! Wolfe's minimum-norm-point iteration over a finite point set.
//!
//! The nearest point of `conv M` to a target `x*` is `x* + z` where `z` is the
//! minimum-norm point of `conv (M - x*)`. The iterate is kept as a convex
//! combination over a "corral" of affinely independent generators.

use nalgebra::{DMatrix, DVector};

use crate::point::Point;

const ZERO_WEIGHT: f64 = 1e-14;
const REL_STOP: f64 = 1e-15;

#[derive(Debug, Clone)]
pub(crate) struct MinNorm {
    /// `(generator index, convex weight)` over the final corral.
    pub weights: Vec<(usize, f64)>,
    pub iterations: usize,
    pub hit_cap: bool,
}

impl MinNorm {
    pub fn point(&self, generators: &[Point]) -> Point {
        let dim = generators[0].dim();
        let mut acc = vec![0.0; dim];
        for &(i, w) in &self.weights {
            for (a, c) in acc.iter_mut().zip(generators[i].coords()) {
                *a += w * c;
            }
        }
        Point::from_vec_unchecked(acc)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(shifted: &[Vec<f64>], corral: &[usize], lambda: &[f64]) -> Vec<f64> {
    let dim = shifted[0].len();
    let mut x = vec![0.0; dim];
    for (&i, &w) in corral.iter().zip(lambda) {
        for (xk, pk) in x.iter_mut().zip(&shifted[i]) {
            *xk += w * pk;
        }
    }
    x
}

/// Affine weights (summing to one) of the minimum-norm point of `aff corral`.
fn affine_minimizer(shifted: &[Vec<f64>], corral: &[usize]) -> Vec<f64> {
    let k = corral.len();
    if k == 1 {
        return vec![1.0];
    }
    let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (a, &i) in corral.iter().enumerate() {
        for (b, &j) in corral.iter().enumerate().skip(a) {
            let g = dot(&shifted[i], &shifted[j]);
            m[(a, b)] = g;
            m[(b, a)] = g;
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;

    let solved = m
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()));
    let sol = match solved {
        Some(s) => s,
        None => {
            // affinely dependent corral: fall back to the pseudo-inverse
            let svd = m.svd(true, true);
            let eps = 1e-13 * svd.singular_values.max().max(1.0);
            match svd.solve(&rhs, eps) {
                Ok(s) => s,
                Err(_) => {
                    let mut w = vec![0.0; k];
                    w[k - 1] = 1.0;
                    return w;
                }
            }
        }
    };
    let mut alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    let sum: f64 = alpha.iter().sum();
    if sum.abs() > 0.0 && sum.is_finite() {
        alpha.iter_mut().for_each(|a| *a /= sum);
    }
    alpha
}

/// Runs Wolfe's algorithm for the nearest point of `conv generators` to `target`.
/// `max_iter` bounds the number of major iterations.
pub(crate) fn nearest_in_hull(generators: &[Point], target: &Point, max_iter: usize) -> MinNorm {
    let shifted: Vec<Vec<f64>> = generators.iter().map(|g| (g - target).into_vec()).collect();
    let scale = shifted
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let start = (0..shifted.len())
        .min_by(|&a, &b| dot(&shifted[a], &shifted[a]).total_cmp(&dot(&shifted[b], &shifted[b])))
        .expect("nonempty generator list");
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = shifted[start].clone();
    let mut iterations = 0;
    let mut hit_cap = false;

    loop {
        let xx = dot(&x, &x);
        if xx <= REL_STOP * scale {
            break;
        }
        let (j, xpj) = shifted
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot(&x, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty generator list");
        if xx - xpj <= REL_STOP * scale || corral.contains(&j) {
            break;
        }
        if iterations >= max_iter {
            hit_cap = true;
            break;
        }
        iterations += 1;
        corral.push(j);
        lambda.push(0.0);

        // minor cycle: each pass either accepts the affine minimizer or drops
        // at least one corral member, so it runs at most |corral| times
        loop {
            let alpha = affine_minimizer(&shifted, &corral);
            if alpha.iter().all(|&a| a > ZERO_WEIGHT) {
                lambda = alpha;
                x = combine(&shifted, &corral, &lambda);
                break;
            }
            let theta = corral
                .iter()
                .enumerate()
                .filter(|&(a, _)| alpha[a] <= ZERO_WEIGHT)
                .map(|(a, _)| {
                    let denom = lambda[a] - alpha[a];
                    if denom > 0.0 {
                        lambda[a] / denom
                    } else {
                        0.0
                    }
                })
                .fold(1.0_f64, f64::min)
                .clamp(0.0, 1.0);
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (&c, &l) in corral.iter().zip(&lambda) {
                if l > ZERO_WEIGHT {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.len() == corral.len() {
                // no weight vanished numerically; drop the smallest to make progress
                let (min_a, _) = lambda
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("nonempty corral");
                keep_c.remove(min_a);
                keep_l.remove(min_a);
            }
            if keep_c.is_empty() {
                keep_c.push(j);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            keep_l.iter_mut().for_each(|l| *l /= total);
            corral = keep_c;
            lambda = keep_l;
            x = combine(&shifted, &corral, &lambda);
            if corral.len() == 1 {
                break;
            }
        }
    }

    MinNorm {
        weights: corral.into_iter().zip(lambda).collect(),
        iterations,
        hit_cap,
    }
}
