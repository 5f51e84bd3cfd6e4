use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Numerical tolerances shared by the geometric and equilibrium routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Feasibility: membership residuals and projection certificates.
    pub feas: f64,
    /// Two points closer than this are the same point.
    pub pt: f64,
    /// Slack in equilibrium inequalities `g(x⁰, x) ≤ tol`.
    pub eq: f64,
    /// Major-iteration cap for the projection solver; `None` means
    /// `10 · |generators| · n`.
    pub max_iter: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-8,
            pt: 1e-12,
            eq: 1e-9,
            max_iter: None,
        }
    }
}

impl Tolerances {
    pub fn max_iter_for(&self, generators: usize, dim: usize) -> usize {
        self.max_iter.unwrap_or(10 * generators.max(1) * dim.max(1))
    }
}

/// A compact convex set: the convex hull of finitely many generators, or a
/// closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ConvexBody {
    Polytope { generators: Vec<Point> },
    Ball { center: Point, radius: f64 },
}

impl ConvexBody {
    /// `conv generators`. Generators must share a dimension and be pairwise
    /// distinct (at the default point tolerance).
    pub fn polytope(generators: Vec<Point>) -> Result<Self> {
        let body = ConvexBody::Polytope { generators };
        body.validate(&Tolerances::default())?;
        Ok(body)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let body = ConvexBody::Ball { center, radius };
        body.validate(&Tolerances::default())?;
        Ok(body)
    }

    /// The square `[-1,1]^2` as the hull of its four corners.
    pub fn unit_square() -> Self {
        let g = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        ConvexBody::Polytope {
            generators: g
                .iter()
                .map(|c| Point::from_vec_unchecked(c.to_vec()))
                .collect(),
        }
    }

    /// The interval `[lo, hi]` as the hull of its endpoints.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::polytope(vec![Point::new(vec![lo])?, Point::new(vec![hi])?])
    }

    /// Re-checks the structural invariants. Deserialized bodies should be
    /// validated before use.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        match self {
            ConvexBody::Polytope { generators } => {
                let first = generators.first().ok_or_else(|| {
                    Error::InvalidBody("polytope needs at least one generator".into())
                })?;
                let dim = first.dim();
                for g in generators {
                    g.check_dim(dim)?;
                    if let Some(index) = g.coords().iter().position(|c| !c.is_finite()) {
                        return Err(Error::NonFinitePoint { index });
                    }
                }
                for (i, a) in generators.iter().enumerate() {
                    for (j, b) in generators.iter().enumerate().skip(i + 1) {
                        if a.distance(b) <= tol.pt {
                            return Err(Error::InvalidBody(format!(
                                "generators {i} and {j} coincide at {a}"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ConvexBody::Ball { center, radius } => {
                if let Some(index) = center.coords().iter().position(|c| !c.is_finite()) {
                    return Err(Error::NonFinitePoint { index });
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidBody(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope { generators } => generators[0].dim(),
            ConvexBody::Ball { center, .. } => center.dim(),
        }
    }

    pub fn generators(&self) -> Option<&[Point]> {
        match self {
            ConvexBody::Polytope { generators } => Some(generators),
            ConvexBody::Ball { .. } => None,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, ConvexBody::Ball { .. })
    }

    /// Axis-aligned bounding box as `(min corner, max corner)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            ConvexBody::Polytope { generators } => {
                let dim = self.dim();
                let mut lo = vec![f64::INFINITY; dim];
                let mut hi = vec![f64::NEG_INFINITY; dim];
                for g in generators {
                    for (k, c) in g.coords().iter().enumerate() {
                        lo[k] = lo[k].min(*c);
                        hi[k] = hi[k].max(*c);
                    }
                }
                (Point::from_vec_unchecked(lo), Point::from_vec_unchecked(hi))
            }
            ConvexBody::Ball { center, radius } => (
                Point::from_vec_unchecked(center.coords().iter().map(|c| c - radius).collect()),
                Point::from_vec_unchecked(center.coords().iter().map(|c| c + radius).collect()),
            ),
        }
    }

    /// `max_{x ∈ S} ⟨d, x⟩`.
    pub fn support(&self, d: &Point) -> f64 {
        match self {
            ConvexBody::Polytope { generators } => generators
                .iter()
                .map(|g| g.dot(d))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::Ball { center, radius } => center.dot(d) + radius * d.norm(),
        }
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        p.check_dim(self.dim())
    }
}
