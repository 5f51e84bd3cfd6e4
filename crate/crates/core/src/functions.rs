//! Serializable descriptions of objectives, operators and bifunctions, so
//! problems can be stored in instance files and rebuilt into evaluators.

use serde::{Deserialize, Serialize};

use crate::equilibrium::Bifunction;
use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: f64,
}

impl AffinePiece {
    fn eval(&self, x: &Point) -> f64 {
        self.a
            .iter()
            .zip(x.coords())
            .map(|(a, x)| a * x)
            .sum::<f64>()
            + self.b
    }
}

/// A scalar objective `f: ℝⁿ → ℝ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarFn {
    Constant {
        value: f64,
    },
    /// `⟨c, x⟩ + b`
    Linear {
        c: Vec<f64>,
        #[serde(default)]
        b: f64,
    },
    /// `‖x − center‖²`
    SquaredNorm {
        center: Vec<f64>,
    },
    /// `−‖x − center‖²`
    NegSquaredNorm {
        center: Vec<f64>,
    },
    /// `max{0, ⟨c, x⟩}`
    PositivePart {
        c: Vec<f64>,
    },
    /// `−‖x − x*‖`
    NegDistance {
        xstar: Vec<f64>,
    },
    /// `max_i ⟨a_i, x⟩ + b_i`
    MaxAffine {
        pieces: Vec<AffinePiece>,
    },
    /// `−max_i ⟨a_i, x⟩ + b_i`
    NegMaxAffine {
        pieces: Vec<AffinePiece>,
    },
}

fn dist_sq(x: &Point, c: &[f64]) -> f64 {
    x.coords()
        .iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn max_affine(pieces: &[AffinePiece], x: &Point) -> f64 {
    pieces
        .iter()
        .map(|p| p.eval(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn check_len(what: &str, v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::InvalidInput(format!(
            "{what} has {} entries, expected {dim}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} has a non-finite entry"
        )));
    }
    Ok(())
}

impl ScalarFn {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            ScalarFn::Constant { value } => *value,
            ScalarFn::Linear { c, b } => {
                c.iter().zip(x.coords()).map(|(c, x)| c * x).sum::<f64>() + b
            }
            ScalarFn::SquaredNorm { center } => dist_sq(x, center),
            ScalarFn::NegSquaredNorm { center } => -dist_sq(x, center),
            ScalarFn::PositivePart { c } => c
                .iter()
                .zip(x.coords())
                .map(|(c, x)| c * x)
                .sum::<f64>()
                .max(0.0),
            ScalarFn::NegDistance { xstar } => -dist_sq(x, xstar).sqrt(),
            ScalarFn::MaxAffine { pieces } => max_affine(pieces, x),
            ScalarFn::NegMaxAffine { pieces } => -max_affine(pieces, x),
        }
    }

    /// Whether every superlevel set is convex.
    pub fn is_quasiconcave(&self) -> bool {
        !matches!(
            self,
            ScalarFn::SquaredNorm { .. } | ScalarFn::MaxAffine { .. }
        )
    }

    /// All shipped objectives are continuous.
    pub fn is_usc(&self) -> bool {
        true
    }

    pub fn label(&self) -> String {
        match self {
            ScalarFn::Constant { value } => format!("f(x) = {value}"),
            ScalarFn::Linear { .. } => "f(x) = <c,x> + b".into(),
            ScalarFn::SquaredNorm { .. } => "f(x) = |x - c|^2".into(),
            ScalarFn::NegSquaredNorm { .. } => "f(x) = -|x - c|^2".into(),
            ScalarFn::PositivePart { .. } => "f(x) = max(0, <c,x>)".into(),
            ScalarFn::NegDistance { .. } => "f(x) = -|x - x*|".into(),
            ScalarFn::MaxAffine { .. } => "f(x) = max_i <a_i,x> + b_i".into(),
            ScalarFn::NegMaxAffine { .. } => "f(x) = -max_i <a_i,x> + b_i".into(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ScalarFn::Constant { value } if value.is_finite() => Ok(()),
            ScalarFn::Constant { .. } => Err(Error::InvalidInput("constant is not finite".into())),
            ScalarFn::Linear { c, b } => {
                check_len("c", c, dim)?;
                check_len("b", &[*b], 1)
            }
            ScalarFn::SquaredNorm { center } | ScalarFn::NegSquaredNorm { center } => {
                check_len("center", center, dim)
            }
            ScalarFn::PositivePart { c } => check_len("c", c, dim),
            ScalarFn::NegDistance { xstar } => check_len("xstar", xstar, dim),
            ScalarFn::MaxAffine { pieces } | ScalarFn::NegMaxAffine { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::InvalidInput(
                        "max-affine needs at least one piece".into(),
                    ));
                }
                for p in pieces {
                    check_len("a", &p.a, dim)?;
                    check_len("b", &[p.b], 1)?;
                }
                Ok(())
            }
        }
    }
}

/// An operator `T: ℝⁿ → ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorSpec {
    /// `T(x) = x − x*`
    Residual {
        xstar: Vec<f64>,
    },
    Constant {
        c: Vec<f64>,
    },
    /// `T(x) = M x + q`, `matrix` given row by row.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
}

impl OperatorSpec {
    pub fn apply(&self, x: &Point) -> Vec<f64> {
        match self {
            OperatorSpec::Residual { xstar } => {
                x.coords().iter().zip(xstar).map(|(a, b)| a - b).collect()
            }
            OperatorSpec::Constant { c } => c.clone(),
            OperatorSpec::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, q)| row.iter().zip(x.coords()).map(|(m, x)| m * x).sum::<f64>() + q)
                .collect(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            OperatorSpec::Residual { xstar } => check_len("xstar", xstar, dim),
            OperatorSpec::Constant { c } => check_len("c", c, dim),
            OperatorSpec::Affine { matrix, offset } => {
                check_len("offset", offset, dim)?;
                if matrix.len() != dim {
                    return Err(Error::InvalidInput(format!(
                        "matrix has {} rows, expected {dim}",
                        matrix.len()
                    )));
                }
                matrix
                    .iter()
                    .try_for_each(|row| check_len("matrix row", row, dim))
            }
        }
    }
}

/// A bifunction family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BifunctionKind {
    /// `g(u, v) = f(u) − f(v) − shift`
    Potential {
        f: ScalarFn,
        #[serde(default)]
        shift: f64,
    },
    /// `g(u, v) = ⟨v − u, x* − u⟩`
    BestApproximation { xstar: Vec<f64> },
    /// `g(u, v) = ⟨T(u), u − v⟩`
    Variational { operator: OperatorSpec },
    /// `g(u, v) = max_i ⟨a_i, v − u⟩ − shift`
    MaxAffineGap {
        directions: Vec<Vec<f64>>,
        #[serde(default)]
        shift: f64,
    },
}

/// A bifunction family plus optional overrides of the properties it would
/// otherwise declare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifunctionSpec {
    #[serde(flatten)]
    pub kind: BifunctionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasiconvex: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsc: Option<bool>,
}

impl From<BifunctionKind> for BifunctionSpec {
    fn from(kind: BifunctionKind) -> Self {
        BifunctionSpec {
            kind,
            quasiconvex: None,
            lsc: None,
        }
    }
}

impl BifunctionSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match &self.kind {
            BifunctionKind::Potential { f, shift } => {
                f.validate(dim)?;
                check_len("shift", &[*shift], 1)
            }
            BifunctionKind::BestApproximation { xstar } => check_len("xstar", xstar, dim),
            BifunctionKind::Variational { operator } => operator.validate(dim),
            BifunctionKind::MaxAffineGap { directions, shift } => {
                if directions.is_empty() {
                    return Err(Error::InvalidInput(
                        "max-affine-gap needs a direction".into(),
                    ));
                }
                check_len("shift", &[*shift], 1)?;
                directions
                    .iter()
                    .try_for_each(|d| check_len("direction", d, dim))
            }
        }
    }

    /// Builds the evaluator. Properties follow from the family unless
    /// overridden.
    pub fn build(&self) -> Result<Bifunction> {
        let g = match self.kind.clone() {
            BifunctionKind::Potential { f, shift } => {
                let label = f.label();
                let (qc, usc) = (f.is_quasiconcave(), f.is_usc());
                Bifunction::from_potential(label, move |x| f.eval(x), qc, usc).map_shift(shift)
            }
            BifunctionKind::BestApproximation { xstar } => {
                Bifunction::best_approximation(Point::new(xstar)?)
            }
            BifunctionKind::Variational { operator } => {
                Bifunction::variational("<T(u), u - v>", move |x| operator.apply(x))
            }
            BifunctionKind::MaxAffineGap { directions, shift } => {
                Bifunction::new("max_i <a_i, v - u> - s", move |u, v| {
                    directions
                        .iter()
                        .map(|a| {
                            a.iter()
                                .zip(u.coords().iter().zip(v.coords()))
                                .map(|(a, (x, y))| a * (y - x))
                                .sum::<f64>()
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                        - shift
                })
                .quasiconvex_in_second(true)
                .lsc_in_second(true)
            }
        };
        let qc = self.quasiconvex.unwrap_or(g.declared_quasiconvex_2nd);
        let lsc = self.lsc.unwrap_or(g.declared_lsc_2nd);
        Ok(g.quasiconvex_in_second(qc).lsc_in_second(lsc))
    }
}

impl Bifunction {
    fn map_shift(self, shift: f64) -> Bifunction {
        if shift == 0.0 {
            return self;
        }
        let (qc, lsc) = (self.declared_quasiconvex_2nd, self.declared_lsc_2nd);
        let label = format!("{} - {shift}", self.label);
        Bifunction::new(label, move |u, v| self.eval(u, v) - shift)
            .quasiconvex_in_second(qc)
            .lsc_in_second(lsc)
    }
}
