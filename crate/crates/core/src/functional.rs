//! Action functionals on the connection ladder and on metric-type objects,
//! with restriction, extension and gauge symmetrization.
//!
//! Integrals are replaced by fixed weighted sample sets.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::connections::{AnisotropicConnection, NonlinearConnection, Spray};
use crate::domain::{ConicDomain, Point};
use crate::error::{Error, Result};
use crate::field::{DiffEngine, TensorField};
use crate::linearconn::LinearConnection;
use crate::metrics::{AnisotropicMetric, Lagrangian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectLevel {
    Spray,
    Nonlinear,
    Anisotropic,
    Linear,
    Lagrangian,
    AnisMetric,
}

impl ObjectLevel {
    pub const ALL: [ObjectLevel; 6] = [
        ObjectLevel::Spray,
        ObjectLevel::Nonlinear,
        ObjectLevel::Anisotropic,
        ObjectLevel::Linear,
        ObjectLevel::Lagrangian,
        ObjectLevel::AnisMetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectLevel::Spray => "spray",
            ObjectLevel::Nonlinear => "nonlinear",
            ObjectLevel::Anisotropic => "anisotropic",
            ObjectLevel::Linear => "linear",
            ObjectLevel::Lagrangian => "lagrangian",
            ObjectLevel::AnisMetric => "anis-metric",
        }
    }
}

impl fmt::Display for ObjectLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectLevel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Shape(format!("unknown object level `{s}`")))
    }
}

/// An object a functional can be evaluated on.
#[derive(Debug, Clone)]
pub enum LadderObject {
    Spray(Spray),
    Nonlinear(NonlinearConnection),
    Anisotropic(AnisotropicConnection),
    Linear(LinearConnection),
    Lagrangian(Lagrangian),
    AnisMetric(AnisotropicMetric),
}

impl LadderObject {
    pub fn level(&self) -> ObjectLevel {
        match self {
            LadderObject::Spray(_) => ObjectLevel::Spray,
            LadderObject::Nonlinear(_) => ObjectLevel::Nonlinear,
            LadderObject::Anisotropic(_) => ObjectLevel::Anisotropic,
            LadderObject::Linear(_) => ObjectLevel::Linear,
            LadderObject::Lagrangian(_) => ObjectLevel::Lagrangian,
            LadderObject::AnisMetric(_) => ObjectLevel::AnisMetric,
        }
    }

    /// Coefficients at a point; `hat1` followed by `hat2` for linear
    /// connections.
    pub fn components(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        match self {
            LadderObject::Spray(g) => g.field().values(x, y),
            LadderObject::Nonlinear(n) => n.field().values(x, y),
            LadderObject::Anisotropic(c) => c.field().values(x, y),
            LadderObject::Linear(l) => {
                let mut v = l.hat1().values(x, y)?;
                v.extend(l.hat2().values(x, y)?);
                Ok(v)
            }
            LadderObject::Lagrangian(l) => l.field().values(x, y),
            LadderObject::AnisMetric(g) => g.field().values(x, y),
        }
    }

    fn mismatch(&self, expected: ObjectLevel) -> Error {
        Error::LevelMismatch {
            expected: expected.to_string(),
            found: self.level().to_string(),
        }
    }
}

pub type Density = Arc<dyn Fn(&LadderObject, &[f64], &[f64]) -> Result<f64> + Send + Sync>;
type ObjectMap = Arc<dyn Fn(&LadderObject) -> Result<LadderObject> + Send + Sync>;

/// Sample points with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} quadrature points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        Ok(Quadrature { points, weights })
    }

    /// `count` seeded samples of `domain`, each with weight `1 / count`.
    pub fn uniform(domain: &ConicDomain, count: usize, seed: u64) -> Result<Self> {
        let points = domain.samples(count, seed)?;
        let w = 1.0 / count as f64;
        Ok(Quadrature {
            weights: vec![w; points.len()],
            points,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Clone)]
pub struct ActionFunctional {
    level: ObjectLevel,
    density: Density,
    quadrature: Quadrature,
    engine: DiffEngine,
}

impl fmt::Debug for ActionFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionFunctional")
            .field("level", &self.level)
            .field("points", &self.quadrature.points.len())
            .finish_non_exhaustive()
    }
}

impl ActionFunctional {
    pub fn new(
        level: ObjectLevel,
        quadrature: Quadrature,
        density: impl Fn(&LadderObject, &[f64], &[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        ActionFunctional {
            level,
            density: Arc::new(density),
            quadrature,
            engine: DiffEngine::analytic(),
        }
    }

    /// Engine used by the ladder maps of restrictions and extensions.
    pub fn with_engine(mut self, engine: DiffEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn level(&self) -> ObjectLevel {
        self.level
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    fn composed(&self, level: ObjectLevel, map: ObjectMap) -> ActionFunctional {
        let inner = self.density.clone();
        ActionFunctional {
            level,
            density: Arc::new(move |obj, x, y| inner(&map(obj)?, x, y)),
            quadrature: self.quadrature.clone(),
            engine: self.engine,
        }
    }
}

/// `sum_k w_k density(obj, x_k, y_k)`.
pub fn evaluate_action(f: &ActionFunctional, obj: &LadderObject) -> Result<f64> {
    if obj.level() != f.level {
        return Err(obj.mismatch(f.level));
    }
    let q = &f.quadrature;
    q.points
        .iter()
        .zip(&q.weights)
        .map(|(p, w)| Ok(w * (f.density)(obj, &p.x, &p.y)?))
        .sum()
}

fn unsupported(from: ObjectLevel, to: ObjectLevel) -> Error {
    Error::UnsupportedTransition {
        from: from.to_string(),
        to: to.to_string(),
    }
}

fn check_level(f: &ActionFunctional, from: ObjectLevel) -> Result<()> {
    if f.level != from {
        return Err(Error::LevelMismatch {
            expected: f.level.to_string(),
            found: from.to_string(),
        });
    }
    Ok(())
}

macro_rules! expect {
    ($obj:expr, $variant:ident) => {
        match $obj {
            LadderObject::$variant(inner) => inner,
            other => return Err(other.mismatch(ObjectLevel::$variant)),
        }
    };
}

/// The canonical injection from `to` into `from`.
fn injection(from: ObjectLevel, to: ObjectLevel, engine: DiffEngine) -> Result<ObjectMap> {
    use ObjectLevel::*;
    Ok(match (from, to) {
        (Linear, Anisotropic) => Arc::new(|o: &LadderObject| {
            let c = expect!(o, Anisotropic);
            Ok(LadderObject::Linear(LinearConnection::embed_trivial(c)))
        }),
        (Anisotropic, Nonlinear) => Arc::new(move |o: &LadderObject| {
            let n = expect!(o, Nonlinear);
            Ok(LadderObject::Anisotropic(n.raise(&engine)))
        }),
        (Nonlinear, Spray) => Arc::new(move |o: &LadderObject| {
            let g = expect!(o, Spray);
            Ok(LadderObject::Nonlinear(g.raise(&engine)))
        }),
        (AnisMetric, Lagrangian) => Arc::new(|o: &LadderObject| {
            let l = expect!(o, Lagrangian);
            Ok(LadderObject::AnisMetric(AnisotropicMetric::new(
                l.fundamental().clone(),
            )?))
        }),
        _ => return Err(unsupported(from, to)),
    })
}

/// The projection from `to` down to `from`.
fn projection(from: ObjectLevel, to: ObjectLevel) -> Result<ObjectMap> {
    use ObjectLevel::*;
    Ok(match (from, to) {
        (Anisotropic, Linear) => Arc::new(|o: &LadderObject| {
            let l = expect!(o, Linear);
            Ok(LadderObject::Anisotropic(l.project_intrinsic()?))
        }),
        (Nonlinear, Anisotropic) => Arc::new(|o: &LadderObject| {
            let c = expect!(o, Anisotropic);
            Ok(LadderObject::Nonlinear(c.lower()))
        }),
        (Spray, Nonlinear) => Arc::new(|o: &LadderObject| {
            let n = expect!(o, Nonlinear);
            Ok(LadderObject::Spray(n.lower()))
        }),
        _ => return Err(unsupported(from, to)),
    })
}

/// Functional on the lower level `to` obtained by precomposing `f` with the
/// canonical injection.
pub fn restrict_functional(
    f: &ActionFunctional,
    from: ObjectLevel,
    to: ObjectLevel,
) -> Result<ActionFunctional> {
    let map = injection(from, to, f.engine)?;
    check_level(f, from)?;
    Ok(f.composed(to, map))
}

/// Functional on the higher level `to` obtained by precomposing `f0` with
/// the projection.
pub fn extend_functional(
    f0: &ActionFunctional,
    from: ObjectLevel,
    to: ObjectLevel,
) -> Result<ActionFunctional> {
    let map = projection(from, to)?;
    check_level(f0, from)?;
    Ok(f0.composed(to, map))
}

/// Precomposition with project-then-embed, which makes the functional blind
/// to residues at `level`.
pub fn gauge_symmetrize(f: &ActionFunctional, level: ObjectLevel) -> Result<ActionFunctional> {
    use ObjectLevel::*;
    check_level(f, level)?;
    let engine = f.engine;
    let map: ObjectMap = match level {
        Linear => Arc::new(|o: &LadderObject| {
            let l = expect!(o, Linear);
            Ok(LadderObject::Linear(LinearConnection::embed_trivial(
                &l.project_intrinsic()?,
            )))
        }),
        Anisotropic => Arc::new(move |o: &LadderObject| {
            let c = expect!(o, Anisotropic);
            Ok(LadderObject::Anisotropic(c.lower().raise(&engine)))
        }),
        Nonlinear => Arc::new(move |o: &LadderObject| {
            let n = expect!(o, Nonlinear);
            Ok(LadderObject::Nonlinear(n.lower().raise(&engine)))
        }),
        other => return Err(unsupported(other, other)),
    };
    Ok(f.composed(level, map))
}

/// A residue in the kernel of the Liouville contraction at `level`, built
/// from the coefficient array `c` and `e(y) = (-y^2, y^1)` (`n = 2`):
///
/// * nonlinear: `c^i e_j(y)`, 1-homogeneous, `c` of length 2
/// * anisotropic: `c^i_j e_k(y) / |y|`, 0-homogeneous, `c` of length 4
/// * linear (vertical part): `c^i_j e_k(y) / |y|^2`, (-1)-homogeneous
pub fn kernel_shift(
    level: ObjectLevel,
    c: &[f64],
    domain: Arc<ConicDomain>,
) -> Result<TensorField> {
    if domain.dim() != 2 {
        return Err(Error::Shape("kernel shifts are defined for n = 2".into()));
    }
    let (rank, alpha, len, power) = match level {
        ObjectLevel::Nonlinear => ((1, 1), 1.0, 2, 0),
        ObjectLevel::Anisotropic => ((1, 2), 0.0, 4, 1),
        ObjectLevel::Linear => ((1, 2), -1.0, 4, 2),
        other => return Err(unsupported(other, other)),
    };
    if c.len() != len {
        return Err(Error::Shape(format!(
            "{level} shift needs {len} coefficients"
        )));
    }
    let c = c.to_vec();
    Ok(TensorField::analytic(
        format!("shift[{level}]"),
        rank,
        alpha,
        domain,
        move |_, y| {
            let e = [-&y[1], y[0].clone()];
            let norm2 = &y[0] * &y[0] + &y[1] * &y[1];
            let scale = match power {
                0 => None,
                1 => Some(norm2.sqrt().recip()),
                _ => Some(norm2.recip()),
            };
            c.iter()
                .flat_map(|ci| {
                    e.iter()
                        .map(|ek| match &scale {
                            Some(s) => ek * s * *ci,
                            None => ek * *ci,
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        },
    ))
}
