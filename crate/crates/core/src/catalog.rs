//! Built-in examples, all in dimension 2.

use std::sync::Arc;

use crate::atlas::ChartTransition;
use crate::connections::NonlinearConnection;
use crate::domain::{ConicDomain, SamplerSpec};
use crate::error::{Error, Result};
use crate::field::{DiffEngine, TensorField};
use crate::metrics::{wick_metric, AnisotropicMetric, Lagrangian};

/// Names accepted by [`example`]; `wick(k)` takes any real `k`.
pub const EXAMPLE_NAMES: [&str; 7] = [
    "euclidean2",
    "minkowski2",
    "conformal2",
    "quartic2",
    "wick(k)",
    "handmadeN",
    "quadchart",
];

const X_BOX: (f64, f64) = (-1.0, 1.0);
const Y_RADII: (f64, f64) = (0.5, 2.0);

pub fn plane() -> Arc<ConicDomain> {
    Arc::new(ConicDomain::slit("plane", vec![X_BOX; 2], Y_RADII))
}

/// The timelike cone `(y^2)^2 > (y^1)^2`; samples keep away from its
/// boundary.
pub fn timelike_cone() -> Arc<ConicDomain> {
    Arc::new(ConicDomain::new(
        "timelike",
        2,
        |_, y| y[1] * y[1] > y[0] * y[0],
        SamplerSpec::Box {
            x_box: vec![X_BOX; 2],
            y_radii: Y_RADII,
            excluded: vec![Arc::new(|d: &[f64]| d[1] * d[1] - d[0] * d[0] < 0.2)],
        },
    ))
}

/// `y^1 y^2 != 0`; samples avoid a cone around each axis.
pub fn off_axes() -> Arc<ConicDomain> {
    Arc::new(ConicDomain::new(
        "off-axes",
        2,
        |_, y| y[0] * y[1] != 0.0,
        SamplerSpec::Box {
            x_box: vec![X_BOX; 2],
            y_radii: Y_RADII,
            excluded: vec![Arc::new(|d: &[f64]| d[0].abs() < 0.2 || d[1].abs() < 0.2)],
        },
    ))
}

pub fn euclidean2(engine: DiffEngine) -> Lagrangian {
    let f = TensorField::analytic("euclidean2", (0, 0), 2.0, plane(), |_, y| {
        vec![&y[0] * &y[0] + &y[1] * &y[1]]
    });
    Lagrangian::new(f, engine).expect("scalar of degree 2")
}

pub fn minkowski2(engine: DiffEngine) -> Lagrangian {
    let f = TensorField::analytic("minkowski2", (0, 0), 2.0, timelike_cone(), |_, y| {
        vec![&y[1] * &y[1] - &y[0] * &y[0]]
    });
    Lagrangian::new(f, engine).expect("scalar of degree 2")
}

/// `e^{2 x^1} |y|^2`.
pub fn conformal2(engine: DiffEngine) -> Lagrangian {
    let f = TensorField::analytic("conformal2", (0, 0), 2.0, plane(), |x, y| {
        vec![(&x[0] * 2.0).exp() * (&y[0] * &y[0] + &y[1] * &y[1])]
    });
    Lagrangian::new(f, engine).expect("scalar of degree 2")
}

/// `sqrt((y^1)^4 + (y^2)^4)`.
pub fn quartic2(engine: DiffEngine) -> Lagrangian {
    let f = TensorField::analytic("quartic2", (0, 0), 2.0, off_axes(), |_, y| {
        vec![(y[0].powi(4) + y[1].powi(4)).sqrt()]
    });
    Lagrangian::new(f, engine).expect("scalar of degree 2")
}

/// `N^1_1 = y^2`, all other coefficients zero.
pub fn handmade_n() -> NonlinearConnection {
    NonlinearConnection::new(TensorField::analytic(
        "handmadeN",
        (1, 1),
        1.0,
        plane(),
        |_, y| {
            let z = &y[0] * 0.0;
            vec![y[1].clone(), z.clone(), z.clone(), z]
        },
    ))
    .expect("type (1, 1), degree 1")
}

/// `x~ = (x^1 + (x^2)^2, x^2)`.
pub fn quadchart() -> ChartTransition {
    ChartTransition::quadratic_shear("quadchart", 1.0)
}

/// Every built-in Lagrangian, by name.
pub fn lagrangians(engine: DiffEngine) -> Vec<(&'static str, Lagrangian)> {
    vec![
        ("euclidean2", euclidean2(engine)),
        ("minkowski2", minkowski2(engine)),
        ("conformal2", conformal2(engine)),
        ("quartic2", quartic2(engine)),
    ]
}

/// Parses `wick(k)`.
pub fn parse_wick(name: &str) -> Option<f64> {
    let inner = name.strip_prefix("wick(")?.strip_suffix(')')?;
    inner.trim().parse::<f64>().ok().filter(|k| k.is_finite())
}

/// A named example with the objects it provides.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub domain: Arc<ConicDomain>,
    pub lagrangian: Option<Lagrangian>,
    pub metric: Option<AnisotropicMetric>,
    pub kappa: Option<f64>,
    pub nonlinear: Option<NonlinearConnection>,
    pub transition: Option<ChartTransition>,
}

impl Example {
    fn new(name: &str, domain: Arc<ConicDomain>) -> Self {
        Example {
            name: name.to_string(),
            domain,
            lagrangian: None,
            metric: None,
            kappa: None,
            nonlinear: None,
            transition: None,
        }
    }

    fn with_lagrangian(name: &str, l: Lagrangian) -> Self {
        let mut e = Example::new(name, l.domain().clone());
        e.lagrangian = Some(l);
        e
    }

    /// Whether the Lagrangian is quadratic in `y`.
    pub fn is_riemannian(&self) -> bool {
        matches!(
            self.name.as_str(),
            "euclidean2" | "minkowski2" | "conformal2"
        )
    }
}

pub fn example(name: &str, engine: DiffEngine) -> Result<Example> {
    Ok(match name {
        "euclidean2" => Example::with_lagrangian(name, euclidean2(engine)),
        "minkowski2" => Example::with_lagrangian(name, minkowski2(engine)),
        "conformal2" => Example::with_lagrangian(name, conformal2(engine)),
        "quartic2" => Example::with_lagrangian(name, quartic2(engine)),
        "handmadeN" => {
            let mut e = Example::new(name, plane());
            e.nonlinear = Some(handmade_n());
            e
        }
        "quadchart" => {
            let mut e = Example::new(name, plane());
            e.transition = Some(quadchart());
            e
        }
        other => {
            let kappa =
                parse_wick(other).ok_or_else(|| Error::UnknownExample(other.to_string()))?;
            let l = euclidean2(engine);
            let mut e = Example::with_lagrangian(other, l.clone());
            e.metric = Some(wick_metric(&l, kappa)?);
            e.kappa = Some(kappa);
            e
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{legendre_of, Lagrangian};

    #[test]
    fn lagrangians_validate() {
        for (name, l) in lagrangians(DiffEngine::analytic()) {
            let l = Lagrangian::checked(l.field().clone(), *l.engine())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            legendre_of(&l).unwrap();
        }
    }

    #[test]
    fn example_lookup() {
        let e = example("wick(-2)", DiffEngine::analytic()).unwrap();
        assert_eq!(e.kappa, Some(-2.0));
        assert!(e.metric.is_some());
        assert_eq!(parse_wick("wick( 0.5 )"), Some(0.5));
        assert!(matches!(
            example("nope", DiffEngine::analytic()),
            Err(Error::UnknownExample(_))
        ));
        assert!(example("wick(x)", DiffEngine::analytic()).is_err());
        assert!(example("quadchart", DiffEngine::analytic())
            .unwrap()
            .transition
            .is_some());
    }

    #[test]
    fn quartic_fundamental_tensor() {
        let l = quartic2(DiffEngine::analytic());
        let phi = l.fundamental().evaluate(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let r = std::f64::consts::SQRT_2;
        for (a, b) in phi.iter().zip([r, -1.0 / r, -1.0 / r, r]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(l.fundamental().evaluate(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
