//! Named objects of an example, for `eval` and `ladder`.

use finsler::atlas::{transform_nonlinear, transform_spray};
use finsler::catalog::Example;
use finsler::connections::{
    berwald_connection, canonical_nonlinear, canonical_spray, chern_connection, landsberg_tensor,
    nonlinear_residue, torsion, Spray,
};
use finsler::linearconn::cartan_tensor;
use finsler::metrics::lagrangian_of_metric;
use finsler::{vertical_derivative, DiffEngine, Error, Result, TensorField};

/// Object names understood by [`named_object`].
pub const OBJECT_NAMES: [&str; 12] = [
    "L",
    "ell",
    "phi",
    "g",
    "G",
    "N",
    "berwald",
    "chern",
    "landsberg",
    "cartan",
    "torsion",
    "residue",
];

fn missing(ex: &Example, what: &str) -> Error {
    Error::Shape(format!("example `{}` has no {what}", ex.name))
}

/// The spray an example carries: canonical for Lagrangians, `N/2 . y` for a
/// bare nonlinear connection, and the pushed-forward flat spray of a chart
/// transition.
pub fn example_spray(ex: &Example, engine: &DiffEngine) -> Result<Spray> {
    if let Some(l) = &ex.lagrangian {
        return canonical_spray(l, engine);
    }
    if let Some(n) = &ex.nonlinear {
        return Ok(n.lower());
    }
    if let Some(t) = &ex.transition {
        let flat = Spray::new(TensorField::zero((1, 0), 2.0, ex.domain.clone()))?;
        return transform_spray(&flat, t);
    }
    Err(missing(ex, "spray"))
}

pub fn named_object(ex: &Example, name: &str, engine: &DiffEngine) -> Result<TensorField> {
    let lagrangian = || {
        ex.lagrangian
            .as_ref()
            .ok_or_else(|| missing(ex, "Lagrangian"))
    };
    Ok(match name {
        "L" => match (&ex.metric, &ex.lagrangian) {
            (_, Some(l)) => l.field().clone(),
            (Some(g), None) => lagrangian_of_metric(g)?,
            _ => return Err(missing(ex, "Lagrangian")),
        },
        "ell" => vertical_derivative(lagrangian()?.field(), engine),
        "phi" => lagrangian()?.fundamental().clone(),
        "g" => ex
            .metric
            .as_ref()
            .ok_or_else(|| missing(ex, "metric"))?
            .field()
            .clone(),
        "G" => example_spray(ex, engine)?.into_field(),
        "N" => {
            if let Some(n) = &ex.nonlinear {
                n.field().clone()
            } else if let Some(l) = &ex.lagrangian {
                canonical_nonlinear(l, engine)?.into_field()
            } else if let Some(t) = &ex.transition {
                let flat = finsler::connections::NonlinearConnection::new(TensorField::zero(
                    (1, 1),
                    1.0,
                    ex.domain.clone(),
                ))?;
                transform_nonlinear(&flat, t)?.into_field()
            } else {
                return Err(missing(ex, "nonlinear connection"));
            }
        }
        "berwald" => berwald_connection(lagrangian()?, engine)?.into_field(),
        "chern" => chern_connection(lagrangian()?, engine)?.into_field(),
        "landsberg" => landsberg_tensor(lagrangian()?, engine)?,
        "cartan" => cartan_tensor(lagrangian()?, engine),
        "torsion" | "residue" => {
            let n = match &ex.nonlinear {
                Some(n) => n.clone(),
                None => canonical_nonlinear(lagrangian()?, engine)?,
            };
            if name == "torsion" {
                torsion(&n, engine)
            } else {
                nonlinear_residue(&n, engine)
            }
        }
        other => {
            return Err(Error::Shape(format!(
                "unknown object `{other}`; expected one of {}",
                OBJECT_NAMES.join(", ")
            )))
        }
    })
}
