//! Integration of `x' = y`, `y' = -2 G(x, y)` with the classical
//! fourth-order Runge-Kutta scheme.

use crate::connections::Spray;
use crate::domain::Point;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `steps + 1` states unless truncated.
    pub states: Vec<Point>,
    /// Set when a state or an intermediate stage left the domain.
    pub truncated: bool,
}

impl Trajectory {
    pub fn last(&self) -> &Point {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Integrates the geodesic flow of `g` from `(x0, y0)`.
///
/// Errors only if the initial state lies outside the domain; leaving the
/// domain later stops the integration and sets [`Trajectory::truncated`].
pub fn geodesic_integrate(
    g: &Spray,
    x0: &[f64],
    y0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    let field = g.field();
    let domain = field.domain().clone();
    domain.check(x0, y0)?;
    let n = x0.len();
    let rhs = |x: &[f64], y: &[f64]| -> Option<(Vec<f64>, Vec<f64>)> {
        if !domain.contains(x, y) {
            return None;
        }
        let acc = field.values(x, y).ok()?;
        Some((y.to_vec(), acc.iter().map(|a| -2.0 * a).collect()))
    };
    let shift = |base: &[f64], d: &[f64], h: f64| -> Vec<f64> {
        base.iter().zip(d).map(|(b, v)| b + h * v).collect()
    };

    let mut states = Vec::with_capacity(steps + 1);
    states.push(Point::new(x0, y0));
    let mut truncated = false;
    for _ in 0..steps {
        let p = states.last().unwrap();
        let step = (|| {
            let (k1x, k1y) = rhs(&p.x, &p.y)?;
            let (k2x, k2y) = rhs(&shift(&p.x, &k1x, dt / 2.0), &shift(&p.y, &k1y, dt / 2.0))?;
            let (k3x, k3y) = rhs(&shift(&p.x, &k2x, dt / 2.0), &shift(&p.y, &k2y, dt / 2.0))?;
            let (k4x, k4y) = rhs(&shift(&p.x, &k3x, dt), &shift(&p.y, &k3y, dt))?;
            let combine = |base: &[f64], k: [&[f64]; 4]| -> Vec<f64> {
                (0..n)
                    .map(|i| {
                        base[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i])
                    })
                    .collect()
            };
            let x = combine(&p.x, [&k1x, &k2x, &k3x, &k4x]);
            let y = combine(&p.y, [&k1y, &k2y, &k3y, &k4y]);
            domain.contains(&x, &y).then(|| Point::new(x, y))
        })();
        match step {
            Some(next) => states.push(next),
            None => {
                truncated = true;
                break;
            }
        }
    }
    Ok(Trajectory { states, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConicDomain;
    use crate::field::TensorField;
    use std::sync::Arc;

    #[test]
    fn straight_line() {
        let d = Arc::new(ConicDomain::slit("plane", vec![(-5.0, 5.0); 2], (0.5, 2.0)));
        let g = Spray::new(TensorField::zero((1, 0), 2.0, d)).unwrap();
        let t = geodesic_integrate(&g, &[0.0, 0.0], &[1.0, 2.0], 0.01, 100).unwrap();
        assert_eq!(t.states.len(), 101);
        assert!(!t.truncated);
        assert!((t.last().x[0] - 1.0).abs() < 1e-10 && (t.last().x[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn leaving_the_domain_truncates() {
        let d = Arc::new(ConicDomain::new(
            "half",
            1,
            |x, y| x[0] < 0.5 && y[0] != 0.0,
            crate::domain::SamplerSpec::Box {
                x_box: vec![(-1.0, 0.0)],
                y_radii: (0.5, 1.0),
                excluded: vec![],
            },
        ));
        let g = Spray::new(TensorField::zero((1, 0), 2.0, d)).unwrap();
        let t = geodesic_integrate(&g, &[0.0], &[1.0], 0.1, 20).unwrap();
        assert!(t.truncated);
        assert_eq!(t.states.len(), 5);
        assert!(geodesic_integrate(&g, &[0.7], &[1.0], 0.1, 2).is_err());
    }
}
