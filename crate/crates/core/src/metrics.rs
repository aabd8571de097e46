//! Metric-type objects: Lagrangians, Legendre transformations and
//! anisotropic metrics, with sample-based validation.

use std::sync::Arc;

use crate::domain::{ConicDomain, Point};
use crate::error::{Error, Result};
use crate::field::{
    liouville_contract, relative_homogeneity_defect, vertical_derivative, DiffEngine, TensorField,
};
use crate::linalg;

/// Samples drawn from a domain when an operation validates its output.
pub const VALIDATION_SAMPLES: usize = 64;
pub const VALIDATION_SEED: u64 = 0x5eed_0001;
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;
/// Bound on the row-scaled determinant.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;
pub const EIGENVALUE_ZERO_TOLERANCE: f64 = 1e-8;
/// Relative Euler defect accepted by validation.
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-6;

pub fn validation_samples(domain: &ConicDomain) -> Result<Vec<Point>> {
    domain.samples(VALIDATION_SAMPLES, VALIDATION_SEED)
}

fn check_rank(field: &TensorField, rank: (usize, usize), alpha: f64, what: &str) -> Result<()> {
    if (field.contra(), field.cov()) != rank {
        return Err(Error::Rank(format!(
            "{what} must have type {rank:?}, `{}` has ({}, {})",
            field.label(),
            field.contra(),
            field.cov()
        )));
    }
    if field.alpha() != alpha {
        return Err(Error::Level(format!(
            "{what} must be {alpha}-homogeneous, `{}` is declared {}",
            field.label(),
            field.alpha()
        )));
    }
    Ok(())
}

fn check_nondegenerate(m: &[f64], n: usize, what: &str, p: &Point) -> Result<()> {
    let det = linalg::scaled_determinant(m, n);
    if det.abs() > DEGENERACY_THRESHOLD && det.is_finite() {
        Ok(())
    } else {
        Err(Error::Regularity {
            what: format!("{what} degenerate (scaled det {det:e})"),
            x: p.x.clone(),
            y: p.y.clone(),
        })
    }
}

fn check_symmetric(m: &[f64], n: usize, p: &Point) -> Result<()> {
    let defect = linalg::asymmetry(m, n);
    if defect <= SYMMETRY_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Symmetry {
            defect,
            x: p.x.clone(),
            y: p.y.clone(),
        })
    }
}

/// A 2-homogeneous scalar with its fundamental tensor `phi = 1/2 d^2 L`.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    field: TensorField,
    fundamental: TensorField,
    engine: DiffEngine,
}

impl Lagrangian {
    pub fn new(field: TensorField, engine: DiffEngine) -> Result<Self> {
        check_rank(&field, (0, 0), 2.0, "a Lagrangian")?;
        let hessian = vertical_derivative(&vertical_derivative(&field, &engine), &engine);
        let fundamental = hessian
            .scale(0.5)
            .with_label(format!("phi({})", field.label()));
        Ok(Lagrangian {
            field,
            fundamental,
            engine,
        })
    }

    /// [`Lagrangian::new`] followed by [`Lagrangian::validate`] on the
    /// domain's validation samples.
    pub fn checked(field: TensorField, engine: DiffEngine) -> Result<Self> {
        let l = Lagrangian::new(field, engine)?;
        l.validate(&validation_samples(l.domain())?)?;
        Ok(l)
    }

    /// Homogeneity, symmetry and nondegeneracy of `phi` at every sample.
    pub fn validate(&self, samples: &[Point]) -> Result<()> {
        let n = self.field.dim();
        for p in samples {
            let defect = relative_homogeneity_defect(&self.field, &self.engine, &p.x, &p.y)?;
            if defect >= HOMOGENEITY_TOLERANCE {
                return Err(Error::Regularity {
                    what: format!("Euler defect {defect:e} of `{}`", self.field.label()),
                    x: p.x.clone(),
                    y: p.y.clone(),
                });
            }
            let phi = self.fundamental.values(&p.x, &p.y)?;
            check_symmetric(&phi, n, p)?;
            check_nondegenerate(&phi, n, "fundamental tensor", p)?;
        }
        Ok(())
    }

    pub fn field(&self) -> &TensorField {
        &self.field
    }

    /// `phi = 1/2 d^2 L`, type `(0, 2)`, homogeneity 0.
    pub fn fundamental(&self) -> &TensorField {
        &self.fundamental
    }

    pub fn engine(&self) -> &DiffEngine {
        &self.engine
    }

    pub fn domain(&self) -> &Arc<ConicDomain> {
        self.field.domain()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }
}

/// A 1-homogeneous 1-form with nondegenerate vertical derivative.
#[derive(Debug, Clone)]
pub struct LegendreField {
    field: TensorField,
}

impl LegendreField {
    pub fn new(field: TensorField) -> Result<Self> {
        check_rank(&field, (0, 1), 1.0, "a Legendre transformation")?;
        Ok(LegendreField { field })
    }

    pub fn validate(&self, samples: &[Point], engine: &DiffEngine) -> Result<()> {
        let d = vertical_derivative(&self.field, engine);
        for p in samples {
            check_nondegenerate(
                &d.values(&p.x, &p.y)?,
                self.field.dim(),
                "vertical derivative",
                p,
            )?;
        }
        Ok(())
    }

    pub fn field(&self) -> &TensorField {
        &self.field
    }
}

/// Symmetric nondegenerate 0-homogeneous `(0, 2)` field.
#[derive(Debug, Clone)]
pub struct AnisotropicMetric {
    field: TensorField,
}

impl AnisotropicMetric {
    /// Wraps a field without checking symmetry or nondegeneracy; see
    /// [`AnisotropicMetric::validate`].
    pub fn new(field: TensorField) -> Result<Self> {
        check_rank(&field, (0, 2), 0.0, "an anisotropic metric")?;
        Ok(AnisotropicMetric { field })
    }

    pub fn checked(field: TensorField) -> Result<Self> {
        let g = AnisotropicMetric::new(field)?;
        g.validate(&validation_samples(g.field.domain())?)?;
        Ok(g)
    }

    pub fn validate(&self, samples: &[Point]) -> Result<()> {
        let n = self.field.dim();
        for p in samples {
            let g = self.field.values(&p.x, &p.y)?;
            check_symmetric(&g, n, p)?;
            check_nondegenerate(&g, n, "metric", p)?;
        }
        Ok(())
    }

    pub fn field(&self) -> &TensorField {
        &self.field
    }
}

/// `ell = dL`, validated for nondegeneracy of `d ell`.
pub fn legendre_of(l: &Lagrangian) -> Result<LegendreField> {
    let ell = LegendreField::new(
        vertical_derivative(l.field(), l.engine())
            .with_label(format!("ell({})", l.field().label())),
    )?;
    ell.validate(&validation_samples(l.domain())?, l.engine())?;
    Ok(ell)
}

/// `Delta_i = 1/2 ell_i - 1/2 ell_{a.i} y^a`; vanishes exactly when `ell`
/// is the vertical derivative of a Lagrangian.
pub fn legendre_residue(ell: &LegendreField, engine: &DiffEngine) -> TensorField {
    let f = ell.field();
    let n = f.dim();
    let d = vertical_derivative(f, engine);
    TensorField::pointwise(
        format!("res({})", f.label()),
        (0, 1),
        1.0,
        f.domain().clone(),
        vec![f.clone(), d],
        move |p| {
            let (ell, d) = (&p.parents[0], &p.parents[1]);
            Ok((0..n)
                .map(|i| {
                    let mut acc = &ell[i] * 0.5;
                    for a in 0..n {
                        acc -= &d[a * n + i] * &p.y[a] * 0.5;
                    }
                    acc
                })
                .collect())
        },
    )
}

/// The fundamental tensor as a validated anisotropic metric.
pub fn fundamental_tensor(l: &Lagrangian) -> Result<AnisotropicMetric> {
    let g = AnisotropicMetric::new(l.fundamental().clone())?;
    g.validate(&validation_samples(l.domain())?)?;
    Ok(g)
}

/// `g_v(u, w) = phi_v(u, w) + kappa phi_v(v, u) phi_v(v, w) / L(v)`.
///
/// The result is symmetric and 0-homogeneous; it is degenerate for
/// `kappa = -1`, so nondegeneracy is left to [`AnisotropicMetric::validate`].
pub fn wick_metric(l: &Lagrangian, kappa: f64) -> Result<AnisotropicMetric> {
    for p in validation_samples(l.domain())? {
        let v = l.field().values(&p.x, &p.y)?[0];
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Division {
                what: "Lagrangian".into(),
                x: p.x,
                y: p.y,
            });
        }
    }
    let n = l.dim();
    let field = TensorField::pointwise(
        format!("wick({kappa})[{}]", l.field().label()),
        (0, 2),
        0.0,
        l.domain().clone(),
        vec![l.fundamental().clone(), l.field().clone()],
        move |p| {
            let (phi, lag) = (&p.parents[0], &p.parents[1][0]);
            if lag.value() == 0.0 {
                return Err(Error::Division {
                    what: "Lagrangian".into(),
                    x: p.at.0.to_vec(),
                    y: p.at.1.to_vec(),
                });
            }
            let inv = lag.recip() * kappa;
            let phi_v: Vec<_> = (0..n)
                .map(|i| {
                    let mut acc = &phi[i * n] * &p.y[0];
                    for a in 1..n {
                        acc += &phi[i * n + a] * &p.y[a];
                    }
                    acc
                })
                .collect();
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(&phi[i * n + j] + &phi_v[i] * &phi_v[j] * &inv);
                }
            }
            Ok(out)
        },
    );
    AnisotropicMetric::new(field)
}

/// Signature `(n_plus, n_minus, n_zero)` at a point; eigenvalues with
/// `|lambda| < tol` count as zero.
pub fn signature_at(
    g: &AnisotropicMetric,
    x: &[f64],
    y: &[f64],
    tol: f64,
) -> Result<(usize, usize, usize)> {
    let n = g.field().dim();
    let m = g.field().evaluate(x, y)?;
    check_symmetric(&m, n, &Point::new(x, y))?;
    let ev = linalg::symmetric_eigenvalues(&m, n);
    Ok(ev.iter().fold((0, 0, 0), |(p, q, z), &l| {
        if l.abs() < tol {
            (p, q, z + 1)
        } else if l > 0.0 {
            (p + 1, q, z)
        } else {
            (p, q + 1, z)
        }
    }))
}

/// `1/2 g(C, C)`. Whether this is a Lagrangian must be checked separately.
pub fn lagrangian_of_metric(g: &AnisotropicMetric) -> Result<TensorField> {
    let once = liouville_contract(g.field())?;
    Ok(liouville_contract(&once)?
        .scale(0.5)
        .with_label(format!("L({})", g.field().label())))
}

/// Largest deviation of `d phi` from total symmetry in its three indices.
pub fn total_symmetry_defect(
    phi: &TensorField,
    engine: &DiffEngine,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let n = phi.dim();
    let d = vertical_derivative(phi, engine).values(x, y)?;
    let at = |i: usize, j: usize, k: usize| d[(i * n + j) * n + k];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = at(i, j, k);
                for w in [
                    at(j, i, k),
                    at(i, k, j),
                    at(k, j, i),
                    at(j, k, i),
                    at(k, i, j),
                ] {
                    worst = worst.max((v - w).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plane() -> Arc<ConicDomain> {
        Arc::new(ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0)))
    }

    fn euclidean() -> Lagrangian {
        let f = TensorField::analytic("L", (0, 0), 2.0, plane(), |_, y| {
            vec![&y[0] * &y[0] + &y[1] * &y[1]]
        });
        Lagrangian::checked(f, DiffEngine::analytic()).unwrap()
    }

    #[test]
    fn lagrangian_rejects_wrong_type() {
        let f = TensorField::analytic("y1", (0, 0), 1.0, plane(), |_, y| vec![y[0].clone()]);
        assert!(matches!(
            Lagrangian::new(f, DiffEngine::analytic()),
            Err(Error::Level(_))
        ));
        let f = TensorField::liouville(plane());
        assert!(matches!(
            Lagrangian::new(f, DiffEngine::analytic()),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn legendre_of_euclidean() {
        let ell = legendre_of(&euclidean()).unwrap();
        assert_eq!(
            ell.field().evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            vec![6.0, 8.0]
        );
    }

    #[test]
    fn legendre_residue_examples() {
        let e = DiffEngine::analytic();
        let r = legendre_residue(&legendre_of(&euclidean()).unwrap(), &e);
        assert!(r
            .values(&[0.0, 0.0], &[0.4, -1.1])
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-15));

        let skew = LegendreField::new(TensorField::analytic(
            "ell",
            (0, 1),
            1.0,
            plane(),
            |_, y| vec![&y[0] - &y[1], &y[0] + &y[1]],
        ))
        .unwrap();
        skew.validate(&validation_samples(&plane()).unwrap(), &e)
            .unwrap();
        let r = legendre_residue(&skew, &e)
            .values(&[0.0, 0.0], &[3.0, 4.0])
            .unwrap();
        assert_relative_eq!(r[0], -4.0, epsilon = 1e-14);
        assert_relative_eq!(r[1], 3.0, epsilon = 1e-14);

        let rot = LegendreField::new(TensorField::analytic(
            "rot",
            (0, 1),
            1.0,
            plane(),
            |_, y| vec![-&y[1], y[0].clone()],
        ))
        .unwrap();
        let r = legendre_residue(&rot, &e)
            .values(&[0.0, 0.0], &[3.0, 4.0])
            .unwrap();
        assert_relative_eq!(r[0], -4.0, epsilon = 1e-14);
        assert_relative_eq!(r[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_legendre_field_is_reported_with_its_sample() {
        let flat = LegendreField::new(TensorField::analytic(
            "flat",
            (0, 1),
            1.0,
            plane(),
            |_, y| vec![&y[0] + &y[1], &y[0] + &y[1]],
        ))
        .unwrap();
        let err = flat.validate(
            &validation_samples(&plane()).unwrap(),
            &DiffEngine::analytic(),
        );
        assert!(matches!(err, Err(Error::Regularity { .. })));
    }

    #[test]
    fn wick_metric_examples() {
        let l = euclidean();
        let g0 = wick_metric(&l, 0.0).unwrap();
        let x = [0.0, 0.0];
        assert_eq!(
            g0.field().values(&x, &[0.3, 0.7]).unwrap(),
            l.fundamental().values(&x, &[0.3, 0.7]).unwrap()
        );

        let g = wick_metric(&l, -2.0).unwrap();
        let m = g.field().evaluate(&x, &[1.0, 0.0]).unwrap();
        assert_eq!(m, vec![-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(signature_at(&g, &x, &[1.0, 0.0], 1e-8).unwrap(), (1, 1, 0));

        let g = wick_metric(&l, -1.0).unwrap();
        for y in [[1.0, 0.0], [0.3, -0.8], [-1.2, 0.5]] {
            let m = g.field().evaluate(&x, &y).unwrap();
            assert!(linalg::determinant(&m, 2).abs() < 1e-12);
            assert_eq!(signature_at(&g, &x, &y, 1e-8).unwrap(), (1, 0, 1));
        }
        assert!(g.validate(&validation_samples(&plane()).unwrap()).is_err());
        assert_eq!(
            signature_at(&fundamental_tensor(&l).unwrap(), &x, &[1.0, 2.0], 1e-8).unwrap(),
            (2, 0, 0)
        );
    }

    #[test]
    fn wick_identity_along_the_direction() {
        let l = euclidean();
        let kappa = 0.7;
        let g = wick_metric(&l, kappa).unwrap();
        for p in validation_samples(&plane()).unwrap() {
            let gm = g.field().values(&p.x, &p.y).unwrap();
            let phi = l.fundamental().values(&p.x, &p.y).unwrap();
            for w in [[1.0, 0.0], [0.2, -1.3]] {
                let gv: f64 = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| p.y[i] * gm[i * 2 + j] * w[j])
                    .sum();
                let pv: f64 = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| p.y[i] * phi[i * 2 + j] * w[j])
                    .sum();
                assert!((gv - (1.0 + kappa) * pv).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wick_metric_needs_nonvanishing_lagrangian() {
        let f = TensorField::analytic("null", (0, 0), 2.0, plane(), |_, y| {
            vec![&y[0] * &y[0] * 0.0]
        });
        let l = Lagrangian::new(f, DiffEngine::analytic()).unwrap();
        assert!(matches!(wick_metric(&l, 1.0), Err(Error::Division { .. })));
    }

    #[test]
    fn lagrangian_of_metric_examples() {
        let l = euclidean();
        let x = [0.0, 0.0];
        let y = [1.5, -0.5];
        let half = lagrangian_of_metric(
            &AnisotropicMetric::new(TensorField::identity_metric(plane())).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(
            half.values(&x, &y).unwrap()[0],
            0.5 * 2.5,
            max_relative = 1e-15
        );
        for kappa in [0.5, -1.0, -3.0] {
            let lg = lagrangian_of_metric(&wick_metric(&l, kappa).unwrap()).unwrap();
            assert_relative_eq!(
                lg.values(&x, &y).unwrap()[0],
                (1.0 + kappa) / 2.0 * 2.5,
                epsilon = 1e-14
            );
        }
        assert_eq!(half.alpha(), 2.0);
    }

    #[test]
    fn signature_rejects_asymmetric_input() {
        let f = TensorField::analytic("skew", (0, 2), 0.0, plane(), |_, y| {
            let s = y[0].space();
            vec![
                crate::Jet::constant(s, 1.0),
                crate::Jet::constant(s, 1.0),
                crate::Jet::constant(s, 0.0),
                crate::Jet::constant(s, 1.0),
            ]
        });
        let g = AnisotropicMetric::new(f).unwrap();
        assert!(matches!(
            signature_at(&g, &[0.0, 0.0], &[1.0, 0.0], 1e-8),
            Err(Error::Symmetry { .. })
        ));
    }
}
