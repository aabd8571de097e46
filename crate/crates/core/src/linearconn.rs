//! Homogeneous linear connections on the vertical bundle, stored by their
//! natural-chart coefficients
//! `hat1^i_jk d_i = nabla_{d/dx^j} d/dx^k` and
//! `hat2^i_jk d_i = nabla_{d/dy^j} d/dx^k`.

use std::fmt;
use std::str::FromStr;

use crate::connections::{
    berwald_connection, canonical_nonlinear, chern_connection, AnisotropicConnection,
    NonlinearConnection,
};
use crate::error::{Error, Result};
use crate::field::{
    liouville_contract, vertical_derivative, x_derivative, DiffEngine, TensorField,
};
use crate::jet::Jet;
use crate::linalg;
use crate::metrics::{validation_samples, Lagrangian};

/// Below this sup-norm of `hat2 . y` the connection counts as strongly
/// regular and `B` is the identity.
pub const STRONG_REGULARITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LinearConnection {
    hat1: TensorField,
    hat2: TensorField,
}

/// `B = (Id + hat2 . y)^{-1}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix {
    /// Row-major inverse; `None` when the matrix is singular.
    pub b: Option<Vec<f64>>,
    pub regular: bool,
    pub strongly_regular: bool,
    /// `max |hat2^i_jc y^c|`.
    pub contraction_defect: f64,
}

fn check_type(field: &TensorField, alpha: f64, what: &str) -> Result<()> {
    if (field.contra(), field.cov()) != (1, 2) {
        return Err(Error::Rank(format!(
            "{what} must have type (1, 2), `{}` has ({}, {})",
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

/// `Id + hat2 . y` as jets, or the exact identity when the contraction is
/// negligible.
fn b_jets(hat2: &[Jet], y: &[Jet], at: (&[f64], &[f64])) -> Result<Vec<Jet>> {
    let n = y.len();
    let space = y[0].space();
    let mut m = Vec::with_capacity(n * n);
    let mut sup: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::constant(space, 0.0);
            for c in 0..n {
                acc += &hat2[(i * n + j) * n + c] * &y[c];
            }
            sup = sup.max(acc.value().abs());
            m.push(acc);
        }
    }
    let identity = |i: usize, j: usize| Jet::constant(space, if i == j { 1.0 } else { 0.0 });
    if sup <= STRONG_REGULARITY_TOLERANCE {
        return Ok((0..n * n).map(|k| identity(k / n, k % n)).collect());
    }
    for (k, e) in m.iter_mut().enumerate() {
        *e += identity(k / n, k % n);
    }
    linalg::invert_jets(&m, n).ok_or_else(|| Error::Regularity {
        what: "linear connection is not regular".into(),
        x: at.0.to_vec(),
        y: at.1.to_vec(),
    })
}

/// `N^a_i = B^a_b hat1^b_ic y^c`.
fn induced_jets(hat1: &[Jet], b: &[Jet], y: &[Jet]) -> Vec<Jet> {
    let n = y.len();
    let space = y[0].space();
    let contracted: Vec<Jet> = (0..n * n)
        .map(|k| {
            let (bi, i) = (k / n, k % n);
            let mut acc = Jet::constant(space, 0.0);
            for c in 0..n {
                acc += &hat1[(bi * n + i) * n + c] * &y[c];
            }
            acc
        })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for i in 0..n {
            let mut acc = Jet::constant(space, 0.0);
            for bb in 0..n {
                acc += &b[a * n + bb] * &contracted[bb * n + i];
            }
            out.push(acc);
        }
    }
    out
}

/// `Gamma^i_jk = base^i_jk + sign * N^b_j D^i_bk`.
fn shift_by(base: &[Jet], nl: &[Jet], d: &[Jet], sign: f64, n: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = base[(i * n + j) * n + k].clone();
                for b in 0..n {
                    acc += &nl[b * n + j] * &d[(i * n + b) * n + k] * sign;
                }
                out.push(acc);
            }
        }
    }
    out
}

impl LinearConnection {
    /// `hat1` of type `(1, 2)` and homogeneity 0, `hat2` of type `(1, 2)`
    /// and homogeneity -1.
    pub fn new(hat1: TensorField, hat2: TensorField) -> Result<Self> {
        check_type(&hat1, 0.0, "first coefficients")?;
        check_type(&hat2, -1.0, "second coefficients")?;
        Ok(LinearConnection { hat1, hat2 })
    }

    pub fn hat1(&self) -> &TensorField {
        &self.hat1
    }

    pub fn hat2(&self) -> &TensorField {
        &self.hat2
    }

    pub fn dim(&self) -> usize {
        self.hat1.dim()
    }

    /// Vertically trivial connection `(Gamma, 0)`.
    pub fn embed_trivial(gamma: &AnisotropicConnection) -> Self {
        let hat1 = gamma.field().clone();
        let hat2 = TensorField::zero((1, 2), -1.0, hat1.domain().clone());
        LinearConnection { hat1, hat2 }
    }

    /// Rebuilds the natural coefficients from the horizontal part `gamma`
    /// and vertical part `delta` relative to `nl`.
    pub fn from_parts(
        gamma: &AnisotropicConnection,
        delta: &TensorField,
        nl: &NonlinearConnection,
    ) -> Result<Self> {
        check_type(delta, -1.0, "vertical part")?;
        let n = gamma.field().dim();
        let hat1 = TensorField::pointwise(
            format!("hat1({}, {})", gamma.field().label(), delta.label()),
            (1, 2),
            0.0,
            gamma.field().domain().clone(),
            vec![gamma.field().clone(), nl.field().clone(), delta.clone()],
            move |p| {
                Ok(shift_by(
                    &p.parents[0],
                    &p.parents[1],
                    &p.parents[2],
                    1.0,
                    n,
                ))
            },
        );
        LinearConnection::new(hat1, delta.clone())
    }

    /// [`LinearConnection::from_parts`] relative to `N = iC gamma`; the
    /// inverse of [`LinearConnection::project_intrinsic`] paired with `hat2`.
    pub fn from_intrinsic(gamma: &AnisotropicConnection, delta: &TensorField) -> Result<Self> {
        LinearConnection::from_parts(gamma, delta, &gamma.lower())
    }

    /// `B` and the regularity flags at one point. Never fails on singular
    /// matrices.
    pub fn b_matrix(&self, x: &[f64], y: &[f64]) -> Result<BMatrix> {
        let n = self.dim();
        let c = liouville_contract(&self.hat2)?.values(x, y)?;
        let contraction_defect = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if contraction_defect <= STRONG_REGULARITY_TOLERANCE {
            let id = (0..n * n)
                .map(|k| if k / n == k % n { 1.0 } else { 0.0 })
                .collect();
            return Ok(BMatrix {
                b: Some(id),
                regular: true,
                strongly_regular: true,
                contraction_defect,
            });
        }
        let m: Vec<f64> = c
            .iter()
            .enumerate()
            .map(|(k, v)| v + if k / n == k % n { 1.0 } else { 0.0 })
            .collect();
        let b = linalg::invert(&m, n);
        Ok(BMatrix {
            regular: b.is_some(),
            b,
            strongly_regular: false,
            contraction_defect,
        })
    }

    fn check_regular(&self) -> Result<()> {
        for p in validation_samples(self.hat1.domain())? {
            if !self.b_matrix(&p.x, &p.y)?.regular {
                return Err(Error::Regularity {
                    what: "linear connection is not regular".into(),
                    x: p.x,
                    y: p.y,
                });
            }
        }
        Ok(())
    }

    /// `N^a_i = B^a_b hat1^b_ic y^c`.
    pub fn induced_nonlinear(&self) -> Result<NonlinearConnection> {
        self.check_regular()?;
        let field = TensorField::pointwise(
            format!("N({})", self.hat1.label()),
            (1, 1),
            1.0,
            self.hat1.domain().clone(),
            vec![self.hat1.clone(), self.hat2.clone()],
            move |p| {
                let b = b_jets(&p.parents[1], p.y, p.at)?;
                Ok(induced_jets(&p.parents[0], &b, p.y))
            },
        );
        NonlinearConnection::new(field)
    }

    /// Horizontal part relative to the induced nonlinear connection:
    /// `Gamma^i_jk = hat1^i_jk - B^b_a hat1^a_jc y^c hat2^i_bk`.
    pub fn project_intrinsic(&self) -> Result<AnisotropicConnection> {
        self.check_regular()?;
        let n = self.dim();
        let field = TensorField::pointwise(
            format!("j({})", self.hat1.label()),
            (1, 2),
            0.0,
            self.hat1.domain().clone(),
            vec![self.hat1.clone(), self.hat2.clone()],
            move |p| {
                let (h1, h2) = (&p.parents[0], &p.parents[1]);
                let b = b_jets(h2, p.y, p.at)?;
                let nl = induced_jets(h1, &b, p.y);
                Ok(shift_by(h1, &nl, h2, -1.0, n))
            },
        );
        AnisotropicConnection::new(field)
    }

    /// Horizontal and vertical parts `(hat1 - N . hat2, hat2)` relative to
    /// `nl`. Regularity is not needed.
    pub fn project_with_n(
        &self,
        nl: &NonlinearConnection,
    ) -> Result<(AnisotropicConnection, TensorField)> {
        let n = self.dim();
        let gamma = TensorField::pointwise(
            format!("j_N({})", self.hat1.label()),
            (1, 2),
            0.0,
            self.hat1.domain().clone(),
            vec![self.hat1.clone(), nl.field().clone(), self.hat2.clone()],
            move |p| {
                Ok(shift_by(
                    &p.parents[0],
                    &p.parents[1],
                    &p.parents[2],
                    -1.0,
                    n,
                ))
            },
        );
        Ok((AnisotropicConnection::new(gamma)?, self.hat2.clone()))
    }
}

/// Values of `Z`, `dZ/dx`, `dZ/dy` and `N` at one point.
type Directional = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn directional(
    z: &TensorField,
    nl: &NonlinearConnection,
    engine: &DiffEngine,
    x: &[f64],
    y: &[f64],
) -> Result<Directional> {
    let zv = z.values(x, y)?;
    let dzx = x_derivative(z, engine).values(x, y)?;
    let dzy = vertical_derivative(z, engine).values(x, y)?;
    let nv = nl.field().values(x, y)?;
    Ok((zv, dzx, dzy, nv))
}

/// `nabla_X Z` for `X = X_h^j d/dx^j (horizontal w.r.t. nl) + X_v^j d/dy^j`,
/// via the horizontal/vertical parts relative to `nl`.
#[allow(clippy::too_many_arguments)]
pub fn covariant_derivative(
    conn: &LinearConnection,
    nl: &NonlinearConnection,
    x_h: &[f64],
    x_v: &[f64],
    z: &TensorField,
    x: &[f64],
    y: &[f64],
    engine: &DiffEngine,
) -> Result<Vec<f64>> {
    if (z.contra(), z.cov()) != (1, 0) {
        return Err(Error::Rank(format!(
            "`{}` is not a vector field",
            z.label()
        )));
    }
    z.domain().check(x, y)?;
    let n = z.dim();
    let (gamma, delta) = conn.project_with_n(nl)?;
    let g = gamma.field().values(x, y)?;
    let d = delta.values(x, y)?;
    let (zv, dzx, dzy, nv) = directional(z, nl, engine, x, y)?;
    Ok((0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                let mut hor = dzx[i * n + j];
                for a in 0..n {
                    hor -= nv[a * n + j] * dzy[i * n + a];
                }
                let mut ver = dzy[i * n + j];
                for c in 0..n {
                    hor += g[(i * n + j) * n + c] * zv[c];
                    ver += d[(i * n + j) * n + c] * zv[c];
                }
                acc += x_h[j] * hor + x_v[j] * ver;
            }
            acc
        })
        .collect())
}

/// Same quantity from the natural coefficients, with the natural components
/// of `X` being `(X_h, X_v - N . X_h)`.
#[allow(clippy::too_many_arguments)]
pub fn covariant_derivative_natural(
    conn: &LinearConnection,
    nl: &NonlinearConnection,
    x_h: &[f64],
    x_v: &[f64],
    z: &TensorField,
    x: &[f64],
    y: &[f64],
    engine: &DiffEngine,
) -> Result<Vec<f64>> {
    z.domain().check(x, y)?;
    let n = z.dim();
    let h1 = conn.hat1().values(x, y)?;
    let h2 = conn.hat2().values(x, y)?;
    let (zv, dzx, dzy, nv) = directional(z, nl, engine, x, y)?;
    let x2: Vec<f64> = (0..n)
        .map(|a| x_v[a] - (0..n).map(|j| nv[a * n + j] * x_h[j]).sum::<f64>())
        .collect();
    Ok((0..n)
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                acc += x_h[j] * dzx[i * n + j] + x2[j] * dzy[i * n + j];
                for c in 0..n {
                    acc += h1[(i * n + j) * n + c] * x_h[j] * zv[c];
                    acc += h2[(i * n + j) * n + c] * x2[j] * zv[c];
                }
            }
            acc
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalKind {
    Berwald,
    Chern,
    Hashiguchi,
    Cartan,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 4] = [
        ClassicalKind::Berwald,
        ClassicalKind::Chern,
        ClassicalKind::Hashiguchi,
        ClassicalKind::Cartan,
    ];
}

impl fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicalKind::Berwald => "berwald",
            ClassicalKind::Chern => "chern",
            ClassicalKind::Hashiguchi => "hashiguchi",
            ClassicalKind::Cartan => "cartan",
        })
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Shape(format!("unknown connection kind `{s}`")))
    }
}

/// `C^i_jk = phi^il 1/2 phi_{lj.k}`, type `(1, 2)`, homogeneity -1.
pub fn cartan_tensor(l: &Lagrangian, engine: &DiffEngine) -> TensorField {
    let n = l.dim();
    let phi = l.fundamental().clone();
    let dphi = vertical_derivative(&phi, engine);
    TensorField::pointwise(
        format!("C({})", l.field().label()),
        (1, 2),
        -1.0,
        l.domain().clone(),
        vec![phi, dphi],
        move |p| {
            let inv = linalg::invert_jets(&p.parents[0], n).ok_or_else(|| Error::Regularity {
                what: "singular fundamental tensor".into(),
                x: p.at.0.to_vec(),
                y: p.at.1.to_vec(),
            })?;
            let d = &p.parents[1];
            let mut out = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut acc = p.constant(0.0);
                        for l in 0..n {
                            acc += &inv[i * n + l] * &d[(l * n + j) * n + k];
                        }
                        out.push(acc * 0.5);
                    }
                }
            }
            Ok(out)
        },
    )
}

/// The four classical linear connections of a Lagrangian, all built relative
/// to its canonical nonlinear connection.
pub fn classical_linear(
    l: &Lagrangian,
    kind: ClassicalKind,
    engine: &DiffEngine,
) -> Result<LinearConnection> {
    let horizontal = match kind {
        ClassicalKind::Berwald | ClassicalKind::Hashiguchi => berwald_connection(l, engine)?,
        ClassicalKind::Chern | ClassicalKind::Cartan => chern_connection(l, engine)?,
    };
    let conn = match kind {
        ClassicalKind::Berwald | ClassicalKind::Chern => {
            LinearConnection::embed_trivial(&horizontal)
        }
        ClassicalKind::Hashiguchi | ClassicalKind::Cartan => LinearConnection::from_parts(
            &horizontal,
            &cartan_tensor(l, engine),
            &canonical_nonlinear(l, engine)?,
        )?,
    };
    Ok(LinearConnection {
        hat1: conn
            .hat1
            .with_label(format!("{kind}({})", l.field().label())),
        hat2: conn.hat2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConicDomain;
    use std::sync::Arc;

    fn plane() -> Arc<ConicDomain> {
        Arc::new(ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0)))
    }

    fn right_half() -> Arc<ConicDomain> {
        Arc::new(ConicDomain::new(
            "right",
            2,
            |_, y| y[0] > 0.0,
            crate::domain::SamplerSpec::Box {
                x_box: vec![(-1.0, 1.0); 2],
                y_radii: (0.5, 2.0),
                excluded: vec![Arc::new(|d: &[f64]| d[0] < 0.2)],
            },
        ))
    }

    fn levi_civita(d: Arc<ConicDomain>) -> AnisotropicConnection {
        AnisotropicConnection::new(TensorField::analytic("LC", (1, 2), 0.0, d, |_, y| {
            let s = y[0].space();
            let c = |v: f64| Jet::constant(s, v);
            vec![
                c(1.0),
                c(0.0),
                c(0.0),
                c(-1.0),
                c(0.0),
                c(1.0),
                c(1.0),
                c(0.0),
            ]
        }))
        .unwrap()
    }

    fn hat2_first(sign: f64) -> TensorField {
        TensorField::analytic("h2", (1, 2), -1.0, right_half(), move |_, y| {
            let z = &y[0] * 0.0;
            let mut v = vec![z; 8];
            v[0] = y[0].recip() * sign;
            v
        })
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn b_matrix_examples() {
        let zero = LinearConnection::embed_trivial(&levi_civita(plane()));
        let b = zero.b_matrix(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!(b.strongly_regular);
        assert_eq!(b.b.unwrap(), vec![1.0, 0.0, 0.0, 1.0]);

        let hat1 = TensorField::zero((1, 2), 0.0, right_half());
        let c = LinearConnection::new(hat1.clone(), hat2_first(1.0)).unwrap();
        let b = c.b_matrix(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!(b.regular && !b.strongly_regular);
        close(&b.b.unwrap(), &[0.5, 0.0, 0.0, 1.0], 1e-15);

        let c = LinearConnection::new(hat1, hat2_first(-1.0)).unwrap();
        let b = c.b_matrix(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!(!b.regular && b.b.is_none());
        assert!(matches!(
            c.induced_nonlinear(),
            Err(Error::Regularity { .. })
        ));
    }

    #[test]
    fn induced_and_projections() {
        let lc = levi_civita(right_half());
        let c = LinearConnection::new(lc.field().clone(), hat2_first(1.0)).unwrap();
        let (x, y) = ([0.1, 0.0], [1.0, 2.0]);
        let nl = c.induced_nonlinear().unwrap();
        // hat1 . y = [[1, -2], [2, 1]], B = diag(1/2, 1)
        close(
            &nl.field().evaluate(&x, &y).unwrap(),
            &[0.5, -1.0, 2.0, 1.0],
            1e-14,
        );

        let intrinsic = c
            .project_intrinsic()
            .unwrap()
            .field()
            .evaluate(&x, &y)
            .unwrap();
        let (via_n, delta) = c.project_with_n(&nl).unwrap();
        close(&intrinsic, &via_n.field().evaluate(&x, &y).unwrap(), 1e-14);
        assert_eq!(delta.label(), "h2");
        let lowered = c
            .project_intrinsic()
            .unwrap()
            .lower()
            .field()
            .evaluate(&x, &y)
            .unwrap();
        close(&lowered, &nl.field().evaluate(&x, &y).unwrap(), 1e-14);

        let rebuilt =
            LinearConnection::from_intrinsic(&c.project_intrinsic().unwrap(), c.hat2()).unwrap();
        close(
            &rebuilt.hat1().evaluate(&x, &y).unwrap(),
            &c.hat1().evaluate(&x, &y).unwrap(),
            1e-14,
        );
    }

    #[test]
    fn embedding_is_strongly_regular_and_projects_back() {
        let lc = levi_civita(plane());
        let c = LinearConnection::embed_trivial(&lc);
        let (x, y) = ([0.0, 0.0], [1.0, 2.0]);
        close(
            &c.project_intrinsic()
                .unwrap()
                .field()
                .evaluate(&x, &y)
                .unwrap(),
            &lc.field().evaluate(&x, &y).unwrap(),
            1e-15,
        );
        close(
            &c.induced_nonlinear()
                .unwrap()
                .field()
                .evaluate(&x, &y)
                .unwrap(),
            &[1.0, -2.0, 2.0, 1.0],
            1e-15,
        );
        let zero_n = NonlinearConnection::new(TensorField::zero((1, 1), 1.0, plane())).unwrap();
        let (g, d) = c.project_with_n(&zero_n).unwrap();
        close(
            &g.field().evaluate(&x, &y).unwrap(),
            &lc.field().evaluate(&x, &y).unwrap(),
            1e-15,
        );
        assert_eq!(d.evaluate(&x, &y).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn covariant_derivative_examples() {
        let e = DiffEngine::analytic();
        let d = plane();
        let lc = levi_civita(d.clone());
        let c = LinearConnection::embed_trivial(&lc);
        let nl = c.induced_nonlinear().unwrap();
        let constant = TensorField::analytic("e1", (1, 0), 0.0, d.clone(), |_, y| {
            vec![
                Jet::constant(y[0].space(), 1.0),
                Jet::constant(y[0].space(), 0.0),
            ]
        });
        let (x, y) = ([0.0, 0.0], [1.0, 2.0]);
        let v =
            covariant_derivative(&c, &nl, &[1.0, 0.0], &[0.0, 0.0], &constant, &x, &y, &e).unwrap();
        close(&v, &[1.0, 0.0], 1e-15);

        let liouville = TensorField::liouville(d.clone());
        for j in 0..2 {
            let mut xv = [0.0; 2];
            xv[j] = 1.0;
            let v =
                covariant_derivative(&c, &nl, &[0.0, 0.0], &xv, &liouville, &x, &y, &e).unwrap();
            close(&v, &xv, 1e-15);
        }

        let z = TensorField::analytic("Z", (1, 0), 1.0, d, |x, y| {
            vec![&y[0] * &x[1] + &y[1], &y[0] * &x[0]]
        });
        let c2 = LinearConnection::new(
            lc.field().clone(),
            TensorField::analytic("h2", (1, 2), -1.0, plane(), |_, y| {
                let r = (&y[0] * &y[0] + &y[1] * &y[1]).sqrt().recip();
                let z = &r * 0.0;
                vec![
                    r.clone(),
                    z.clone(),
                    z.clone(),
                    &r * 0.5,
                    z.clone(),
                    &r * -0.3,
                    z.clone(),
                    r,
                ]
            }),
        )
        .unwrap();
        let (x, y) = ([0.3, -0.2], [0.7, 1.1]);
        let a = covariant_derivative(&c2, &nl, &[0.4, -1.0], &[2.0, 0.5], &z, &x, &y, &e).unwrap();
        let b = covariant_derivative_natural(&c2, &nl, &[0.4, -1.0], &[2.0, 0.5], &z, &x, &y, &e)
            .unwrap();
        close(&a, &b, 1e-13);
    }
}
