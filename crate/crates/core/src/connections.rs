//! Sprays, nonlinear and anisotropic connections, the ladder maps between
//! them, and the canonical objects of a Lagrangian.
//!
//! Sign conventions: the spray vector field is `y^i d/dx^i - 2 G^i d/dy^i`
//! and the horizontal frame is `d/dx^i - N^a_i d/dy^a`.

use std::fmt;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::field::{
    liouville_contract, relative_homogeneity_defect, vertical_derivative, x_derivative, DiffEngine,
    TensorField,
};
use crate::jet::Jet;
use crate::linalg;
use crate::metrics::{validation_samples, Lagrangian, HOMOGENEITY_TOLERANCE};

/// The three connection-type levels below linear connections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnectionLevel {
    Spray,
    Nonlinear,
    Anisotropic,
}

impl ConnectionLevel {
    pub fn rank(self) -> (usize, usize) {
        match self {
            ConnectionLevel::Spray => (1, 0),
            ConnectionLevel::Nonlinear => (1, 1),
            ConnectionLevel::Anisotropic => (1, 2),
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            ConnectionLevel::Spray => 2.0,
            ConnectionLevel::Nonlinear => 1.0,
            ConnectionLevel::Anisotropic => 0.0,
        }
    }
}

impl fmt::Display for ConnectionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConnectionLevel::Spray => "spray",
            ConnectionLevel::Nonlinear => "nonlinear",
            ConnectionLevel::Anisotropic => "anisotropic",
        })
    }
}

fn check_level(field: &TensorField, level: ConnectionLevel) -> Result<()> {
    let rank = (field.contra(), field.cov());
    if rank != level.rank() {
        return Err(Error::Rank(format!(
            "{level} coefficients must have type {:?}, `{}` has {rank:?}",
            level.rank(),
            field.label()
        )));
    }
    if field.alpha() != level.alpha() {
        return Err(Error::Level(format!(
            "{level} coefficients must be {}-homogeneous, `{}` is declared {}",
            level.alpha(),
            field.label(),
            field.alpha()
        )));
    }
    Ok(())
}

fn validate_homogeneity(field: &TensorField, samples: &[Point], engine: &DiffEngine) -> Result<()> {
    for p in samples {
        let defect = relative_homogeneity_defect(field, engine, &p.x, &p.y)?;
        if defect >= HOMOGENEITY_TOLERANCE {
            return Err(Error::Regularity {
                what: format!("Euler defect {defect:e} of `{}`", field.label()),
                x: p.x.clone(),
                y: p.y.clone(),
            });
        }
    }
    Ok(())
}

macro_rules! connection_type {
    ($(#[$doc:meta])* $name:ident, $level:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone)]
        pub struct $name {
            field: TensorField,
        }

        impl $name {
            pub fn new(field: TensorField) -> Result<Self> {
                check_level(&field, $level)?;
                Ok($name { field })
            }

            pub fn field(&self) -> &TensorField {
                &self.field
            }

            pub fn into_field(self) -> TensorField {
                self.field
            }

            pub fn level(&self) -> ConnectionLevel {
                $level
            }

            /// Euler test of the declared homogeneity at each sample.
            pub fn validate(&self, samples: &[Point], engine: &DiffEngine) -> Result<()> {
                validate_homogeneity(&self.field, samples, engine)
            }
        }
    };
}

connection_type!(
    /// Spray coefficients `G^i`, type `(1, 0)`, 2-homogeneous.
    Spray,
    ConnectionLevel::Spray
);
connection_type!(
    /// Nonlinear connection coefficients `N^i_j`, 1-homogeneous.
    NonlinearConnection,
    ConnectionLevel::Nonlinear
);
connection_type!(
    /// Anisotropic connection coefficients `Gamma^i_jk` (row-major `i, j, k`),
    /// 0-homogeneous.
    AnisotropicConnection,
    ConnectionLevel::Anisotropic
);

impl Spray {
    /// `N^i_j = G^i_{.j}`.
    pub fn raise(&self, engine: &DiffEngine) -> NonlinearConnection {
        NonlinearConnection {
            field: vertical_derivative(&self.field, engine)
                .with_label(format!("dy({})", self.field.label())),
        }
    }
}

impl NonlinearConnection {
    /// `Gamma^i_jk = N^i_{j.k}`.
    pub fn raise(&self, engine: &DiffEngine) -> AnisotropicConnection {
        AnisotropicConnection {
            field: vertical_derivative(&self.field, engine),
        }
    }

    /// `G^i = 1/2 N^i_a y^a`.
    pub fn lower(&self) -> Spray {
        Spray {
            field: liouville_contract(&self.field)
                .expect("nonlinear connection has a covariant index")
                .scale(0.5),
        }
    }
}

impl AnisotropicConnection {
    /// `N^i_j = Gamma^i_ja y^a`.
    pub fn lower(&self) -> NonlinearConnection {
        NonlinearConnection {
            field: liouville_contract(&self.field)
                .expect("anisotropic connection has covariant indices"),
        }
    }
}

/// Any of the three connection-type objects.
#[derive(Debug, Clone)]
pub enum ConnectionObject {
    Spray(Spray),
    Nonlinear(NonlinearConnection),
    Anisotropic(AnisotropicConnection),
}

impl ConnectionObject {
    pub fn level(&self) -> ConnectionLevel {
        match self {
            ConnectionObject::Spray(_) => ConnectionLevel::Spray,
            ConnectionObject::Nonlinear(_) => ConnectionLevel::Nonlinear,
            ConnectionObject::Anisotropic(_) => ConnectionLevel::Anisotropic,
        }
    }

    pub fn field(&self) -> &TensorField {
        match self {
            ConnectionObject::Spray(g) => g.field(),
            ConnectionObject::Nonlinear(n) => n.field(),
            ConnectionObject::Anisotropic(c) => c.field(),
        }
    }

    /// Wraps a field according to its type.
    pub fn from_field(field: TensorField) -> Result<Self> {
        match (field.contra(), field.cov()) {
            (1, 0) => Spray::new(field).map(ConnectionObject::Spray),
            (1, 1) => NonlinearConnection::new(field).map(ConnectionObject::Nonlinear),
            (1, 2) => AnisotropicConnection::new(field).map(ConnectionObject::Anisotropic),
            rank => Err(Error::Rank(format!(
                "`{}` of type {rank:?} is not a connection-type object",
                field.label()
            ))),
        }
    }
}

/// Vertical derivative of a spray or nonlinear connection.
pub fn raise_connection(obj: &ConnectionObject, engine: &DiffEngine) -> Result<ConnectionObject> {
    match obj {
        ConnectionObject::Spray(g) => Ok(ConnectionObject::Nonlinear(g.raise(engine))),
        ConnectionObject::Nonlinear(n) => Ok(ConnectionObject::Anisotropic(n.raise(engine))),
        ConnectionObject::Anisotropic(_) => Err(Error::Level(
            "anisotropic connections are the top of the connection ladder".into(),
        )),
    }
}

/// Liouville contraction of an anisotropic or nonlinear connection.
pub fn lower_connection(obj: &ConnectionObject) -> Result<ConnectionObject> {
    match obj {
        ConnectionObject::Anisotropic(c) => Ok(ConnectionObject::Nonlinear(c.lower())),
        ConnectionObject::Nonlinear(n) => Ok(ConnectionObject::Spray(n.lower())),
        ConnectionObject::Spray(_) => Err(Error::Level(
            "sprays are the bottom of the connection ladder".into(),
        )),
    }
}

/// `N - d(iC N / 2)`, the part of `N` not induced by a spray.
pub fn nonlinear_residue(n: &NonlinearConnection, engine: &DiffEngine) -> TensorField {
    n.field()
        .sub(n.lower().raise(engine).field())
        .expect("same shape")
        .with_label(format!("res({})", n.field().label()))
}

/// `Tor^i_jk = N^i_{j.k} - N^i_{k.j}`.
pub fn torsion(n: &NonlinearConnection, engine: &DiffEngine) -> TensorField {
    let dim = n.field().dim();
    TensorField::pointwise(
        format!("Tor({})", n.field().label()),
        (1, 2),
        0.0,
        n.field().domain().clone(),
        vec![vertical_derivative(n.field(), engine)],
        move |p| {
            let d = &p.parents[0];
            let at = |i: usize, j: usize, k: usize| &d[(i * dim + j) * dim + k];
            let mut out = Vec::with_capacity(dim * dim * dim);
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        out.push(at(i, j, k) - at(i, k, j));
                    }
                }
            }
            Ok(out)
        },
    )
}

/// `1/2 Tor^i_ja y^a`; equals [`nonlinear_residue`] by the Euler identity.
pub fn torsion_residue(n: &NonlinearConnection, engine: &DiffEngine) -> TensorField {
    liouville_contract(&torsion(n, engine))
        .expect("torsion has covariant indices")
        .scale(0.5)
}

fn inverse_or_error(m: &[Jet], n: usize, at: (&[f64], &[f64])) -> Result<Vec<Jet>> {
    linalg::invert_jets(m, n).ok_or_else(|| Error::Regularity {
        what: "singular fundamental tensor".into(),
        x: at.0.to_vec(),
        y: at.1.to_vec(),
    })
}

fn check_invertible_fundamental(l: &Lagrangian) -> Result<()> {
    let n = l.dim();
    for p in validation_samples(l.domain())? {
        let phi = l.fundamental().values(&p.x, &p.y)?;
        if linalg::invert(&phi, n).is_none() {
            return Err(Error::Regularity {
                what: "singular fundamental tensor".into(),
                x: p.x,
                y: p.y,
            });
        }
    }
    Ok(())
}

/// `G^i = 1/4 phi^ic (d_a phi_cb + d_b phi_ac - d_c phi_ab) y^a y^b`.
pub fn canonical_spray(l: &Lagrangian, engine: &DiffEngine) -> Result<Spray> {
    check_invertible_fundamental(l)?;
    let n = l.dim();
    let phi = l.fundamental().clone();
    let dphi = x_derivative(&phi, engine);
    let field = TensorField::pointwise(
        format!("G({})", l.field().label()),
        (1, 0),
        2.0,
        l.domain().clone(),
        vec![phi, dphi],
        move |p| {
            let inv = inverse_or_error(&p.parents[0], n, p.at)?;
            let d = &p.parents[1];
            // d_a phi_cb at [(c * n + b) * n + a]
            let dx = |c: usize, b: usize, a: usize| &d[(c * n + b) * n + a];
            let mut lowered = Vec::with_capacity(n);
            for c in 0..n {
                let mut acc = p.constant(0.0);
                for a in 0..n {
                    for b in 0..n {
                        let bracket = dx(c, b, a) + dx(a, c, b) - dx(a, b, c);
                        acc += bracket * &p.y[a] * &p.y[b];
                    }
                }
                lowered.push(acc);
            }
            Ok((0..n)
                .map(|i| {
                    let mut acc = p.constant(0.0);
                    for c in 0..n {
                        acc += &inv[i * n + c] * &lowered[c];
                    }
                    acc * 0.25
                })
                .collect())
        },
    );
    Spray::new(field)
}

/// `N = dG` for the canonical spray.
pub fn canonical_nonlinear(l: &Lagrangian, engine: &DiffEngine) -> Result<NonlinearConnection> {
    Ok(canonical_spray(l, engine)?.raise(engine))
}

/// Berwald connection `dN` of the canonical nonlinear connection.
pub fn berwald_connection(l: &Lagrangian, engine: &DiffEngine) -> Result<AnisotropicConnection> {
    let c = canonical_nonlinear(l, engine)?.raise(engine);
    Ok(AnisotropicConnection {
        field: c.field.with_label(format!("Ber({})", l.field().label())),
    })
}

/// Chern connection: `Gamma^i_jk = 1/2 phi^il (D_j phi_lk + D_k phi_lj - D_l phi_jk)`
/// with `D_j = d/dx^j - N^a_j d/dy^a` for the canonical `N`.
pub fn chern_connection(l: &Lagrangian, engine: &DiffEngine) -> Result<AnisotropicConnection> {
    let n = l.dim();
    let nl = canonical_nonlinear(l, engine)?;
    let phi = l.fundamental().clone();
    let dx = x_derivative(&phi, engine);
    let dy = vertical_derivative(&phi, engine);
    let field = TensorField::pointwise(
        format!("Ch({})", l.field().label()),
        (1, 2),
        0.0,
        l.domain().clone(),
        vec![phi, dx, dy, nl.field().clone()],
        move |p| {
            let inv = inverse_or_error(&p.parents[0], n, p.at)?;
            let (dx, dy, nn) = (&p.parents[1], &p.parents[2], &p.parents[3]);
            // D_j phi_lk
            let delta = |l: usize, k: usize, j: usize| {
                let mut acc = dx[(l * n + k) * n + j].clone();
                for a in 0..n {
                    acc -= &nn[a * n + j] * &dy[(l * n + k) * n + a];
                }
                acc
            };
            let mut lowered = Vec::with_capacity(n * n * n);
            for l in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        lowered.push(delta(l, k, j) + delta(l, j, k) - delta(j, k, l));
                    }
                }
            }
            let mut out = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut acc = p.constant(0.0);
                        for l in 0..n {
                            acc += &inv[i * n + l] * &lowered[(l * n + j) * n + k];
                        }
                        out.push(acc * 0.5);
                    }
                }
            }
            Ok(out)
        },
    );
    AnisotropicConnection::new(field)
}

/// `Lan = Chern - Berwald`.
pub fn landsberg_tensor(l: &Lagrangian, engine: &DiffEngine) -> Result<TensorField> {
    Ok(chern_connection(l, engine)?
        .field()
        .sub(berwald_connection(l, engine)?.field())?
        .with_label(format!("Lan({})", l.field().label())))
}
