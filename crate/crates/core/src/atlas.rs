//! Chart transitions and the transformation laws of tensors and
//! connection-type objects.
//!
//! For a transition `x~ = f(x)` with Jacobian `J^i_a = dx~^i/dx^a`, inverse
//! Jacobian `K^a_i = dx^a/dx~^i` and Hessian `H^i_ab`, fiber coordinates
//! change as `y~ = J y`.

use std::fmt;
use std::sync::Arc;

use crate::connections::{
    lower_connection, raise_connection, AnisotropicConnection, ConnectionObject,
    NonlinearConnection, Spray,
};
use crate::domain::{ConicDomain, Point, SamplerSpec};
use crate::error::{Error, Result};
use crate::field::{DiffEngine, TensorField};
use crate::jet::Jet;
use crate::linalg;

/// A map on chart coordinates, evaluated on jets.
pub type ChartMap = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;
pub type OverlapPredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ChartTransition {
    name: String,
    dim: usize,
    forward: ChartMap,
    inverse: ChartMap,
    /// `J(x)`, row-major.
    jacobian: ChartMap,
    /// `K(x) = J(x)^{-1}`, as a function of the old coordinates.
    inverse_jacobian: ChartMap,
    /// `H^i_ab(x)` at `(i * n + a) * n + b`.
    hessian: ChartMap,
    /// Old-chart points where both charts are defined.
    overlap: OverlapPredicate,
}

impl fmt::Debug for ChartTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartTransition")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

/// Largest defects found by [`ChartTransition::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransitionDefects {
    pub round_trip: f64,
    pub jacobian_product: f64,
    pub jacobian_consistency: f64,
    pub hessian_consistency: f64,
    pub hessian_symmetry: f64,
}

impl TransitionDefects {
    pub fn max(&self) -> f64 {
        [
            self.round_trip,
            self.jacobian_product,
            self.jacobian_consistency,
            self.hessian_consistency,
            self.hessian_symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn matvec(m: &[Jet], v: &[Jet]) -> Vec<Jet> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = &m[i * n] * &v[0];
            for a in 1..n {
                acc += &m[i * n + a] * &v[a];
            }
            acc
        })
        .collect()
}

fn lift(v: &[f64]) -> Vec<Jet> {
    let space = crate::jet::JetSpace::get(v.len().max(1), 0);
    v.iter().map(|&a| Jet::constant(&space, a)).collect()
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

impl ChartTransition {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        forward: ChartMap,
        inverse: ChartMap,
        jacobian: ChartMap,
        inverse_jacobian: ChartMap,
        hessian: ChartMap,
        overlap: OverlapPredicate,
    ) -> Self {
        ChartTransition {
            name: name.into(),
            dim,
            forward,
            inverse,
            jacobian,
            inverse_jacobian,
            hessian,
            overlap,
        }
    }

    pub fn identity(dim: usize) -> Self {
        ChartTransition::affine("id", vec_identity(dim), vec![0.0; dim])
            .expect("identity is invertible")
    }

    /// `x~ = A x + b`.
    pub fn affine(name: impl Into<String>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if a.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries for a {n} x {n} matrix",
                a.len()
            )));
        }
        let inv = linalg::invert(&a, n)
            .ok_or_else(|| Error::Shape("affine transition with singular matrix".into()))?;
        let (a1, b1, inv1, inv2) = (a.clone(), b.clone(), inv.clone(), inv.clone());
        let (a2, b2) = (a.clone(), b);
        let constants = |m: Vec<f64>| -> ChartMap {
            Arc::new(move |x: &[Jet]| m.iter().map(|&v| Jet::constant(x[0].space(), v)).collect())
        };
        Ok(ChartTransition::new(
            name,
            n,
            Arc::new(move |x: &[Jet]| {
                let m: Vec<Jet> = a1.iter().map(|&v| Jet::constant(x[0].space(), v)).collect();
                matvec(&m, x)
                    .into_iter()
                    .zip(&b1)
                    .map(|(v, c)| v + *c)
                    .collect()
            }),
            Arc::new(move |xt: &[Jet]| {
                let m: Vec<Jet> = inv1
                    .iter()
                    .map(|&v| Jet::constant(xt[0].space(), v))
                    .collect();
                let shifted: Vec<Jet> = xt.iter().zip(&b2).map(|(v, c)| v - *c).collect();
                matvec(&m, &shifted)
            }),
            constants(a2),
            constants(inv2),
            constants(vec![0.0; n * n * n]),
            Arc::new(|_| true),
        ))
    }

    /// `x~^1 = x^1 + c (x^2)^2`, other coordinates unchanged (`n = 2`).
    pub fn quadratic_shear(name: impl Into<String>, c: f64) -> Self {
        let constant = |x: &[Jet], v: f64| Jet::constant(x[0].space(), v);
        ChartTransition::new(
            name,
            2,
            Arc::new(move |x: &[Jet]| vec![&x[0] + &x[1] * &x[1] * c, x[1].clone()]),
            Arc::new(move |xt: &[Jet]| vec![&xt[0] - &xt[1] * &xt[1] * c, xt[1].clone()]),
            Arc::new(move |x: &[Jet]| {
                vec![
                    constant(x, 1.0),
                    &x[1] * (2.0 * c),
                    constant(x, 0.0),
                    constant(x, 1.0),
                ]
            }),
            Arc::new(move |x: &[Jet]| {
                vec![
                    constant(x, 1.0),
                    &x[1] * (-2.0 * c),
                    constant(x, 0.0),
                    constant(x, 1.0),
                ]
            }),
            Arc::new(move |x: &[Jet]| {
                let mut h = vec![constant(x, 0.0); 8];
                h[3] = constant(x, 2.0 * c);
                h
            }),
            Arc::new(|_| true),
        )
    }

    /// `next` after `self`: `x~~ = next(self(x))`.
    pub fn then(&self, next: &ChartTransition) -> ChartTransition {
        let n = self.dim;
        let (a, b) = (self.clone(), next.clone());
        let fwd = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[Jet]| (b.forward)(&(a.forward)(x))) as ChartMap
        };
        let inv = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |xt: &[Jet]| (a.inverse)(&(b.inverse)(xt))) as ChartMap
        };
        let jac = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[Jet]| mat_mul(&(b.jacobian)(&(a.forward)(x)), &(a.jacobian)(x), n))
                as ChartMap
        };
        let ijac = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[Jet]| {
                mat_mul(
                    &(a.inverse_jacobian)(x),
                    &(b.inverse_jacobian)(&(a.forward)(x)),
                    n,
                )
            }) as ChartMap
        };
        let hess = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[Jet]| {
                let mid = (a.forward)(x);
                let (j1, h1) = ((a.jacobian)(x), (a.hessian)(x));
                let (j2, h2) = ((b.jacobian)(&mid), (b.hessian)(&mid));
                let mut out = Vec::with_capacity(n * n * n);
                for i in 0..n {
                    for p in 0..n {
                        for q in 0..n {
                            let mut acc = Jet::zero(x[0].space());
                            for c in 0..n {
                                acc += &j2[i * n + c] * &h1[(c * n + p) * n + q];
                                for d in 0..n {
                                    acc +=
                                        &h2[(i * n + c) * n + d] * &j1[c * n + p] * &j1[d * n + q];
                                }
                            }
                            out.push(acc);
                        }
                    }
                }
                out
            }) as ChartMap
        };
        let overlap = {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[f64]| {
                (a.overlap)(x) && (b.overlap)(&values(&(a.forward)(&lift(x))))
            }) as OverlapPredicate
        };
        ChartTransition::new(
            format!("{}.{}", next.name, self.name),
            n,
            fwd,
            inv,
            jac,
            ijac,
            hess,
            overlap,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_overlap(&self, x: &[f64]) -> bool {
        (self.overlap)(x)
    }

    /// `(x~, J y)`.
    pub fn map_point(&self, p: &Point) -> Point {
        let x = lift(&p.x);
        let xt = values(&(self.forward)(&x));
        let yt = values(&matvec(&(self.jacobian)(&x), &lift(&p.y)));
        Point::new(xt, yt)
    }

    /// `(x, K y~)`.
    pub fn pull_point(&self, p: &Point) -> Point {
        let x = (self.inverse)(&lift(&p.x));
        let y = values(&matvec(&(self.inverse_jacobian)(&x), &lift(&p.y)));
        Point::new(values(&x), y)
    }

    /// Largest defects of the transition data at old-chart sample points.
    pub fn validate(&self, samples: &[Point]) -> TransitionDefects {
        let n = self.dim;
        let mut d = TransitionDefects::default();
        for p in samples.iter().filter(|p| self.in_overlap(&p.x)) {
            let seeds = Jet::seeds(&p.x, 2);
            let f = (self.forward)(&seeds);
            let back = values(&(self.inverse)(&lift(&values(&f))));
            for (b, x) in back.iter().zip(&p.x) {
                d.round_trip = d.round_trip.max((b - x).abs());
            }
            let x0 = lift(&p.x);
            let j = values(&(self.jacobian)(&x0));
            let k = values(&(self.inverse_jacobian)(&x0));
            let h = values(&(self.hessian)(&x0));
            for i in 0..n {
                for a in 0..n {
                    let prod: f64 = (0..n).map(|c| j[i * n + c] * k[c * n + a]).sum();
                    let id = if i == a { 1.0 } else { 0.0 };
                    d.jacobian_product = d.jacobian_product.max((prod - id).abs());
                    let dfa = f[i].derivative(a);
                    d.jacobian_consistency = d
                        .jacobian_consistency
                        .max((dfa.value() - j[i * n + a]).abs());
                    for b in 0..n {
                        let hab = h[(i * n + a) * n + b];
                        d.hessian_consistency = d
                            .hessian_consistency
                            .max((dfa.derivative(b).value() - hab).abs());
                        d.hessian_symmetry =
                            d.hessian_symmetry.max((hab - h[(i * n + b) * n + a]).abs());
                    }
                }
            }
        }
        d
    }

    /// The image of `domain` in the new chart, restricted to the overlap.
    pub fn transform_domain(&self, domain: &Arc<ConicDomain>) -> Arc<ConicDomain> {
        let (t1, t2) = (self.clone(), self.clone());
        let (base, base2) = (domain.clone(), domain.clone());
        let membership = move |xt: &[f64], yt: &[f64]| {
            let p = t1.pull_point(&Point::new(xt, yt));
            t1.in_overlap(&p.x) && base.contains(&p.x, &p.y)
        };
        let map = Arc::new(move |p: &Point| t2.in_overlap(&p.x).then(|| t2.map_point(p)));
        Arc::new(ConicDomain::new(
            format!("{}[{}]", domain.name(), self.name),
            self.dim,
            membership,
            SamplerSpec::PushForward { base: base2, map },
        ))
    }

    /// Jet map from new coordinates `(x~, y~)` to old ones `(x, K y~)`.
    fn pullback_map(&self) -> Arc<crate::field::JetPointMap> {
        let t = self.clone();
        Arc::new(move |xt: &[Jet], yt: &[Jet]| {
            let x = (t.inverse)(xt);
            let y = matvec(&(t.inverse_jacobian)(&x), yt);
            (x, y)
        })
    }

    /// Old coordinates, Jacobian, inverse Jacobian and Hessian as jets of the
    /// new coordinates.
    fn frame(&self, xt: &[Jet], yt: &[Jet]) -> Frame {
        let x = (self.inverse)(xt);
        let k = (self.inverse_jacobian)(&x);
        let y = matvec(&k, yt);
        Frame {
            j: (self.jacobian)(&x),
            h: (self.hessian)(&x),
            k,
            y,
        }
    }
}

struct Frame {
    j: Vec<Jet>,
    k: Vec<Jet>,
    h: Vec<Jet>,
    /// Old fiber coordinates.
    y: Vec<Jet>,
}

fn vec_identity(n: usize) -> Vec<f64> {
    (0..n * n)
        .map(|k| if k / n == k % n { 1.0 } else { 0.0 })
        .collect()
}

fn mat_mul(a: &[Jet], b: &[Jet], n: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = &a[i * n] * &b[j];
            for c in 1..n {
                acc += &a[i * n + c] * &b[c * n + j];
            }
            out.push(acc);
        }
    }
    out
}

/// Applies `m` to one index slot: `out[.., i, ..] = sum_a m[i][a] t[.., a, ..]`.
fn apply_slot(
    t: &[Jet],
    m: impl Fn(usize, usize) -> Jet,
    slot: usize,
    rank: usize,
    n: usize,
) -> Vec<Jet> {
    let stride = n.pow((rank - 1 - slot) as u32);
    (0..t.len())
        .map(|flat| {
            let i = (flat / stride) % n;
            let base = flat - i * stride;
            let mut acc = m(i, 0) * &t[base];
            for a in 1..n {
                acc += m(i, a) * &t[base + a * stride];
            }
            acc
        })
        .collect()
}

fn tensor_components(t: &[Jet], contra: usize, cov: usize, f: &Frame, n: usize) -> Vec<Jet> {
    let rank = contra + cov;
    let mut out = t.to_vec();
    for slot in 0..rank {
        out = if slot < contra {
            apply_slot(&out, |i, a| f.j[i * n + a].clone(), slot, rank, n)
        } else {
            apply_slot(&out, |j, b| f.k[b * n + j].clone(), slot, rank, n)
        };
    }
    out
}

/// Standard tensor transformation: `J` on contravariant slots, `K` on
/// covariant ones.
pub fn transform_tensor(field: &TensorField, t: &ChartTransition) -> Result<TensorField> {
    check_dim(field, t)?;
    let n = t.dim;
    let (contra, cov) = (field.contra(), field.cov());
    let domain = t.transform_domain(field.domain());
    let pulled =
        TensorField::reparametrized(field.label(), field, domain.clone(), t.pullback_map());
    let tc = t.clone();
    Ok(TensorField::pointwise(
        format!("{}[{}]", field.label(), t.name),
        (contra, cov),
        field.alpha(),
        domain,
        vec![pulled],
        move |p| {
            let f = tc.frame(p.x, p.y);
            Ok(tensor_components(&p.parents[0], contra, cov, &f, n))
        },
    ))
}

fn check_dim(field: &TensorField, t: &ChartTransition) -> Result<()> {
    if field.dim() != t.dim {
        return Err(Error::Shape(format!(
            "`{}` has dimension {}, transition `{}` has {}",
            field.label(),
            field.dim(),
            t.name,
            t.dim
        )));
    }
    Ok(())
}

/// Transformation law of sprays, nonlinear and anisotropic connections:
///
/// * `G~^i = -1/2 H^i_bc y^b y^c + J^i_a G^a`
/// * `N~^i_j = -H^i_bc K^b_j y^c + J^i_a K^b_j N^a_b`
/// * `Gamma~^i_jk = -H^i_bc K^b_j K^c_k + J^i_a K^b_j K^c_k Gamma^a_bc`
pub fn transform_connection(
    obj: &ConnectionObject,
    t: &ChartTransition,
) -> Result<ConnectionObject> {
    let field = obj.field();
    check_dim(field, t)?;
    let n = t.dim;
    let level = obj.level();
    let (contra, cov) = level.rank();
    let domain = t.transform_domain(field.domain());
    let pulled =
        TensorField::reparametrized(field.label(), field, domain.clone(), t.pullback_map());
    let tc = t.clone();
    let transformed = TensorField::pointwise(
        format!("{}[{}]", field.label(), t.name),
        (contra, cov),
        field.alpha(),
        domain,
        vec![pulled],
        move |p| {
            let f = tc.frame(p.x, p.y);
            let mut out = tensor_components(&p.parents[0], contra, cov, &f, n);
            // inhomogeneous term: -c H^i_bc with the lower slots fed by y or K
            let slot = |b: usize, slot_index: usize, free: &[usize]| -> Jet {
                if slot_index < cov {
                    f.k[b * n + free[slot_index]].clone()
                } else {
                    f.y[b].clone()
                }
            };
            let factor = if cov == 0 { -0.5 } else { -1.0 };
            for (flat, o) in out.iter_mut().enumerate() {
                let i = flat / n.pow(cov as u32);
                let free: Vec<usize> = (0..cov)
                    .map(|s| (flat / n.pow((cov - 1 - s) as u32)) % n)
                    .collect();
                let mut acc = Jet::zero(p.y[0].space());
                for b in 0..n {
                    for c in 0..n {
                        acc += &f.h[(i * n + b) * n + c] * slot(b, 0, &free) * slot(c, 1, &free);
                    }
                }
                *o += acc * factor;
            }
            Ok(out)
        },
    );
    ConnectionObject::from_field(transformed)
}

pub fn transform_spray(g: &Spray, t: &ChartTransition) -> Result<Spray> {
    match transform_connection(&ConnectionObject::Spray(g.clone()), t)? {
        ConnectionObject::Spray(s) => Ok(s),
        _ => unreachable!(),
    }
}

pub fn transform_nonlinear(
    nl: &NonlinearConnection,
    t: &ChartTransition,
) -> Result<NonlinearConnection> {
    match transform_connection(&ConnectionObject::Nonlinear(nl.clone()), t)? {
        ConnectionObject::Nonlinear(s) => Ok(s),
        _ => unreachable!(),
    }
}

pub fn transform_anisotropic(
    c: &AnisotropicConnection,
    t: &ChartTransition,
) -> Result<AnisotropicConnection> {
    match transform_connection(&ConnectionObject::Anisotropic(c.clone()), t)? {
        ConnectionObject::Anisotropic(s) => Ok(s),
        _ => unreachable!(),
    }
}

/// One commutation identity between a ladder move and a chart change.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceEntry {
    pub identity: String,
    pub max_defect: f64,
    pub worst: Option<Point>,
}

fn max_difference(
    a: &TensorField,
    b: &TensorField,
    samples: &[Point],
) -> Result<(f64, Option<Point>)> {
    let mut worst = (0.0, None);
    for p in samples {
        let (u, v) = (a.values(&p.x, &p.y)?, b.values(&p.x, &p.y)?);
        let d = u
            .iter()
            .zip(&v)
            .map(|(s, t)| (s - t).abs())
            .fold(0.0, f64::max);
        if d > worst.0 || worst.1.is_none() {
            worst = (d.max(worst.0), Some(p.clone()));
        }
    }
    Ok(worst)
}

/// Defects of `move(transform(obj))` against `transform(move(obj))` for each
/// ladder move applicable to `obj`, at the images of the old-chart samples
/// lying in the overlap.
pub fn coherence_defect(
    obj: &ConnectionObject,
    t: &ChartTransition,
    samples: &[Point],
    engine: &DiffEngine,
) -> Result<Vec<CoherenceEntry>> {
    let mapped: Vec<Point> = samples
        .iter()
        .filter(|p| t.in_overlap(&p.x))
        .map(|p| t.map_point(p))
        .collect();
    let transformed = transform_connection(obj, t)?;
    let mut out = Vec::new();
    if let Ok(raised) = raise_connection(obj, engine) {
        let a = raise_connection(&transformed, engine)?;
        let b = transform_connection(&raised, t)?;
        let (max_defect, worst) = max_difference(a.field(), b.field(), &mapped)?;
        out.push(CoherenceEntry {
            identity: format!("raise_{}", obj.level()),
            max_defect,
            worst,
        });
    }
    if let Ok(lowered) = lower_connection(obj) {
        let a = lower_connection(&transformed)?;
        let b = transform_connection(&lowered, t)?;
        let (max_defect, worst) = max_difference(a.field(), b.field(), &mapped)?;
        out.push(CoherenceEntry {
            identity: format!("lower_{}", obj.level()),
            max_defect,
            worst,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Arc<ConicDomain> {
        Arc::new(ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0)))
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn transition_validation() {
        let samples = plane().samples(50, 3).unwrap();
        let q = ChartTransition::quadratic_shear("quad", 1.0);
        assert!(q.validate(&samples).max() < 1e-12);
        let a = ChartTransition::affine("lin", vec![2.0, 1.0, 0.0, 1.0], vec![0.5, -1.0]).unwrap();
        let composed = q.then(&a);
        assert!(composed.validate(&samples).max() < 1e-12);
        let wrong = ChartTransition::new(
            "wrong",
            2,
            q.forward.clone(),
            q.inverse.clone(),
            a.jacobian.clone(),
            q.inverse_jacobian.clone(),
            q.hessian.clone(),
            Arc::new(|_| true),
        );
        assert!(wrong.validate(&samples).jacobian_consistency > 0.1);
    }

    #[test]
    fn tensors_under_transitions() {
        let d = plane();
        let p = Point::new(vec![0.3, -0.4], vec![1.0, 2.0]);
        let id = ChartTransition::identity(2);
        let f = TensorField::analytic("T", (1, 1), 1.0, d.clone(), |x, y| {
            vec![&y[0] * &x[0], y[1].clone(), &y[0] + &y[1], &y[1] * &x[1]]
        });
        let ft = transform_tensor(&f, &id).unwrap();
        assert_eq!(
            ft.evaluate(&p.x, &p.y).unwrap(),
            f.evaluate(&p.x, &p.y).unwrap()
        );

        let double = ChartTransition::affine("double", vec![2.0], vec![0.0]).unwrap();
        let line = Arc::new(ConicDomain::slit("line", vec![(-1.0, 1.0)], (0.5, 2.0)));
        let s = TensorField::analytic("s", (0, 0), 2.0, line, |x, y| {
            vec![&y[0] * &y[0] * x[0].exp()]
        });
        let st = transform_tensor(&s, &double).unwrap();
        let q = double.map_point(&Point::new(vec![0.2], vec![0.7]));
        close(
            &st.evaluate(&q.x, &q.y).unwrap(),
            &s.evaluate(&[0.2], &[0.7]).unwrap(),
            1e-15,
        );

        let quad = ChartTransition::quadratic_shear("quad", 1.0);
        let c = transform_tensor(&TensorField::liouville(d.clone()), &quad).unwrap();
        let q = quad.map_point(&p);
        close(&c.evaluate(&q.x, &q.y).unwrap(), &q.y, 1e-15);

        let right = Arc::new(ConicDomain::new(
            "right",
            2,
            |_, y| y[0] > 0.0,
            d.sampler().clone(),
        ));
        let c = transform_tensor(&TensorField::liouville(right), &quad).unwrap();
        assert!(c.evaluate(&[0.0, 0.0], &[1.0, 1.0]).is_ok());
        assert!(matches!(
            c.evaluate(&[0.0, 0.0], &[-1.0, 1.0]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn flat_objects_under_quadchart() {
        let d = plane();
        let quad = ChartTransition::quadratic_shear("quad", 1.0);
        let q = quad.map_point(&Point::new(vec![0.1, 0.5], vec![0.3, -1.2]));
        let yt = q.y[1];
        let g = transform_spray(
            &Spray::new(TensorField::zero((1, 0), 2.0, d.clone())).unwrap(),
            &quad,
        )
        .unwrap();
        close(
            &g.field().evaluate(&q.x, &q.y).unwrap(),
            &[-yt * yt, 0.0],
            1e-14,
        );
        let nl = NonlinearConnection::new(TensorField::zero((1, 1), 1.0, d.clone())).unwrap();
        let nt = transform_nonlinear(&nl, &quad).unwrap();
        close(
            &nt.field().evaluate(&q.x, &q.y).unwrap(),
            &[0.0, -2.0 * yt, 0.0, 0.0],
            1e-14,
        );
        let c = AnisotropicConnection::new(TensorField::zero((1, 2), 0.0, d)).unwrap();
        let ct = transform_anisotropic(&c, &quad).unwrap();
        let mut expected = vec![0.0; 8];
        expected[3] = -2.0;
        close(&ct.field().evaluate(&q.x, &q.y).unwrap(), &expected, 1e-14);
    }

    #[test]
    fn coherence_and_composition() {
        let d = plane();
        let e = DiffEngine::analytic();
        let samples = d.samples(40, 9).unwrap();
        let g = Spray::new(TensorField::analytic(
            "G",
            (1, 0),
            2.0,
            d.clone(),
            |x, y| vec![&y[0] * &y[1] * &x[1], &y[0] * &y[0] - &y[1] * &y[1] * &x[0]],
        ))
        .unwrap();
        let quad = ChartTransition::quadratic_shear("quad", 1.0);
        for obj in [
            ConnectionObject::Spray(g.clone()),
            ConnectionObject::Nonlinear(g.raise(&e)),
            ConnectionObject::Anisotropic(g.raise(&e).raise(&e)),
        ] {
            for entry in coherence_defect(&obj, &quad, &samples, &e).unwrap() {
                assert!(entry.max_defect < 1e-12, "{entry:?}");
            }
            for entry in
                coherence_defect(&obj, &ChartTransition::identity(2), &samples, &e).unwrap()
            {
                assert_eq!(entry.max_defect, 0.0);
            }
        }

        let lin =
            ChartTransition::affine("lin", vec![1.0, 0.5, -0.3, 2.0], vec![0.1, 0.0]).unwrap();
        let twice = transform_spray(&transform_spray(&g, &quad).unwrap(), &lin).unwrap();
        let once = transform_spray(&g, &quad.then(&lin)).unwrap();
        for p in &samples {
            let q = quad.then(&lin).map_point(p);
            close(
                &twice.field().evaluate(&q.x, &q.y).unwrap(),
                &once.field().evaluate(&q.x, &q.y).unwrap(),
                1e-12,
            );
        }
    }
}
