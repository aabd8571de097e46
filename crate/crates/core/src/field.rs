//! Chart-local anisotropic tensor fields and the two ladder operators.
//!
//! Components are stored row-major, contravariant indices first, so the
//! component `T^{i_1..i_r}_{j_1..j_s}` sits at
//! `((i_1 n + i_2) n + ... + j_1) n + ... + j_s`. The vertical derivative
//! appends its index in the last covariant slot and the Liouville
//! contraction consumes the last covariant slot.
//!
//! A field is either *analytic* (it can produce Taylor jets of its
//! components in the `2n` variables `(x, y)`) or *plain* (point values
//! only). Derivatives of analytic fields are exact; plain fields are
//! differentiated with a fourth-order central difference.

use std::fmt;
use std::sync::Arc;

use crate::domain::ConicDomain;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};

pub type JetClosure = dyn Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync;
pub type PlainClosure = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;
pub type PointwiseClosure = dyn Fn(&Pointwise<'_>) -> Result<Vec<Jet>> + Send + Sync;
pub type JetPointMap = dyn Fn(&[Jet], &[Jet]) -> (Vec<Jet>, Vec<Jet>) + Send + Sync;

/// Arguments handed to a pointwise combinator.
pub struct Pointwise<'a> {
    /// Coordinate jets of `x` (seeded, or order-0 constants for plain parents).
    pub x: &'a [Jet],
    /// Coordinate jets of `y`.
    pub y: &'a [Jet],
    /// Component jets of each parent, in the order the parents were given.
    pub parents: &'a [Vec<Jet>],
    /// The base point.
    pub at: (&'a [f64], &'a [f64]),
}

impl Pointwise<'_> {
    pub fn constant(&self, v: f64) -> Jet {
        Jet::constant(self.x[0].space(), v)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

trait Source: Send + Sync {
    fn analytic(&self) -> bool;
    fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>>;
    fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.taylor(x, y, 0)?.iter().map(Jet::value).collect())
    }
}

fn seeds(x: &[f64], y: &[f64], order: usize) -> (Vec<Jet>, Vec<Jet>) {
    let mut point = x.to_vec();
    point.extend_from_slice(y);
    let mut s = Jet::seeds(&point, order);
    let ys = s.split_off(x.len());
    (s, ys)
}

struct FromJets(Arc<JetClosure>);

impl Source for FromJets {
    fn analytic(&self) -> bool {
        true
    }
    fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
        let (xs, ys) = seeds(x, y, order);
        Ok((self.0)(&xs, &ys))
    }
}

struct FromFn(Arc<PlainClosure>);

impl Source for FromFn {
    fn analytic(&self) -> bool {
        false
    }
    fn taylor(&self, _: &[f64], _: &[f64], _: usize) -> Result<Vec<Jet>> {
        Err(Error::NotAnalytic("plain closure".into()))
    }
    fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Ok((self.0)(x, y))
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Horizontal,
    Vertical,
}

struct Derivative {
    parent: TensorField,
    slot: Slot,
    /// `Some(step_scale)` for the finite-difference route.
    fd: Option<f64>,
}

impl Source for Derivative {
    fn analytic(&self) -> bool {
        self.fd.is_none() && self.parent.is_analytic()
    }

    fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
        if !self.analytic() {
            return Err(Error::NotAnalytic(self.parent.label().to_string()));
        }
        let n = x.len();
        let offset = match self.slot {
            Slot::Horizontal => 0,
            Slot::Vertical => n,
        };
        let parent = self.parent.source().taylor(x, y, order + 1)?;
        let mut out = Vec::with_capacity(parent.len() * n);
        for c in &parent {
            for j in 0..n {
                out.push(c.derivative(offset + j));
            }
        }
        Ok(out)
    }

    fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let Some(step_scale) = self.fd else {
            return Ok(self.taylor(x, y, 0)?.iter().map(Jet::value).collect());
        };
        let n = x.len();
        let src = self.parent.source();
        let moving = match self.slot {
            Slot::Horizontal => x,
            Slot::Vertical => y,
        };
        let h = fd_step(step_scale, moving);
        let len = self.parent.len();
        let mut out = vec![0.0; len * n];
        let mut shifted = moving.to_vec();
        for j in 0..n {
            let mut eval = |delta: f64| -> Result<Vec<f64>> {
                shifted[j] = moving[j] + delta;
                let r = match self.slot {
                    Slot::Horizontal => src.values(&shifted, y),
                    Slot::Vertical => src.values(x, &shifted),
                };
                shifted[j] = moving[j];
                r
            };
            let p2 = eval(2.0 * h)?;
            let p1 = eval(h)?;
            let m1 = eval(-h)?;
            let m2 = eval(-2.0 * h)?;
            for c in 0..len {
                out[c * n + j] = (-p2[c] + 8.0 * p1[c] - 8.0 * m1[c] + m2[c]) / (12.0 * h);
            }
        }
        Ok(out)
    }
}

/// Step `step_scale * cbrt(eps) * max(1, |v|_inf)`.
pub fn fd_step(step_scale: f64, v: &[f64]) -> f64 {
    let scale = v.iter().fold(1.0f64, |m, a| m.max(a.abs()));
    step_scale * f64::EPSILON.cbrt() * scale
}

struct Combine {
    parents: Vec<TensorField>,
    f: Arc<PointwiseClosure>,
}

impl Source for Combine {
    fn analytic(&self) -> bool {
        self.parents.iter().all(TensorField::is_analytic)
    }

    fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
        let parents = self
            .parents
            .iter()
            .map(|p| p.source().taylor(x, y, order))
            .collect::<Result<Vec<_>>>()?;
        let (xs, ys) = seeds(x, y, order);
        (self.f)(&Pointwise {
            x: &xs,
            y: &ys,
            parents: &parents,
            at: (x, y),
        })
    }

    fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        if self.analytic() {
            return Ok(self.taylor(x, y, 0)?.iter().map(Jet::value).collect());
        }
        let space = JetSpace::get(2 * x.len(), 0);
        let lift = |v: &[f64]| {
            v.iter()
                .map(|&a| Jet::constant(&space, a))
                .collect::<Vec<_>>()
        };
        let parents = self
            .parents
            .iter()
            .map(|p| p.source().values(x, y).map(|v| lift(&v)))
            .collect::<Result<Vec<_>>>()?;
        let (xs, ys) = (lift(x), lift(y));
        Ok((self.f)(&Pointwise {
            x: &xs,
            y: &ys,
            parents: &parents,
            at: (x, y),
        })?
        .iter()
        .map(Jet::value)
        .collect())
    }
}

struct Reparametrized {
    parent: TensorField,
    map: Arc<JetPointMap>,
}

impl Source for Reparametrized {
    fn analytic(&self) -> bool {
        self.parent.is_analytic()
    }

    fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
        let (xs, ys) = seeds(x, y, order);
        let (mx, my) = (self.map)(&xs, &ys);
        let base_x: Vec<f64> = mx.iter().map(Jet::value).collect();
        let base_y: Vec<f64> = my.iter().map(Jet::value).collect();
        let poly = self.parent.source().taylor(&base_x, &base_y, order)?;
        let args: Vec<Jet> = mx.iter().chain(&my).map(|j| j - j.value()).collect();
        Ok(poly.iter().map(|p| p.compose(&args)).collect())
    }

    fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (xs, ys) = seeds(x, y, 0);
        let (mx, my) = (self.map)(&xs, &ys);
        let bx: Vec<f64> = mx.iter().map(Jet::value).collect();
        let by: Vec<f64> = my.iter().map(Jet::value).collect();
        self.parent.source().values(&bx, &by)
    }
}

struct Inner {
    label: String,
    contra: usize,
    cov: usize,
    alpha: f64,
    domain: Arc<ConicDomain>,
    source: Arc<dyn Source>,
    vertical: Option<TensorField>,
    horizontal: Option<TensorField>,
}

/// Anisotropic tensor field of type `(r, s)` with declared homogeneity.
#[derive(Clone)]
pub struct TensorField {
    inner: Arc<Inner>,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField")
            .field("label", &self.inner.label)
            .field("type", &(self.inner.contra, self.inner.cov))
            .field("alpha", &self.inner.alpha)
            .field("domain", &self.inner.domain.name())
            .field("analytic", &self.is_analytic())
            .finish()
    }
}

impl TensorField {
    fn build(
        label: impl Into<String>,
        (contra, cov): (usize, usize),
        alpha: f64,
        domain: Arc<ConicDomain>,
        source: Arc<dyn Source>,
    ) -> Self {
        TensorField {
            inner: Arc::new(Inner {
                label: label.into(),
                contra,
                cov,
                alpha,
                domain,
                source,
                vertical: None,
                horizontal: None,
            }),
        }
    }

    /// Field whose components are given by a closure over jets. The closure
    /// receives the coordinate jets of `x` and `y` and must return `n^(r+s)`
    /// component jets.
    pub fn analytic(
        label: impl Into<String>,
        rank: (usize, usize),
        alpha: f64,
        domain: Arc<ConicDomain>,
        f: impl Fn(&[Jet], &[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        TensorField::build(label, rank, alpha, domain, Arc::new(FromJets(Arc::new(f))))
    }

    /// Field known only through point values.
    pub fn from_fn(
        label: impl Into<String>,
        rank: (usize, usize),
        alpha: f64,
        domain: Arc<ConicDomain>,
        f: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        TensorField::build(label, rank, alpha, domain, Arc::new(FromFn(Arc::new(f))))
    }

    /// Pointwise algebraic combination of parent fields. Analytic whenever
    /// every parent is.
    pub fn pointwise(
        label: impl Into<String>,
        rank: (usize, usize),
        alpha: f64,
        domain: Arc<ConicDomain>,
        parents: Vec<TensorField>,
        f: impl Fn(&Pointwise<'_>) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        TensorField::build(
            label,
            rank,
            alpha,
            domain,
            Arc::new(Combine {
                parents,
                f: Arc::new(f),
            }),
        )
    }

    /// Components of `parent` read at the image of a point map given in jets
    /// (new coordinates to the parent's coordinates).
    pub fn reparametrized(
        label: impl Into<String>,
        parent: &TensorField,
        domain: Arc<ConicDomain>,
        map: Arc<JetPointMap>,
    ) -> Self {
        TensorField::build(
            label,
            (parent.contra(), parent.cov()),
            parent.alpha(),
            domain,
            Arc::new(Reparametrized {
                parent: parent.clone(),
                map,
            }),
        )
    }

    /// The Liouville field `y^i`.
    pub fn liouville(domain: Arc<ConicDomain>) -> Self {
        TensorField::analytic("C", (1, 0), 1.0, domain, |_, y| y.to_vec())
    }

    /// Kronecker delta as a `(1, 1)` field of homogeneity 0.
    pub fn kronecker(domain: Arc<ConicDomain>) -> Self {
        let n = domain.dim();
        TensorField::analytic("delta", (1, 1), 0.0, domain, move |_, y| {
            identity_jets(y, n)
        })
    }

    /// Euclidean metric `delta_ij` as a `(0, 2)` field of homogeneity 0.
    pub fn identity_metric(domain: Arc<ConicDomain>) -> Self {
        let n = domain.dim();
        TensorField::analytic("delta", (0, 2), 0.0, domain, move |_, y| {
            identity_jets(y, n)
        })
    }

    pub fn zero(rank: (usize, usize), alpha: f64, domain: Arc<ConicDomain>) -> Self {
        let len = domain.dim().pow((rank.0 + rank.1) as u32);
        TensorField::analytic("0", rank, alpha, domain, move |_, y| {
            vec![Jet::zero(y[0].space()); len]
        })
    }

    fn with_inner(&self, f: impl FnOnce(&mut Inner)) -> Self {
        let i = &self.inner;
        let mut inner = Inner {
            label: i.label.clone(),
            contra: i.contra,
            cov: i.cov,
            alpha: i.alpha,
            domain: i.domain.clone(),
            source: i.source.clone(),
            vertical: i.vertical.clone(),
            horizontal: i.horizontal.clone(),
        };
        f(&mut inner);
        TensorField {
            inner: Arc::new(inner),
        }
    }

    /// Attaches a hand-written vertical derivative.
    pub fn with_vertical(&self, derivative: TensorField) -> Result<Self> {
        if derivative.contra() != self.contra()
            || derivative.cov() != self.cov() + 1
            || derivative.dim() != self.dim()
        {
            return Err(Error::Shape(format!(
                "vertical derivative of `{}` must have type ({}, {})",
                self.label(),
                self.contra(),
                self.cov() + 1
            )));
        }
        let derivative = derivative.with_alpha(self.alpha() - 1.0);
        Ok(self.with_inner(|i| i.vertical = Some(derivative)))
    }

    /// Attaches a hand-written `x`-derivative.
    pub fn with_horizontal(&self, derivative: TensorField) -> Result<Self> {
        if derivative.contra() != self.contra()
            || derivative.cov() != self.cov() + 1
            || derivative.dim() != self.dim()
        {
            return Err(Error::Shape(format!(
                "x-derivative of `{}` must have type ({}, {})",
                self.label(),
                self.contra(),
                self.cov() + 1
            )));
        }
        let derivative = derivative.with_alpha(self.alpha());
        Ok(self.with_inner(|i| i.horizontal = Some(derivative)))
    }

    /// Same components with a different declared homogeneity.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        self.with_inner(|i| i.alpha = alpha)
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        let label = label.into();
        self.with_inner(|i| i.label = label)
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn contra(&self) -> usize {
        self.inner.contra
    }

    pub fn cov(&self) -> usize {
        self.inner.cov
    }

    pub fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    pub fn dim(&self) -> usize {
        self.inner.domain.dim()
    }

    /// Number of components, `n^(r+s)`.
    pub fn len(&self) -> usize {
        self.dim().pow((self.contra() + self.cov()) as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> &Arc<ConicDomain> {
        &self.inner.domain
    }

    pub fn is_analytic(&self) -> bool {
        self.inner.source.analytic()
    }

    pub fn has_vertical_closure(&self) -> bool {
        self.inner.vertical.is_some()
    }

    fn source(&self) -> &dyn Source {
        self.inner.source.as_ref()
    }

    /// Components at `(x, y)`, checked against the domain.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.inner.domain.check(x, y)?;
        self.values(x, y)
    }

    /// Components at `(x, y)` without the membership check.
    pub fn values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let v = self.source().values(x, y)?;
        if v.len() != self.len() {
            return Err(Error::Shape(format!(
                "`{}` produced {} components, expected {}",
                self.label(),
                v.len(),
                self.len()
            )));
        }
        Ok(v)
    }

    /// Taylor jets of all components about `(x, y)` in the variables
    /// `(x^1..x^n, y^1..y^n)`.
    pub fn taylor(&self, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
        if !self.is_analytic() {
            return Err(Error::NotAnalytic(self.label().to_string()));
        }
        self.source().taylor(x, y, order)
    }

    pub fn scale(&self, c: f64) -> Self {
        TensorField::pointwise(
            format!("{c}*{}", self.label()),
            (self.contra(), self.cov()),
            self.alpha(),
            self.domain().clone(),
            vec![self.clone()],
            move |p| Ok(p.parents[0].iter().map(|v| v * c).collect()),
        )
    }

    /// `sum_k c_k T_k` for fields of equal type and homogeneity.
    pub fn linear_combination(terms: &[(f64, &TensorField)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Shape("empty linear combination".into()))?;
        for (_, t) in terms {
            if t.contra() != first.contra()
                || t.cov() != first.cov()
                || t.dim() != first.dim()
                || t.alpha() != first.alpha()
            {
                return Err(Error::Shape(format!(
                    "cannot combine `{}` with `{}`",
                    first.label(),
                    t.label()
                )));
            }
        }
        let coeffs: Vec<f64> = terms.iter().map(|(c, _)| *c).collect();
        let label = terms
            .iter()
            .map(|(c, t)| format!("{c}*{}", t.label()))
            .collect::<Vec<_>>()
            .join(" + ");
        Ok(TensorField::pointwise(
            label,
            (first.contra(), first.cov()),
            first.alpha(),
            first.domain().clone(),
            terms.iter().map(|(_, t)| (*t).clone()).collect(),
            move |p| {
                let mut out: Vec<Jet> = p.parents[0].iter().map(|v| v * coeffs[0]).collect();
                for (k, parent) in p.parents.iter().enumerate().skip(1) {
                    for (o, v) in out.iter_mut().zip(parent) {
                        *o += v * coeffs[k];
                    }
                }
                Ok(out)
            },
        ))
    }

    pub fn add(&self, other: &TensorField) -> Result<Self> {
        TensorField::linear_combination(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &TensorField) -> Result<Self> {
        TensorField::linear_combination(&[(1.0, self), (-1.0, other)])
    }
}

fn identity_jets(y: &[Jet], n: usize) -> Vec<Jet> {
    let space = y[0].space();
    (0..n * n)
        .map(|k| Jet::constant(space, if k / n == k % n { 1.0 } else { 0.0 }))
        .collect()
}

/// Flat component index of a multi-index.
pub fn flat_index(n: usize, indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * n + i)
}

/// How derivatives are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMethod {
    /// Exact jets or an attached closure when available, else `Fd4`.
    Analytic,
    /// Fourth-order central differences on point values.
    Fd4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffEngine {
    pub method: DiffMethod,
    pub step_scale: f64,
}

impl Default for DiffEngine {
    fn default() -> Self {
        DiffEngine::analytic()
    }
}

impl DiffEngine {
    pub fn analytic() -> Self {
        DiffEngine {
            method: DiffMethod::Analytic,
            step_scale: 1.0,
        }
    }

    pub fn fd4() -> Self {
        DiffEngine {
            method: DiffMethod::Fd4,
            step_scale: 1.0,
        }
    }

    pub fn with_step_scale(self, step_scale: f64) -> Self {
        DiffEngine { step_scale, ..self }
    }

    fn derivative(&self, field: &TensorField, slot: Slot) -> TensorField {
        let attached = match slot {
            Slot::Vertical => &field.inner.vertical,
            Slot::Horizontal => &field.inner.horizontal,
        };
        let fd = match self.method {
            DiffMethod::Analytic => {
                if let Some(d) = attached {
                    return d.clone();
                }
                (!field.is_analytic()).then_some(self.step_scale)
            }
            DiffMethod::Fd4 => Some(self.step_scale),
        };
        let (prefix, alpha) = match slot {
            Slot::Vertical => ("dy", field.alpha() - 1.0),
            Slot::Horizontal => ("dx", field.alpha()),
        };
        TensorField::build(
            format!("{prefix}({})", field.label()),
            (field.contra(), field.cov() + 1),
            alpha,
            field.domain().clone(),
            Arc::new(Derivative {
                parent: field.clone(),
                slot,
                fd,
            }),
        )
    }
}

/// `T^..._{..., k} = dT^..._{...}/dy^k`, homogeneity lowered by one.
pub fn vertical_derivative(field: &TensorField, engine: &DiffEngine) -> TensorField {
    engine.derivative(field, Slot::Vertical)
}

/// `dT^..._{...}/dx^k` appended as the last covariant index. Not a tensor in
/// general; used for chart-local formulas.
pub fn x_derivative(field: &TensorField, engine: &DiffEngine) -> TensorField {
    engine.derivative(field, Slot::Horizontal)
}

/// Contraction of the last covariant index with `y`.
pub fn liouville_contract(field: &TensorField) -> Result<TensorField> {
    if field.cov() == 0 {
        return Err(Error::Rank(format!(
            "`{}` has no covariant index to contract",
            field.label()
        )));
    }
    let n = field.dim();
    Ok(TensorField::pointwise(
        format!("iC({})", field.label()),
        (field.contra(), field.cov() - 1),
        field.alpha() + 1.0,
        field.domain().clone(),
        vec![field.clone()],
        move |p| {
            let parent = &p.parents[0];
            Ok((0..parent.len() / n)
                .map(|c| {
                    let mut acc = &parent[c * n] * &p.y[0];
                    for a in 1..n {
                        acc += &parent[c * n + a] * &p.y[a];
                    }
                    acc
                })
                .collect())
        },
    ))
}

/// Pointwise Euler defect `T_{.a} y^a - alpha T`.
pub fn homogeneity_defect(
    field: &TensorField,
    engine: &DiffEngine,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    field.domain().check(x, y)?;
    let euler = liouville_contract(&vertical_derivative(field, engine))?;
    let lhs = euler.values(x, y)?;
    let t = field.values(x, y)?;
    Ok(lhs
        .iter()
        .zip(&t)
        .map(|(l, v)| l - field.alpha() * v)
        .collect())
}

/// Largest Euler defect divided by the size of the terms entering it
/// (`sum_a |T_{.a} y^a| + |alpha T|`), floored at 1 so that vanishing
/// fields are judged absolutely.
pub fn relative_homogeneity_defect(
    field: &TensorField,
    engine: &DiffEngine,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    field.domain().check(x, y)?;
    let n = field.dim();
    let d = vertical_derivative(field, engine).values(x, y)?;
    let t = field.values(x, y)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (c, v) in t.iter().enumerate() {
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for a in 0..n {
            let term = d[c * n + a] * y[a];
            sum += term;
            abs_sum += term.abs();
        }
        worst = worst.max((sum - field.alpha() * v).abs());
        scale = scale.max(abs_sum + (field.alpha() * v).abs());
    }
    Ok(worst / scale)
}

/// `max_c |T(x, lambda y) - lambda^alpha T(x, y)|`.
pub fn scaling_defect(field: &TensorField, x: &[f64], y: &[f64], lambda: f64) -> Result<f64> {
    let ly: Vec<f64> = y.iter().map(|v| v * lambda).collect();
    let a = field.values(x, &ly)?;
    let b = field.values(x, y)?;
    let f = lambda.powf(field.alpha());
    Ok(a.iter()
        .zip(&b)
        .map(|(u, v)| (u - f * v).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plane() -> Arc<ConicDomain> {
        Arc::new(ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0)))
    }

    fn euclidean(d: Arc<ConicDomain>) -> TensorField {
        TensorField::analytic("L", (0, 0), 2.0, d, |_, y| {
            vec![&y[0] * &y[0] + &y[1] * &y[1]]
        })
    }

    fn quartic(d: Arc<ConicDomain>) -> TensorField {
        TensorField::analytic("Lq", (0, 0), 2.0, d, |_, y| {
            vec![(y[0].powi(4) + y[1].powi(4)).sqrt()]
        })
    }

    #[test]
    fn evaluate_examples() {
        let d = plane();
        assert_eq!(
            euclidean(d.clone())
                .evaluate(&[0.3, 0.1], &[3.0, 4.0])
                .unwrap(),
            vec![25.0]
        );
        assert_eq!(
            TensorField::liouville(d.clone())
                .evaluate(&[0.0, 0.0], &[3.0, 4.0])
                .unwrap(),
            vec![3.0, 4.0]
        );
        let phi = vertical_derivative(
            &vertical_derivative(&euclidean(d.clone()), &DiffEngine::analytic()),
            &DiffEngine::analytic(),
        )
        .scale(0.5);
        assert_eq!(
            phi.evaluate(&[0.5, -0.5], &[1.0, 2.0]).unwrap(),
            vec![1.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn evaluate_rejects_zero_direction() {
        let d = plane();
        assert!(matches!(
            euclidean(d).evaluate(&[0.0, 0.0], &[0.0, 0.0]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn vertical_derivative_examples() {
        let d = plane();
        let e = DiffEngine::analytic();
        let dl = vertical_derivative(&euclidean(d.clone()), &e);
        assert_eq!((dl.contra(), dl.cov(), dl.alpha()), (0, 1, 1.0));
        assert_eq!(
            dl.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            vec![6.0, 8.0]
        );

        let dc = vertical_derivative(&TensorField::liouville(d.clone()), &e);
        assert_eq!(dc.alpha(), 0.0);
        assert_eq!(
            dc.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            vec![1.0, 0.0, 0.0, 1.0]
        );

        let dq = vertical_derivative(&quartic(d.clone()), &e)
            .evaluate(&[0.0, 0.0], &[1.0, 1.0])
            .unwrap();
        for v in dq {
            assert_relative_eq!(v, 2f64.sqrt(), max_relative = 1e-14);
        }
        // independent oracle: fd of the hand formula's antiderivative
        let dq_fd = vertical_derivative(&quartic(d), &DiffEngine::fd4())
            .values(&[0.0, 0.0], &[1.0, 1.0])
            .unwrap();
        for v in dq_fd {
            assert_relative_eq!(v, 2f64.sqrt(), max_relative = 1e-9);
        }
    }

    #[test]
    fn liouville_contract_examples() {
        let d = plane();
        let e = DiffEngine::analytic();
        let c = liouville_contract(&vertical_derivative(&euclidean(d.clone()), &e)).unwrap();
        assert_eq!(c.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), vec![50.0]);
        let g = liouville_contract(&TensorField::identity_metric(d.clone())).unwrap();
        assert_eq!(
            g.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            vec![3.0, 4.0]
        );
        let cc = liouville_contract(&vertical_derivative(&TensorField::liouville(d.clone()), &e))
            .unwrap();
        assert_eq!(
            cc.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            vec![3.0, 4.0]
        );
        assert!(matches!(
            liouville_contract(&euclidean(d)),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn homogeneity_defect_examples() {
        let d = plane();
        let e = DiffEngine::analytic();
        let l = euclidean(d.clone());
        assert!(homogeneity_defect(&l, &e, &[0.2, 0.2], &[1.3, -0.4]).unwrap()[0].abs() < 1e-14);
        let y1 = TensorField::analytic("y1", (0, 0), 2.0, d.clone(), |_, y| vec![y[0].clone()]);
        assert_relative_eq!(
            homogeneity_defect(&y1, &e, &[0.0, 0.0], &[1.0, 1.0]).unwrap()[0],
            -1.0
        );
        let q = homogeneity_defect(
            &quartic(d.clone()),
            &DiffEngine::fd4(),
            &[0.0, 0.0],
            &[1.0, 1.0],
        )
        .unwrap();
        assert!(q[0].abs() < 1e-8);
    }

    #[test]
    fn fd4_is_exact_on_cubics() {
        let d = Arc::new(ConicDomain::slit("wide", vec![(-1.0, 1.0); 2], (0.5, 10.0)));
        let cubic = TensorField::from_fn("cubic", (0, 0), 3.0, d.clone(), |_, y| {
            vec![y[0].powi(3) - 2.0 * y[0] * y[0] * y[1] + 0.5 * y[1].powi(3)]
        });
        let exact = |y: &[f64]| {
            vec![
                3.0 * y[0] * y[0] - 4.0 * y[0] * y[1],
                -2.0 * y[0] * y[0] + 1.5 * y[1] * y[1],
            ]
        };
        let fd = vertical_derivative(&cubic, &DiffEngine::analytic());
        for p in d.samples(100, 5).unwrap() {
            let got = fd.values(&p.x, &p.y).unwrap();
            let want = exact(&p.y);
            let scale = want.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() / scale <= 1e-8, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn attached_closure_is_used_and_agrees_with_fd() {
        let d = plane();
        let l = TensorField::from_fn("L", (0, 0), 2.0, d.clone(), |_, y| {
            vec![y[0] * y[0] + 3.0 * y[1] * y[1]]
        });
        let dl = TensorField::from_fn("dL", (0, 1), 1.0, d.clone(), |_, y| {
            vec![2.0 * y[0], 6.0 * y[1]]
        });
        let l = l.with_vertical(dl).unwrap();
        assert!(l.has_vertical_closure());
        let a = vertical_derivative(&l, &DiffEngine::analytic());
        let f = vertical_derivative(&l, &DiffEngine::fd4());
        for p in d.samples(50, 1).unwrap() {
            let va = a.values(&p.x, &p.y).unwrap();
            let vf = f.values(&p.x, &p.y).unwrap();
            for (u, v) in va.iter().zip(&vf) {
                assert!((u - v).abs() <= 1e-6 * u.abs().max(1.0));
            }
        }
        let err = l.with_vertical(TensorField::zero((0, 0), 1.0, d));
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn x_derivative_of_conformal_factor() {
        let d = plane();
        let l = TensorField::analytic("Lc", (0, 0), 2.0, d.clone(), |x, y| {
            vec![(&x[0] * 2.0).exp() * (&y[0] * &y[0] + &y[1] * &y[1])]
        });
        let x = [0.3, -0.2];
        let y = [1.0, 2.0];
        let want = 2.0 * (0.6f64).exp() * 5.0;
        let a = x_derivative(&l, &DiffEngine::analytic())
            .values(&x, &y)
            .unwrap();
        let f = x_derivative(&l, &DiffEngine::fd4()).values(&x, &y).unwrap();
        assert_relative_eq!(a[0], want, max_relative = 1e-14);
        assert_eq!(a[1], 0.0);
        assert_relative_eq!(f[0], want, max_relative = 1e-9);
        assert_eq!(x_derivative(&l, &DiffEngine::analytic()).alpha(), 2.0);
    }

    #[test]
    fn reparametrized_field_matches_direct_substitution() {
        let d = plane();
        let l = euclidean(d.clone());
        // read L at (x, 2y)
        let map: Arc<JetPointMap> =
            Arc::new(|x: &[Jet], y: &[Jet]| (x.to_vec(), y.iter().map(|v| v * 2.0).collect()));
        let r = TensorField::reparametrized("L2", &l, d, map);
        let dr = vertical_derivative(&r, &DiffEngine::analytic());
        assert_relative_eq!(r.values(&[0.0, 0.0], &[1.0, 1.0]).unwrap()[0], 8.0);
        let g = dr.values(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_relative_eq!(g[0], 8.0, max_relative = 1e-14);
        assert_relative_eq!(g[1], 8.0, max_relative = 1e-14);
    }

    #[test]
    fn index_layout_puts_contravariant_first() {
        assert_eq!(flat_index(2, &[1, 0, 1]), 5);
        assert_eq!(flat_index(3, &[2, 1]), 7);
    }
}
