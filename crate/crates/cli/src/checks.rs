//! The property checks and the suite runner.

use finsler::atlas::{coherence_defect, transform_connection, transform_spray, transform_tensor};
use finsler::catalog::{self, Example};
use finsler::connections::{
    berwald_connection, canonical_nonlinear, canonical_spray, chern_connection, landsberg_tensor,
    nonlinear_residue, torsion_residue, AnisotropicConnection, ConnectionObject,
    NonlinearConnection, Spray,
};
use finsler::field::relative_homogeneity_defect;
use finsler::functional::{
    evaluate_action, extend_functional, gauge_symmetrize, kernel_shift, restrict_functional,
    ActionFunctional, LadderObject, ObjectLevel, Quadrature,
};
use finsler::geodesic::geodesic_integrate;
use finsler::ladder::{cascade_factor, decompose, destroy_residues, kernel_defect, reconstruct};
use finsler::linearconn::{classical_linear, ClassicalKind, LinearConnection};
use finsler::linearconn::{covariant_derivative, covariant_derivative_natural};
use finsler::metrics::{
    lagrangian_of_metric, legendre_of, legendre_residue, signature_at, AnisotropicMetric,
    Lagrangian, EIGENVALUE_ZERO_TOLERANCE,
};
use finsler::{
    liouville_contract, vertical_derivative, DiffEngine, Error, Point, Result, TensorField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::CheckReport;

/// Check vocabulary, sorted.
pub const CHECKS: [&str; 18] = [
    "canonical_spray_oracle",
    "classical_regular",
    "cocycle_coherence",
    "connection_roundtrip",
    "euler",
    "functional_laws",
    "geodesic",
    "ladder_roundtrip",
    "landsberg_kernel",
    "landsberg_riemannian",
    "legendre_residue",
    "levi_civita_oracle",
    "linear_roundtrip",
    "signature_table",
    "torsion_residue",
    "wick_destroy",
    "wick_identity",
    "wick_signature_probe",
];

const LAGRANGIAN_CHECKS: [&str; 11] = [
    "canonical_spray_oracle",
    "classical_regular",
    "connection_roundtrip",
    "euler",
    "functional_laws",
    "geodesic",
    "ladder_roundtrip",
    "landsberg_kernel",
    "legendre_residue",
    "linear_roundtrip",
    "torsion_residue",
];

/// Examples run by the `report` subcommand.
pub const REPORT_EXAMPLES: [&str; 9] = [
    "euclidean2",
    "minkowski2",
    "conformal2",
    "quartic2",
    "wick(0.5)",
    "wick(-1)",
    "wick(-2)",
    "handmadeN",
    "quadchart",
];

/// Number of residue shifts tried by `functional_laws`.
const GAUGE_SHIFTS: usize = 8;
/// Trajectories integrated by `geodesic` (besides the straight-line probe).
const GEODESIC_TRAJECTORIES: usize = 4;

fn is_riemannian(example: &str) -> bool {
    matches!(example, "euclidean2" | "minkowski2" | "conformal2")
}

fn is_lagrangian(example: &str) -> bool {
    is_riemannian(example) || example == "quartic2"
}

/// Checks meaningful for an example; unknown examples have none.
pub fn applicable_checks(example: &str) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = if is_lagrangian(example) {
        let mut v = LAGRANGIAN_CHECKS.to_vec();
        if is_riemannian(example) {
            v.extend(["landsberg_riemannian", "levi_civita_oracle"]);
        }
        v
    } else if catalog::parse_wick(example).is_some() {
        vec![
            "euler",
            "ladder_roundtrip",
            "signature_table",
            "wick_destroy",
            "wick_identity",
            "wick_signature_probe",
        ]
    } else if example == "handmadeN" {
        vec![
            "connection_roundtrip",
            "euler",
            "ladder_roundtrip",
            "torsion_residue",
        ]
    } else if example == "quadchart" {
        vec!["cocycle_coherence", "euler"]
    } else {
        Vec::new()
    };
    out.sort();
    out
}

/// Running maximum of a defect with the sample attaining it.
#[derive(Debug, Clone, Default)]
struct Worst {
    max: f64,
    at: Option<Point>,
    used: usize,
}

impl Worst {
    fn record(&mut self, defect: f64, p: &Point) {
        if self.max.is_nan() {
            return;
        }
        let worse = defect > self.max || defect.is_nan();
        if self.at.is_none() || worse {
            self.max = defect;
            self.at = Some(p.clone());
        }
    }

    fn merge(&mut self, other: Worst) {
        if let Some(p) = &other.at {
            self.record(other.max, p);
        }
        self.used = self.used.max(other.used);
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| {
        if x.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(x.abs())
        }
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    max_abs(&d)
}

fn field_diff(a: &TensorField, b: &TensorField, p: &Point) -> Result<f64> {
    Ok(max_diff(&a.values(&p.x, &p.y)?, &b.values(&p.x, &p.y)?))
}

/// Largest pointwise difference of pairs of fields over the samples.
fn compare(pairs: &[(TensorField, TensorField)], samples: &[Point]) -> Result<Worst> {
    let mut w = Worst {
        used: samples.len(),
        ..Worst::default()
    };
    for p in samples {
        for (a, b) in pairs {
            w.record(field_diff(a, b, p)?, p);
        }
    }
    Ok(w)
}

/// Largest component of each field over the samples.
fn magnitude(fields: &[TensorField], samples: &[Point]) -> Result<Worst> {
    let mut w = Worst {
        used: samples.len(),
        ..Worst::default()
    };
    for p in samples {
        for f in fields {
            w.record(max_abs(&f.values(&p.x, &p.y)?), p);
        }
    }
    Ok(w)
}

struct Context<'a> {
    example: &'a Example,
    samples: Vec<Point>,
    engine: DiffEngine,
    config: &'a RunConfig,
}

impl Context<'_> {
    fn lagrangian(&self) -> Result<&Lagrangian> {
        self.example.lagrangian.as_ref().ok_or_else(|| {
            Error::Shape(format!("example `{}` has no Lagrangian", self.example.name))
        })
    }

    fn metric(&self) -> Result<(&AnisotropicMetric, f64)> {
        match (&self.example.metric, self.example.kappa) {
            (Some(g), Some(k)) => Ok((g, k)),
            _ => Err(Error::Shape(format!(
                "example `{}` has no metric",
                self.example.name
            ))),
        }
    }

    fn nonlinear(&self) -> Result<NonlinearConnection> {
        match (&self.example.nonlinear, &self.example.lagrangian) {
            (Some(n), _) => Ok(n.clone()),
            (None, Some(l)) => canonical_nonlinear(l, &self.engine),
            _ => Err(Error::Shape(format!(
                "example `{}` has no nonlinear connection",
                self.example.name
            ))),
        }
    }
}

/// Runs one check. Engine errors propagate; defects are reported.
pub fn run_check(name: &str, example: &Example, config: &RunConfig) -> Result<CheckReport> {
    let samples = example.domain.samples(config.samples, config.seed)?;
    let ctx = Context {
        example,
        samples,
        engine: config.engine(),
        config,
    };
    let worst = match name {
        "canonical_spray_oracle" => canonical_spray_oracle(&ctx)?,
        "classical_regular" => classical_regular(&ctx)?,
        "cocycle_coherence" => cocycle_coherence(&ctx)?,
        "connection_roundtrip" => connection_roundtrip(&ctx)?,
        "euler" => euler(&ctx)?,
        "functional_laws" => functional_laws(&ctx)?,
        "geodesic" => geodesic(&ctx)?,
        "ladder_roundtrip" => ladder_roundtrip(&ctx)?,
        "landsberg_kernel" => {
            let lan = landsberg_tensor(ctx.lagrangian()?, &ctx.engine)?;
            magnitude(&[liouville_contract(&lan)?], &ctx.samples)?
        }
        "landsberg_riemannian" => magnitude(
            &[landsberg_tensor(ctx.lagrangian()?, &ctx.engine)?],
            &ctx.samples,
        )?,
        "legendre_residue" => {
            let ell = legendre_of(ctx.lagrangian()?)?;
            magnitude(&[legendre_residue(&ell, &ctx.engine)], &ctx.samples)?
        }
        "levi_civita_oracle" => levi_civita_oracle(&ctx)?,
        "linear_roundtrip" => linear_roundtrip(&ctx)?,
        "signature_table" => signature_table(&ctx, false)?,
        "wick_signature_probe" => signature_table(&ctx, true)?,
        "torsion_residue" => {
            let n = ctx.nonlinear()?;
            let delta = nonlinear_residue(&n, &ctx.engine);
            let mut w = compare(
                &[(delta.clone(), torsion_residue(&n, &ctx.engine))],
                &ctx.samples,
            )?;
            w.merge(magnitude(&[liouville_contract(&delta)?], &ctx.samples)?);
            w
        }
        "wick_destroy" => wick_destroy(&ctx)?,
        "wick_identity" => wick_identity(&ctx)?,
        other => return Err(Error::Shape(format!("unknown check `{other}`"))),
    };
    Ok(CheckReport::new(
        name,
        worst.max,
        worst.used,
        config.tolerance,
        worst.at,
    ))
}

/// Runs every configured check on the configured example, sorted by name.
pub fn run_suite(config: &RunConfig) -> Result<Vec<CheckReport>> {
    // Catalog objects carry exact derivatives; the configured engine drives
    // the operators applied on top of them.
    let example = catalog::example(&config.example, DiffEngine::analytic())?;
    config
        .resolved_checks()
        .iter()
        .map(|c| run_check(c, &example, config))
        .collect()
}

fn euler(ctx: &Context) -> Result<Worst> {
    let exact = DiffEngine::analytic();
    let ex = ctx.example;
    let fields: Vec<TensorField> = if let Some(l) = &ex.lagrangian {
        let mut v = vec![
            l.field().clone(),
            vertical_derivative(l.field(), &exact),
            l.fundamental().clone(),
        ];
        if let Some(g) = &ex.metric {
            v.push(g.field().clone());
            v.push(lagrangian_of_metric(g)?);
        } else {
            let g = canonical_spray(l, &exact)?;
            v.push(g.raise(&exact).into_field());
            v.push(g.into_field());
            v.push(chern_connection(l, &exact)?.into_field());
            v.push(finsler::linearconn::cartan_tensor(l, &exact));
        }
        v
    } else if let Some(n) = &ex.nonlinear {
        vec![
            n.field().clone(),
            nonlinear_residue(n, &exact),
            finsler::connections::torsion(n, &exact),
        ]
    } else if let Some(t) = &ex.transition {
        let conformal = catalog::conformal2(exact);
        let g = canonical_spray(&conformal, &exact)?;
        vec![
            transform_spray(&g, t)?.into_field(),
            finsler::atlas::transform_nonlinear(&catalog::handmade_n(), t)?.into_field(),
            transform_tensor(conformal.field(), t)?,
        ]
    } else {
        Vec::new()
    };
    let mut w = Worst::default();
    for f in &fields {
        // Transformed fields live on the pushed-forward domain.
        let samples = if f.domain().name() == ex.domain.name() {
            ctx.samples.clone()
        } else {
            f.domain().samples(ctx.config.samples, ctx.config.seed)?
        };
        w.used = w.used.max(samples.len());
        for p in &samples {
            w.record(relative_homogeneity_defect(f, &ctx.engine, &p.x, &p.y)?, p);
        }
    }
    Ok(w)
}

fn ladder_roundtrip(ctx: &Context) -> Result<Worst> {
    let exact = DiffEngine::analytic();
    let ex = ctx.example;
    let objects: Vec<TensorField> = if let Some(g) = &ex.metric {
        vec![g.field().clone()]
    } else if let Some(l) = &ex.lagrangian {
        vec![
            vertical_derivative(l.field(), &exact),
            l.fundamental().clone(),
        ]
    } else if let Some(n) = &ex.nonlinear {
        vec![n.field().clone()]
    } else {
        Vec::new()
    };
    let mut w = Worst {
        used: ctx.samples.len(),
        ..Worst::default()
    };
    for s in &objects {
        let (_, omega) = finsler::ladder::ladder_label(s)?;
        let d = decompose(s, omega, &ctx.engine)?;
        let back = reconstruct(&d, &ctx.engine)?;
        for p in &ctx.samples {
            let mut defect = field_diff(&back, s, p)?;
            for r in &d.residues {
                defect = defect.max(kernel_defect(r, &p.x, &p.y)?);
            }
            w.record(defect, p);
        }
    }
    Ok(w)
}

/// Probe directions for the signature table: the unit axis direction first,
/// then the samples.
fn probes(ctx: &Context) -> Vec<Point> {
    let mut v = vec![Point::new(vec![0.0, 0.0], vec![1.0, 0.0])];
    v.extend(ctx.samples.iter().cloned());
    v.retain(|p| ctx.example.domain.contains(&p.x, &p.y));
    v
}

fn expected_signature(kappa: f64) -> (usize, usize, usize) {
    if kappa > -1.0 {
        (2, 0, 0)
    } else if kappa == -1.0 {
        (1, 0, 1)
    } else {
        (1, 1, 0)
    }
}

/// `signature_table` counts eigenvalue sign mismatches against the expected
/// signature; `wick_signature_probe` reports the smallest eigenvalue distance
/// from the zero threshold in the wrong direction.
fn signature_table(ctx: &Context, margin: bool) -> Result<Worst> {
    let (g, kappa) = ctx.metric()?;
    let expected = expected_signature(kappa);
    let points = probes(ctx);
    let mut w = Worst {
        used: points.len(),
        ..Worst::default()
    };
    for p in &points {
        if margin {
            let m = g.field().evaluate(&p.x, &p.y)?;
            let ev = finsler::linalg::symmetric_eigenvalues(&m, g.field().dim());
            let zero = ev.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
            let defect = if expected.2 > 0 { zero } else { 0.0 };
            w.record(defect, p);
        } else {
            let (a, b, c) = signature_at(g, &p.x, &p.y, EIGENVALUE_ZERO_TOLERANCE)?;
            let mismatch = a.abs_diff(expected.0) + b.abs_diff(expected.1) + c.abs_diff(expected.2);
            w.record(mismatch as f64, p);
        }
    }
    Ok(w)
}

fn wick_identity(ctx: &Context) -> Result<Worst> {
    let (g, kappa) = ctx.metric()?;
    let l = ctx.lagrangian()?;
    let phi_v = liouville_contract(l.fundamental())?;
    let g_v = liouville_contract(g.field())?;
    let lg = lagrangian_of_metric(g)?;
    compare(
        &[
            (g_v, phi_v.scale(1.0 + kappa)),
            (lg, l.field().scale(0.5 * (1.0 + kappa))),
        ],
        &ctx.samples,
    )
}

fn wick_destroy(ctx: &Context) -> Result<Worst> {
    let (g, kappa) = ctx.metric()?;
    let phi = ctx.lagrangian()?.fundamental().scale(1.0 + kappa);
    let destroyed =
        destroy_residues(g.field(), 0, 2, &ctx.engine)?.scale(1.0 / cascade_factor(0, 2));
    let integrable = decompose(g.field(), 2, &ctx.engine)?.integrable_part(&ctx.engine);
    compare(&[(destroyed, phi.clone()), (integrable, phi)], &ctx.samples)
}

fn spray_oracle(name: &str, domain: std::sync::Arc<finsler::ConicDomain>) -> TensorField {
    match name {
        "conformal2" => TensorField::analytic("oracle G", (1, 0), 2.0, domain, |_, y| {
            vec![(&y[0] * &y[0] - &y[1] * &y[1]) * 0.5, &y[0] * &y[1]]
        }),
        _ => TensorField::zero((1, 0), 2.0, domain),
    }
}

fn levi_civita(name: &str, domain: std::sync::Arc<finsler::ConicDomain>) -> TensorField {
    match name {
        "conformal2" => TensorField::from_fn("oracle LC", (1, 2), 0.0, domain, |_, _| {
            vec![1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 1.0, 0.0]
        }),
        _ => TensorField::zero((1, 2), 0.0, domain),
    }
}

fn canonical_spray_oracle(ctx: &Context) -> Result<Worst> {
    let l = ctx.lagrangian()?;
    let g = canonical_spray(l, &ctx.engine)?;
    let oracle = spray_oracle(&ctx.example.name, l.domain().clone());
    compare(&[(g.into_field(), oracle)], &ctx.samples)
}

fn levi_civita_oracle(ctx: &Context) -> Result<Worst> {
    let l = ctx.lagrangian()?;
    let lc = levi_civita(&ctx.example.name, l.domain().clone());
    compare(
        &[
            (berwald_connection(l, &ctx.engine)?.into_field(), lc.clone()),
            (chern_connection(l, &ctx.engine)?.into_field(), lc),
        ],
        &ctx.samples,
    )
}

fn connection_roundtrip(ctx: &Context) -> Result<Worst> {
    let e = &ctx.engine;
    let mut pairs = Vec::new();
    if let Some(l) = &ctx.example.lagrangian {
        let g = canonical_spray(l, e)?;
        pairs.push((g.raise(e).lower().into_field(), g.field().clone()));
    }
    let n = ctx.nonlinear()?;
    pairs.push((n.raise(e).lower().into_field(), n.field().clone()));
    let spray_part = n.lower().raise(e);
    let residue = nonlinear_residue(&n, e);
    pairs.push((spray_part.field().add(&residue)?, n.field().clone()));
    compare(&pairs, &ctx.samples)
}

fn linear_roundtrip(ctx: &Context) -> Result<Worst> {
    let e = &ctx.engine;
    let l = ctx.lagrangian()?;
    let n = canonical_nonlinear(l, e)?;
    let mut pairs = Vec::new();
    for gamma in [berwald_connection(l, e)?, chern_connection(l, e)?] {
        let back = LinearConnection::embed_trivial(&gamma).project_intrinsic()?;
        pairs.push((back.into_field(), gamma.into_field()));
    }
    let mut derivative_checks = Vec::new();
    for kind in [ClassicalKind::Hashiguchi, ClassicalKind::Cartan] {
        let conn = classical_linear(l, kind, e)?;
        let (gamma, delta) = conn.project_with_n(&n)?;
        let rebuilt = LinearConnection::from_parts(&gamma, &delta, &n)?;
        pairs.push((rebuilt.hat1().clone(), conn.hat1().clone()));
        pairs.push((rebuilt.hat2().clone(), conn.hat2().clone()));
        derivative_checks.push(conn);
    }
    let mut w = compare(&pairs, &ctx.samples)?;
    let z = TensorField::liouville(l.domain().clone());
    let (x_h, x_v) = ([1.0, 0.5], [0.3, -0.2]);
    for conn in &derivative_checks {
        for p in &ctx.samples {
            let a = covariant_derivative(conn, &n, &x_h, &x_v, &z, &p.x, &p.y, e)?;
            let b = covariant_derivative_natural(conn, &n, &x_h, &x_v, &z, &p.x, &p.y, e)?;
            w.record(max_diff(&a, &b), p);
        }
    }
    Ok(w)
}

fn classical_regular(ctx: &Context) -> Result<Worst> {
    let e = &ctx.engine;
    let l = ctx.lagrangian()?;
    let n = canonical_nonlinear(l, e)?;
    let mut w = Worst {
        used: ctx.samples.len(),
        ..Worst::default()
    };
    for kind in ClassicalKind::ALL {
        let conn = classical_linear(l, kind, e)?;
        let induced = conn.induced_nonlinear()?;
        for p in &ctx.samples {
            let b = conn.b_matrix(&p.x, &p.y)?;
            let irregular = if b.strongly_regular { 0.0 } else { 1.0 };
            let defect =
                b.contraction_defect
                    .max(irregular)
                    .max(field_diff(induced.field(), n.field(), p)?);
            w.record(defect, p);
        }
    }
    Ok(w)
}

fn sum_of_squares(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum()
}

fn squares_functional(level: ObjectLevel, q: &Quadrature, engine: DiffEngine) -> ActionFunctional {
    ActionFunctional::new(level, q.clone(), |obj, x, y| {
        Ok(sum_of_squares(&obj.components(x, y)?))
    })
    .with_engine(engine)
}

fn functional_laws(ctx: &Context) -> Result<Worst> {
    use ObjectLevel::*;
    let e = ctx.engine;
    let l = ctx.lagrangian()?;
    let q = Quadrature::uniform(l.domain(), ctx.config.samples, ctx.config.seed)?;
    let probe = q.points()[0].clone();
    let g = canonical_spray(l, &e)?;
    let n = g.raise(&e);
    let chern = chern_connection(l, &e)?;
    let berwald = berwald_connection(l, &e)?;
    let mut w = Worst {
        used: q.points().len(),
        ..Worst::default()
    };

    // extend then restrict along each edge
    let edges = [
        (Spray, Nonlinear, LadderObject::Spray(g.clone())),
        (Nonlinear, Anisotropic, LadderObject::Nonlinear(n.clone())),
        (
            Anisotropic,
            Linear,
            LadderObject::Anisotropic(chern.clone()),
        ),
    ];
    for (low, high, obj) in edges {
        let f0 = squares_functional(low, &q, e);
        let round = restrict_functional(&extend_functional(&f0, low, high)?, high, low)?;
        let d = (evaluate_action(&round, &obj)? - evaluate_action(&f0, &obj)?).abs();
        w.record(d, &probe);
    }

    // gauge invariance under residue shifts
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let sym_n = gauge_symmetrize(&squares_functional(Nonlinear, &q, e), Nonlinear)?;
    let sym_a = gauge_symmetrize(&squares_functional(Anisotropic, &q, e), Anisotropic)?;
    let base_n = evaluate_action(&sym_n, &LadderObject::Nonlinear(n.clone()))?;
    let base_a = evaluate_action(&sym_a, &LadderObject::Anisotropic(chern.clone()))?;
    for _ in 0..GAUGE_SHIFTS {
        let cn: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ca: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted_n = NonlinearConnection::new(n.field().add(&kernel_shift(
            Nonlinear,
            &cn,
            l.domain().clone(),
        )?)?)?;
        let shifted_a = AnisotropicConnection::new(chern.field().add(&kernel_shift(
            Anisotropic,
            &ca,
            l.domain().clone(),
        )?)?)?;
        let dn = evaluate_action(&sym_n, &LadderObject::Nonlinear(shifted_n))? - base_n;
        let da = evaluate_action(&sym_a, &LadderObject::Anisotropic(shifted_a))? - base_a;
        w.record(dn.abs().max(da.abs()), &probe);
    }

    // the symmetrized functional cannot tell Chern from Berwald
    let on_berwald = evaluate_action(&sym_a, &LadderObject::Anisotropic(berwald))?;
    w.record((on_berwald - base_a).abs(), &probe);
    Ok(w)
}

fn geodesic(ctx: &Context) -> Result<Worst> {
    let l = ctx.lagrangian()?;
    let spray: Spray = canonical_spray(l, &ctx.engine)?;
    let mut w = Worst::default();
    if ctx.example.name == "euclidean2" {
        let (x0, y0) = ([0.0, 0.0], [1.0, 2.0]);
        let t = geodesic_integrate(&spray, &x0, &y0, 0.01, 100)?;
        let end = t.last();
        let exact = Point::new(vec![x0[0] + y0[0], x0[1] + y0[1]], y0.to_vec());
        let err = if t.truncated {
            f64::INFINITY
        } else {
            max_diff(&end.x, &exact.x).max(max_diff(&end.y, &exact.y))
        };
        w.record(err, &Point::new(x0.to_vec(), y0.to_vec()));
        w.used += 1;
    }
    for p in ctx.samples.iter().take(GEODESIC_TRAJECTORIES) {
        let t = geodesic_integrate(&spray, &p.x, &p.y, 1e-3, 1000)?;
        let l0 = l.field().values(&p.x, &p.y)?[0];
        let mut drift: f64 = if t.truncated { f64::INFINITY } else { 0.0 };
        for s in &t.states {
            let v = l.field().values(&s.x, &s.y)?[0];
            drift = drift.max(((v - l0) / l0).abs());
        }
        w.record(drift, p);
        w.used += 1;
    }
    Ok(w)
}

fn cocycle_coherence(ctx: &Context) -> Result<Worst> {
    let e = &ctx.engine;
    let t =
        ctx.example.transition.as_ref().ok_or_else(|| {
            Error::Shape(format!("example `{}` has no transition", ctx.example.name))
        })?;
    let domain = ctx.example.domain.clone();
    let conformal = catalog::conformal2(DiffEngine::analytic());
    let g = canonical_spray(&conformal, e)?;
    let objects = [
        ConnectionObject::Spray(g.clone()),
        ConnectionObject::Nonlinear(g.raise(e)),
        ConnectionObject::Anisotropic(berwald_connection(&conformal, e)?),
        ConnectionObject::Nonlinear(catalog::handmade_n()),
    ];
    let mut w = Worst {
        used: ctx.samples.len(),
        ..Worst::default()
    };
    for obj in &objects {
        for entry in coherence_defect(obj, t, &ctx.samples, e)? {
            if let Some(p) = &entry.worst {
                w.record(entry.max_defect, p);
            }
        }
    }

    // pushed-forward flat objects against their closed forms
    let flat = [
        ConnectionObject::Spray(Spray::new(TensorField::zero((1, 0), 2.0, domain.clone()))?),
        ConnectionObject::Nonlinear(NonlinearConnection::new(TensorField::zero(
            (1, 1),
            1.0,
            domain.clone(),
        ))?),
        ConnectionObject::Anisotropic(AnisotropicConnection::new(TensorField::zero(
            (1, 2),
            0.0,
            domain,
        ))?),
    ];
    for obj in &flat {
        let moved = transform_connection(obj, t)?;
        for p in ctx.samples.iter().filter(|p| t.in_overlap(&p.x)) {
            let q = t.map_point(p);
            let y2 = q.y[1];
            let expected = match obj {
                ConnectionObject::Spray(_) => vec![-y2 * y2, 0.0],
                ConnectionObject::Nonlinear(_) => vec![0.0, -2.0 * y2, 0.0, 0.0],
                ConnectionObject::Anisotropic(_) => {
                    vec![0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0]
                }
            };
            w.record(max_diff(&moved.field().values(&q.x, &q.y)?, &expected), &q);
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_is_sorted_and_covers_applicability() {
        let mut sorted = CHECKS.to_vec();
        sorted.sort();
        assert_eq!(sorted, CHECKS.to_vec());
        for ex in REPORT_EXAMPLES {
            let checks = applicable_checks(ex);
            assert!(!checks.is_empty(), "{ex}");
            assert!(checks.iter().all(|c| CHECKS.contains(c)));
        }
        let all: std::collections::BTreeSet<&str> = REPORT_EXAMPLES
            .iter()
            .flat_map(|e| applicable_checks(e))
            .collect();
        assert_eq!(all.len(), CHECKS.len());
    }
}
