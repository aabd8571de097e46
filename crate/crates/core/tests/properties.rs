use std::sync::Arc;

use approx::assert_abs_diff_eq;
use finsler::atlas::{coherence_defect, ChartTransition};
use finsler::connections::{AnisotropicConnection, ConnectionObject, NonlinearConnection, Spray};
use finsler::field::{relative_homogeneity_defect, scaling_defect};
use finsler::jet::Jet;
use finsler::ladder::{decompose, kernel_defect, project_image, reconstruct};
use finsler::linearconn::LinearConnection;
use finsler::{liouville_contract, vertical_derivative, ConicDomain, DiffEngine, TensorField};
use proptest::prelude::*;

fn plane() -> Arc<ConicDomain> {
    Arc::new(ConicDomain::slit("plane", vec![(-1.0, 1.0); 2], (0.5, 2.0)))
}

/// `(a y1^2 + b y1 y2 + c y2^2 + d |y|^2) (1 + e x1 + f x2^2) |y|^(alpha - 2)`.
fn scalar(c: &[f64], alpha: f64) -> TensorField {
    let c = c.to_vec();
    TensorField::analytic("s", (0, 0), alpha, plane(), move |x, y| {
        let r2 = &y[0] * &y[0] + &y[1] * &y[1];
        let q = &y[0] * &y[0] * c[0] + &y[0] * &y[1] * c[1] + &y[1] * &y[1] * c[2] + &r2 * c[3];
        let p = &x[0] * c[4] + &x[1] * &x[1] * c[5] + 1.0;
        vec![q * p * r2.powf((alpha - 2.0) / 2.0)]
    })
}

/// A 1-homogeneous 1-form: gradient part plus a kernel part.
fn one_form(c: &[f64]) -> TensorField {
    let c = c.to_vec();
    TensorField::analytic("w", (0, 1), 1.0, plane(), move |x, y| {
        let r = (&y[0] * &y[0] + &y[1] * &y[1]).sqrt();
        let k = &x[0] * c[4] + c[5];
        vec![
            &y[0] * c[0] + &y[1] * c[1] - &y[1] * &k,
            &y[0] * c[2] + &y[1] * c[3] + &y[0] * &k + &r * c[6],
        ]
    })
}

fn coefficient(c: &[f64], x: &[Jet], y: &[Jet]) -> Jet {
    let r2 = &y[0] * &y[0] + &y[1] * &y[1];
    (&y[0] * &y[0] * c[0] + &y[0] * &y[1] * c[1] + &y[1] * &y[1] * c[2])
        * (&x[0] * c[3] + &x[1] * c[4] + 1.0)
        / r2
}

fn gamma(c: &[f64]) -> AnisotropicConnection {
    let c = c.to_vec();
    AnisotropicConnection::new(TensorField::analytic(
        "Γ",
        (1, 2),
        0.0,
        plane(),
        move |x, y| (0..8).map(|k| coefficient(&c[k..k + 5], x, y)).collect(),
    ))
    .unwrap()
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5..1.5f64, n)
}

fn point() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-1.0..1.0f64, 2),
        (0.5..2.0f64, 0.0..std::f64::consts::TAU),
    )
        .prop_map(|(x, (r, t))| (x, vec![r * t.cos(), r * t.sin()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_identity_exact(c in coeffs(6), alpha in -2i32..4, (x, y) in point()) {
        let e = DiffEngine::analytic();
        let f = scalar(&c, f64::from(alpha));
        for t in [f.clone(), vertical_derivative(&f, &e), vertical_derivative(&vertical_derivative(&f, &e), &e)] {
            prop_assert!(relative_homogeneity_defect(&t, &e, &x, &y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn euler_identity_fd4(c in coeffs(6), alpha in -2i32..4, (x, y) in point()) {
        let f = scalar(&c, f64::from(alpha));
        prop_assert!(relative_homogeneity_defect(&f, &DiffEngine::fd4(), &x, &y).unwrap() < 1e-6);
    }

    #[test]
    fn declared_degree_matches_scaling(c in coeffs(6), alpha in -2i32..4, (x, y) in point(), lambda in 0.2..5.0f64) {
        let f = scalar(&c, f64::from(alpha));
        let scale = f.values(&x, &y).unwrap()[0].abs().max(1.0) * lambda.powi(alpha).max(1.0);
        prop_assert!(scaling_defect(&f, &x, &y, lambda).unwrap() < 1e-12 * scale);
    }

    #[test]
    fn decomposition_round_trip(c in coeffs(7), (x, y) in point()) {
        let e = DiffEngine::analytic();
        let w = one_form(&c);
        let d = decompose(&w, 2, &e).unwrap();
        let back = reconstruct(&d, &e).unwrap();
        let (a, b) = (back.values(&x, &y).unwrap(), w.values(&x, &y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        for r in &d.residues {
            prop_assert!(kernel_defect(r, &x, &y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn image_projection_is_idempotent(c in coeffs(7), (x, y) in point()) {
        let e = DiffEngine::analytic();
        let once = project_image(&one_form(&c), 2.0, &e).unwrap();
        let twice = project_image(&once, 2.0, &e).unwrap();
        let (a, b) = (once.values(&x, &y).unwrap(), twice.values(&x, &y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn project_after_embed_is_identity(c in coeffs(12), (x, y) in point()) {
        let g = gamma(&c);
        let back = LinearConnection::embed_trivial(&g).project_intrinsic().unwrap();
        let (a, b) = (back.field().values(&x, &y).unwrap(), g.field().values(&x, &y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_after_raise_is_identity(c in coeffs(12), (x, y) in point()) {
        let e = DiffEngine::analytic();
        let n = gamma(&c).lower();
        let back = n.raise(&e).lower();
        let (a, b) = (back.field().values(&x, &y).unwrap(), n.field().values(&x, &y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        let spray = n.lower();
        let again = spray.raise(&e).lower();
        let (a, b) = (again.field().values(&x, &y).unwrap(), spray.field().values(&x, &y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_charts_are_coherent(m in prop::collection::vec(-1.0..1.0f64, 4), b in coeffs(2), c in coeffs(12)) {
        let a = vec![2.0 + m[0], m[1], m[2], 2.0 + m[3]];
        let t = ChartTransition::affine("affine", a, b).unwrap();
        let samples = plane().samples(16, 9).unwrap();
        prop_assert!(t.validate(&samples).max() < 1e-12);
        let e = DiffEngine::analytic();
        let g = gamma(&c);
        for obj in [ConnectionObject::Anisotropic(g.clone()), ConnectionObject::Nonlinear(g.lower())] {
            for entry in coherence_defect(&obj, &t, &samples, &e).unwrap() {
                prop_assert!(entry.max_defect < 1e-10, "{} {}", entry.identity, entry.max_defect);
            }
        }
    }
}

#[test]
fn quadratic_chart_moves_flat_spray() {
    let t = ChartTransition::quadratic_shear("quad", 1.0);
    let flat = Spray::new(TensorField::zero((1, 0), 2.0, plane())).unwrap();
    let moved = finsler::atlas::transform_spray(&flat, &t).unwrap();
    for p in plane().samples(20, 4).unwrap() {
        let q = t.map_point(&p);
        let v = moved.field().values(&q.x, &q.y).unwrap();
        assert_abs_diff_eq!(v[0], -q.y[1] * q.y[1], epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
    }
}

#[test]
fn contraction_lowers_rank() {
    let n = NonlinearConnection::new(TensorField::analytic("N", (1, 1), 1.0, plane(), |x, y| {
        vec![&y[1] * &x[0], y[0].clone(), &y[0] * 0.0, &y[1] * 2.0]
    }))
    .unwrap();
    let c = liouville_contract(n.field()).unwrap();
    assert_eq!((c.contra(), c.cov(), c.alpha()), (1, 0, 2.0));
    let v = c.values(&[0.5, 0.0], &[1.0, 2.0]).unwrap();
    assert_abs_diff_eq!(v[0], 1.0 + 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(v[1], 2.0 * 2.0 * 2.0, epsilon = 1e-15);
}
