//! The ladder `h_alpha T^r_s` with `alpha + s = omega` fixed.
//!
//! On each rung `S = d(ι S / alpha) + (S - d(ι S / alpha))` splits an
//! element of homogeneity `alpha - 1` into an image part and a residue in
//! the kernel of the contraction. Iterating from the starting rung to a
//! target homogeneity `beta` yields a base of homogeneity `beta` plus one
//! residue per rung. Only integer rungs `0 ..= omega` are supported.

use crate::error::{Error, Result};
use crate::field::{liouville_contract, vertical_derivative, DiffEngine, TensorField};

/// Base and residues of a tensor relative to a higher rung.
#[derive(Debug, Clone)]
pub struct LadderDecomposition {
    /// Contravariant rank `r`.
    pub contra: usize,
    /// `alpha + s`, constant along the ladder.
    pub omega: i64,
    /// Homogeneity of the decomposed tensor.
    pub alpha: i64,
    /// Homogeneity of the base.
    pub beta: i64,
    /// Type `(r, omega - beta)`, homogeneity `beta`.
    pub base: TensorField,
    /// Residues ordered by covariant rank `omega - beta + 1 ..= omega - alpha`;
    /// each is annihilated by the contraction of its last index.
    pub residues: Vec<TensorField>,
}

impl LadderDecomposition {
    /// Covariant rank of the decomposed tensor.
    pub fn level(&self) -> usize {
        (self.omega - self.alpha) as usize
    }

    /// `prod_{nu = alpha + 1}^{beta} nu`, the factor picked up by the
    /// contraction cascade.
    pub fn cascade_factor(&self) -> f64 {
        cascade_factor(self.alpha, self.beta)
    }

    /// The image of the base back on the starting rung: the reconstruction
    /// with every residue dropped.
    pub fn integrable_part(&self, engine: &DiffEngine) -> TensorField {
        let steps = (self.beta - self.alpha) as usize;
        iterate_vertical(&self.base, steps, engine)
    }
}

pub fn cascade_factor(from_alpha: i64, to_beta: i64) -> f64 {
    ((from_alpha + 1)..=to_beta).map(|nu| nu as f64).product()
}

fn iterate_vertical(field: &TensorField, steps: usize, engine: &DiffEngine) -> TensorField {
    (0..steps).fold(field.clone(), |t, _| vertical_derivative(&t, engine))
}

/// Integer homogeneity and `omega = alpha + s` of a ladder element.
pub fn ladder_label(s: &TensorField) -> Result<(i64, i64)> {
    let a = s.alpha();
    if a.fract() != 0.0 || !a.is_finite() {
        return Err(Error::Level(format!(
            "`{}` has non-integer homogeneity {a}; only integer rungs are supported",
            s.label()
        )));
    }
    let alpha = a as i64;
    if alpha < 0 {
        return Err(Error::Level(format!(
            "`{}` has negative homogeneity {alpha}",
            s.label()
        )));
    }
    Ok((alpha, alpha + s.cov() as i64))
}

/// `S -> d(ι S / alpha)` for `S` of homogeneity `alpha - 1`.
pub fn project_image(s: &TensorField, alpha: f64, engine: &DiffEngine) -> Result<TensorField> {
    if alpha == 0.0 {
        return Err(Error::Level(
            "projection onto the image needs alpha != 0".into(),
        ));
    }
    if s.cov() == 0 {
        return Err(Error::Rank(format!(
            "`{}` has no covariant index",
            s.label()
        )));
    }
    if s.alpha() != alpha - 1.0 {
        return Err(Error::Level(format!(
            "`{}` has homogeneity {}, expected {}",
            s.label(),
            s.alpha(),
            alpha - 1.0
        )));
    }
    let contracted = liouville_contract(s)?.scale(1.0 / alpha);
    Ok(vertical_derivative(&contracted, engine))
}

/// `S -> S - d(ι S / alpha)`, the residue in the kernel of the contraction.
pub fn project_kernel(s: &TensorField, alpha: f64, engine: &DiffEngine) -> Result<TensorField> {
    let image = project_image(s, alpha, engine)?;
    Ok(s.sub(&image)?.with_label(format!("ker({})", s.label())))
}

/// Splits `S` (homogeneity `alpha`) into a base of homogeneity `beta` and
/// the residues of the rungs in between.
pub fn decompose(s: &TensorField, beta: i64, engine: &DiffEngine) -> Result<LadderDecomposition> {
    let (alpha, omega) = ladder_label(s)?;
    if beta > omega || beta <= alpha {
        return Err(Error::Level(format!(
            "target homogeneity {beta} outside ({alpha}, {omega}]"
        )));
    }
    let mut current = s.clone();
    let mut residues = Vec::with_capacity((beta - alpha) as usize);
    for nu in (alpha + 1)..=beta {
        let nu = nu as f64;
        residues.push(project_kernel(&current, nu, engine)?);
        current = liouville_contract(&current)?.scale(1.0 / nu);
    }
    residues.reverse();
    Ok(LadderDecomposition {
        contra: s.contra(),
        omega,
        alpha,
        beta,
        base: current.with_label(format!("base({})", s.label())),
        residues,
    })
}

/// Sum of the iterated vertical derivatives of base and residues.
pub fn reconstruct(d: &LadderDecomposition, engine: &DiffEngine) -> Result<TensorField> {
    let level = d.omega - d.alpha;
    let base_level = d.omega - d.beta;
    let shape_ok = |t: &TensorField, cov: i64, hom: i64| {
        t.contra() == d.contra && t.cov() as i64 == cov && t.alpha() == hom as f64
    };
    if !shape_ok(&d.base, base_level, d.beta) {
        return Err(Error::Shape(format!(
            "base `{}` is not of type ({}, {}) and homogeneity {}",
            d.base.label(),
            d.contra,
            base_level,
            d.beta
        )));
    }
    if d.residues.len() as i64 != d.beta - d.alpha {
        return Err(Error::Shape(format!(
            "expected {} residues, found {}",
            d.beta - d.alpha,
            d.residues.len()
        )));
    }
    let mut parts = vec![d.integrable_part(engine)];
    for (k, r) in d.residues.iter().enumerate() {
        let cov = base_level + 1 + k as i64;
        if !shape_ok(r, cov, d.omega - cov) {
            return Err(Error::Shape(format!(
                "residue `{}` is not of type ({}, {cov})",
                r.label(),
                d.contra
            )));
        }
        parts.push(iterate_vertical(r, (level - cov) as usize, engine));
    }
    let terms: Vec<(f64, &TensorField)> = parts.iter().map(|p| (1.0, p)).collect();
    TensorField::linear_combination(&terms)
}

/// `d^(omega - alpha) ι^(omega - alpha) S`, which equals
/// `(prod nu) d^(omega - alpha) S_0` for the level-0 base `S_0`: every
/// residue is dropped and the rest survives up to the cascade factor.
pub fn destroy_residues(
    s: &TensorField,
    alpha: i64,
    omega: i64,
    engine: &DiffEngine,
) -> Result<TensorField> {
    let (a, w) = ladder_label(s)?;
    if a != alpha || w != omega {
        return Err(Error::Level(format!(
            "`{}` sits at (alpha, omega) = ({a}, {w}), not ({alpha}, {omega})",
            s.label()
        )));
    }
    if alpha >= omega {
        return Err(Error::Level(format!(
            "need alpha < omega, got {alpha} >= {omega}"
        )));
    }
    let steps = (omega - alpha) as usize;
    let mut t = s.clone();
    for _ in 0..steps {
        t = liouville_contract(&t)?;
    }
    Ok(iterate_vertical(&t, steps, engine).with_label(format!("destroyed({})", s.label())))
}

/// Largest `|ι Δ|` component at a point.
pub fn kernel_defect(residue: &TensorField, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(liouville_contract(residue)?
        .values(x, y)?
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs())))
}
