//! Small dense matrix helpers over jets and floats.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::jet::Jet;

/// Pivot threshold relative to the row scale.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Inverse of a row-major `n x n` matrix of jets by Gauss-Jordan elimination
/// with partial pivoting on the base values. Returns `None` when a scaled
/// pivot falls below [`PIVOT_TOLERANCE`].
pub fn invert_jets(m: &[Jet], n: usize) -> Option<Vec<Jet>> {
    assert_eq!(m.len(), n * n);
    let space = m[0].space().clone();
    let row_scale: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m[i * n + j].value().abs())
                .fold(0.0, f64::max)
        })
        .collect();
    if row_scale.contains(&0.0) {
        return None;
    }
    let mut a: Vec<Vec<Jet>> = (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(&space, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let mut scale = row_scale;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                (a[r][col].value().abs() / scale[r])
                    .total_cmp(&(a[s][col].value().abs() / scale[s]))
            })
            .unwrap();
        if a[pivot][col].value().abs() / scale[pivot] < PIVOT_TOLERANCE {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        scale.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..n {
                let t = &factor * &a[col][j];
                a[r][j] -= t;
                let t = &factor * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv.into_iter().flatten().collect())
}

/// Float version of [`invert_jets`].
pub fn invert(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let space = crate::jet::JetSpace::get(1, 0);
    let jets: Vec<Jet> = m.iter().map(|&v| Jet::constant(&space, v)).collect();
    invert_jets(&jets, n).map(|inv| inv.iter().map(Jet::value).collect())
}

/// Determinant after dividing every row by its largest absolute entry.
pub fn scaled_determinant(m: &[f64], n: usize) -> f64 {
    let mut a = DMatrix::from_row_slice(n, n, m);
    for i in 0..n {
        let s = (0..n).map(|j| a[(i, j)].abs()).fold(0.0, f64::max);
        if s == 0.0 {
            return 0.0;
        }
        for j in 0..n {
            a[(i, j)] /= s;
        }
    }
    a.determinant()
}

pub fn determinant(m: &[f64], n: usize) -> f64 {
    DMatrix::from_row_slice(n, n, m).determinant()
}

/// Largest `|m_ij - m_ji|`.
pub fn asymmetry(m: &[f64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[i * n + j] - m[j * n + i]).abs());
        }
    }
    worst
}

/// Eigenvalues of the symmetric part, ascending.
pub fn symmetric_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    let a = DMatrix::from_row_slice(n, n, m);
    let sym = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_of_jet_matrix_differentiates_correctly() {
        // M(t) = [[1 + t, 2], [0, 3]]; d/dt M^{-1}_{00} = -1/(1+t)^2
        let t = Jet::seeds(&[0.5], 2);
        let space = t[0].space().clone();
        let m = vec![
            1.0 + &t[0],
            Jet::constant(&space, 2.0),
            Jet::constant(&space, 0.0),
            Jet::constant(&space, 3.0),
        ];
        let inv = invert_jets(&m, 2).unwrap();
        assert_relative_eq!(inv[0].value(), 1.0 / 1.5);
        assert_relative_eq!(inv[0].partial(&[1]), -1.0 / 2.25, max_relative = 1e-14);
        assert_relative_eq!(inv[1].value(), -2.0 / 4.5);
    }

    #[test]
    fn singular_matrix_is_reported() {
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
        assert!(invert(&[0.0, 0.0, 0.0, 1.0], 2).is_none());
        let inv = invert(&[0.0, 1.0, 1.0, 0.0], 2).unwrap();
        assert_eq!(inv, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn scaled_determinant_is_unit_free() {
        let a = scaled_determinant(&[2.0, 0.0, 0.0, 1.0], 2);
        let b = scaled_determinant(&[2e-6, 0.0, 0.0, 1e-6], 2);
        assert_relative_eq!(a, b);
        assert_relative_eq!(
            determinant(&[2.0, 1.0, 1.0, 2.0], 2),
            3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn eigenvalues_sorted() {
        let ev = symmetric_eigenvalues(&[-1.0, 0.0, 0.0, 1.0], 2);
        assert_relative_eq!(ev[0], -1.0);
        assert_relative_eq!(ev[1], 1.0);
    }
}
