//! Small dense complex block arithmetic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// A `d x d` complex block. Also used for the `2d x 2d` transfer matrices.
pub type Mat = DMatrix<C64>;
/// A vector in `C^d`.
pub type Vector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn zeros(d: usize) -> Mat {
    Mat::zeros(d, d)
}

/// Builds a square block from rows, rejecting ragged input and non-finite entries.
pub fn block_from_rows(rows: &[Vec<C64>]) -> Result<Mat> {
    let d = rows.len();
    for row in rows {
        if row.len() != d {
            return Err(Error::Dimension { expected: d, found: row.len() });
        }
    }
    let m = Mat::from_fn(d, d, |i, j| rows[i][j]);
    checked_block(m)
}

/// Accepts `m` only if it is square with finite entries.
pub fn checked_block(m: Mat) -> Result<Mat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension { expected: m.nrows(), found: m.ncols() });
    }
    if !is_finite(&m) {
        return Err(Error::NonFinite { what: "block matrix" });
    }
    Ok(m)
}

pub fn is_finite(m: &Mat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn real_diag(values: &[f64]) -> Mat {
    let d = values.len();
    Mat::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
}

/// Singular values, descending.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    if a.nrows() == 1 && a.ncols() == 1 {
        return vec![a[(0, 0)].norm()];
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Operator (spectral) norm.
pub fn op_norm(a: &Mat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Minimum modulus `inf_{|x|=1} |Ax|`, zero for singular `A`.
pub fn min_modulus(a: &Mat) -> f64 {
    if a.nrows() != a.ncols() {
        return 0.0;
    }
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &Mat) -> f64 {
    a.norm()
}

pub fn re_part(a: &Mat) -> Mat {
    (a + a.adjoint()).scale(0.5)
}

/// `(A - A*) / 2i`, Hermitian for every `A`.
pub fn im_part(a: &Mat) -> Mat {
    (a - a.adjoint()) * C64::new(0.0, -0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian part is used.
pub fn hermitian_eigenvalues(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    if a.nrows() == 1 {
        return vec![a[(0, 0)].re];
    }
    let h = re_part(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn trace_re(a: &Mat) -> f64 {
    a.trace().re
}

/// `[v, 0, ..., 0]`.
pub fn embed_first_column(v: &Vector) -> Mat {
    let d = v.len();
    let mut m = Mat::zeros(d, d);
    if d > 0 {
        m.set_column(0, v);
    }
    m
}

/// Treats a `C^d` vector as a `d x 1` matrix.
pub fn as_column(v: &Vector) -> Mat {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

pub fn column_to_vector(m: &Mat) -> Vector {
    DVector::from_column_slice(m.column(0).as_slice())
}

/// Output of [`matrix_functionals`].
#[derive(Debug, Clone)]
pub struct MatrixFunctionals {
    pub minmod: f64,
    pub hs: f64,
    pub re: Mat,
    pub im: Mat,
}

pub fn matrix_functionals(a: &Mat) -> MatrixFunctionals {
    MatrixFunctionals { minmod: min_modulus(a), hs: hs_norm(a), re: re_part(a), im: im_part(a) }
}

/// `<x, y>` linear in the first argument, matching the inner product on `C^d`.
pub fn inner(x: &Vector, y: &Vector) -> C64 {
    y.dotc(x)
}

pub fn inverse(a: &Mat, what: &str) -> Result<Mat> {
    a.clone().lu().try_inverse().filter(is_finite).ok_or_else(|| Error::SingularSolve(what.to_string()))
}

/// 2x2 block assembly of d x d blocks.
pub fn block2(a11: &Mat, a12: &Mat, a21: &Mat, a22: &Mat) -> Mat {
    let d = a11.nrows();
    let mut m = Mat::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(a11);
    m.view_mut((0, d), (d, d)).copy_from(a12);
    m.view_mut((d, 0), (d, d)).copy_from(a21);
    m.view_mut((d, d), (d, d)).copy_from(a22);
    m
}

/// Extracts block `(row, col)` of size `d` from a block matrix.
pub fn sub_block(m: &Mat, row: usize, col: usize, d: usize) -> Mat {
    m.view((row * d, col * d), (d, d)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_functionals() {
        let f = matrix_functionals(&identity(2));
        assert!((f.minmod - 1.0).abs() < 1e-15);
        assert!((f.hs - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.re, identity(2));
        assert!(f.im.norm() == 0.0);
    }

    #[test]
    fn minmod_of_diag_is_reciprocal_inverse_norm() {
        let a = real_diag(&[2.0, 0.5]);
        assert!((min_modulus(&a) - 0.5).abs() < 1e-15);
        let inv = inverse(&a, "diag").unwrap();
        assert!((op_norm(&inv) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_has_zero_minmod() {
        let a = block_from_rows(&[vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]]).unwrap();
        assert!(min_modulus(&a) < 1e-15);
    }

    #[test]
    fn embed_first_column_examples() {
        let e1 = Vector::from_vec(vec![c(1.0), c(0.0)]);
        let m = embed_first_column(&e1);
        assert_eq!(m, block_from_rows(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(0.0)]]).unwrap());
        assert_eq!(embed_first_column(&Vector::zeros(2)), zeros(2));
    }

    #[test]
    fn non_finite_rejected() {
        let err = block_from_rows(&[vec![C64::new(f64::NAN, 0.0)]]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        assert!(block_from_rows(&[vec![c(1.0), c(0.0)]]).is_err());
    }

    #[test]
    fn im_part_of_hermitian_is_zero() {
        let b = block_from_rows(&[vec![c(1.0), C64::new(0.0, 2.0)], vec![C64::new(0.0, -2.0), c(3.0)]]).unwrap();
        assert!(im_part(&b).norm() < 1e-15);
    }
}
