//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Relative singular-value cutoff for the pseudo-inverse fallback.
pub const PINV_RCOND: f64 = 1e-10;

/// Inverse of a Hermitian positive definite matrix.
pub fn hermitian_inverse(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::LinearAlgebra(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(ch) = m.clone().cholesky() {
        let inv = ch.inverse();
        // symmetrize away roundoff
        return Ok((&inv + inv.adjoint()).map(|v| v * 0.5));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::LinearAlgebra("singular noise covariance".into()))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Least-squares solution of `a x = b`.
///
/// Uses Householder QR when `a` has full column rank and falls back to an
/// SVD pseudo-inverse with singular values below `PINV_RCOND * s_max` dropped.
pub fn least_squares(a: &CMatrix, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let (rows, cols) = a.shape();
    if rows != b.len() {
        return Err(Error::Structural(format!(
            "least squares: {} rows but rhs of length {}",
            rows,
            b.len()
        )));
    }
    if cols == 0 {
        return Ok(DVector::zeros(0));
    }
    if rows >= cols {
        let qr = a.clone().qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..cols).map(|i| r[(i, i)].norm()).collect();
        let dmax = diag.iter().cloned().fold(0.0, f64::max);
        let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if dmax > 0.0 && dmin > 1e-8 * dmax {
            let qhb = qr.q().adjoint() * b;
            if let Some(x) = r.solve_upper_triangular(&qhb) {
                if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Ok(x);
                }
            }
        }
    }
    pinv_solve(a, b)
}

fn pinv_solve(a: &CMatrix, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if !(smax > 0.0) || !smax.is_finite() {
        return Err(Error::Estimation(
            "regressor matrix is numerically zero; no singular value above cutoff".into(),
        ));
    }
    let cutoff = PINV_RCOND * smax;
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^H");
    let uhb = u.adjoint() * b;
    let mut scaled = DVector::<Complex64>::zeros(svd.singular_values.len());
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cutoff {
            scaled[i] = uhb[i] / *s;
        }
    }
    Ok(vt.adjoint() * scaled)
}

/// `x^H m x` for a Hermitian `m`; the imaginary part is roundoff and dropped.
pub fn quad_form(m: &CMatrix, x: &[Complex64]) -> f64 {
    let n = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        acc += x[i].conj() * row;
    }
    acc.re
}

/// Builds a dense matrix from row-major closure values.
pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> CMatrix {
    DMatrix::from_fn(rows, cols, f)
}
