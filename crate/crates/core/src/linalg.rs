//! Dense symmetric-matrix helpers shared by the rest of the crate.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

pub type Matrix = DMatrix<f64>;

pub(crate) fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigendecomposition of the symmetric part of `m`.
pub(crate) fn sym_eigen(m: &Matrix) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(symmetrize(m))
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    sym_eigen(m).eigenvalues.min()
}

pub fn max_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    sym_eigen(m).eigenvalues.max()
}

/// `V f(Λ) Vᵀ` for symmetric `m`.
pub(crate) fn sym_apply(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let eig = sym_eigen(m);
    let v = &eig.eigenvectors;
    let d = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&x| f(x)));
    symmetrize(&(v * Matrix::from_diagonal(&d) * v.transpose()))
}

/// Principal square root of a PSD matrix; slightly negative eigenvalues are zeroed.
pub(crate) fn sqrt_psd(m: &Matrix) -> Matrix {
    sym_apply(m, |x| x.max(0.0).sqrt())
}

/// Inverse principal square root. Returns `None` if any eigenvalue is at or
/// below `floor` (no clamping).
pub(crate) fn inv_sqrt_pd(m: &Matrix, floor: f64) -> Option<Matrix> {
    let eig = sym_eigen(m);
    if eig.eigenvalues.iter().any(|&x| x <= floor) {
        return None;
    }
    let v = &eig.eigenvectors;
    let d = eig.eigenvalues.map(|x| 1.0 / x.sqrt());
    Some(symmetrize(&(v * Matrix::from_diagonal(&d) * v.transpose())))
}

pub(crate) fn inverse_pd(m: &Matrix) -> Option<Matrix> {
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    match Cholesky::new(symmetrize(m)) {
        Some(c) => Some(symmetrize(&c.inverse())),
        None => {
            let eig = sym_eigen(m);
            if eig.eigenvalues.iter().any(|&x| x <= 0.0) {
                return None;
            }
            let v = &eig.eigenvectors;
            Some(symmetrize(
                &(v * Matrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x)) * v.transpose()),
            ))
        }
    }
}

/// Log-determinant of a positive definite matrix, via Cholesky with an
/// eigendecomposition fallback. `None` when the matrix is not PD.
pub fn logdet_pd(m: &Matrix) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let s = symmetrize(m);
    if let Some(c) = Cholesky::new(s.clone()) {
        let l = c.l_dirty();
        return Some(2.0 * (0..s.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>());
    }
    let eig = SymmetricEigen::new(s);
    if eig.eigenvalues.iter().any(|&x| x <= 0.0) {
        return None;
    }
    Some(eig.eigenvalues.iter().map(|x| x.ln()).sum())
}

/// Moore-Penrose pseudoinverse with singular values below `rel_cutoff * σ_max` discarded.
pub fn pinv(m: &Matrix, rel_cutoff: f64) -> Matrix {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Matrix::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cut = rel_cutoff * smax;
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut out = Matrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            out += vt.row(k).transpose() * u.column(k).transpose() / s;
        }
    }
    out
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Euclidean projection onto `{S : ‖S‖₂ ≤ 1}` by clipping singular values.
pub(crate) fn project_unit_spectral_ball(m: &Matrix) -> Matrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return m.clone();
    }
    let mut svd = m.clone().svd(true, true);
    if svd.singular_values.max() <= 1.0 {
        return m.clone();
    }
    for s in svd.singular_values.iter_mut() {
        *s = s.min(1.0);
    }
    svd.recompose().expect("u and v_t were requested")
}

pub(crate) fn trace(m: &Matrix) -> f64 {
    m.diagonal().sum()
}

pub(crate) fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}
