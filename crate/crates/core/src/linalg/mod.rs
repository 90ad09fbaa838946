//! Dense linear algebra kernels, generic over [`Scalar`](crate::Scalar).

pub mod eigen;
pub mod matrix;
pub mod qr;
pub mod svd;

pub use eigen::{leading, sym_eigen, sym_eigs, SymEigen};
pub use matrix::{axpy, dot, norm2, normalize, DenseMatrix};
pub use qr::{orthonormalize, thin_qr, ThinQr};
pub use svd::{thin_svd, ThinSvd};

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm<T: crate::Scalar>(m: &DenseMatrix<T>) -> crate::Result<T> {
    let e = sym_eigen(m)?;
    Ok(e.values.iter().fold(T::zero(), |a, &x| a.max(x.abs())))
}

/// Spectral norm of any matrix via the eigenvalues of `MᵀM` (or `MMᵀ`).
pub fn spectral_norm<T: crate::Scalar>(m: &DenseMatrix<T>) -> crate::Result<T> {
    let g = if m.rows() <= m.cols() { m.matmul_t(m) } else { m.t_matmul(m) };
    let e = sym_eigen(&g)?;
    Ok(e.values.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt())
}
