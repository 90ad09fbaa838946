//! Householder thin QR.

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Thin factorization `A = Q R` with `Q` of shape n×m (orthonormal columns)
/// and upper-triangular `R` of shape m×m with nonnegative diagonal.
#[derive(Clone, Debug)]
pub struct ThinQr<T> {
    pub q: DenseMatrix<T>,
    pub r: DenseMatrix<T>,
}

pub fn thin_qr<T: Scalar>(a: &DenseMatrix<T>) -> Result<ThinQr<T>> {
    let (n, m) = (a.rows(), a.cols());
    if m > n {
        return Err(Error::DimensionMismatch(format!("thin QR needs rows >= cols, got {n}x{m}")));
    }
    // Work on columns stored as rows.
    let mut w = a.transpose();
    let mut betas = vec![T::zero(); m];
    let mut vs: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut r = DenseMatrix::zeros(m, m);
    for j in 0..m {
        let col = &w.row(j)[j..];
        let alpha = dot(col, col).sqrt();
        let mut v: Vec<T> = col.to_vec();
        let x0 = v[0];
        let sign = if x0 >= T::zero() { T::one() } else { -T::one() };
        v[0] = x0 + sign * alpha;
        let vnorm2 = dot(&v, &v);
        let beta = if vnorm2 > T::zero() { T::c(2.0) / vnorm2 } else { T::zero() };
        // Apply H = I - beta v vᵀ to remaining columns.
        for c in j..m {
            let tail = &mut w.row_mut(c)[j..];
            let s = beta * dot(&v, tail);
            for (t, &vi) in tail.iter_mut().zip(&v) {
                *t -= s * vi;
            }
        }
        for c in j..m {
            r[(j, c)] = w.row(c)[j];
        }
        betas[j] = beta;
        vs.push(v);
    }
    // Accumulate Q = H_0 ... H_{m-1} applied to the first m unit vectors.
    let mut qt = DenseMatrix::zeros(m, n);
    for c in 0..m {
        let e = qt.row_mut(c);
        e[c] = T::one();
        for j in (0..m).rev() {
            let tail = &mut e[j..];
            let s = betas[j] * dot(&vs[j], tail);
            for (t, &vi) in tail.iter_mut().zip(&vs[j]) {
                *t -= s * vi;
            }
        }
    }
    // Flip signs so diag(R) >= 0.
    for j in 0..m {
        if r[(j, j)] < T::zero() {
            for c in j..m {
                r[(j, c)] = -r[(j, c)];
            }
            for x in qt.row_mut(j) {
                *x = -*x;
            }
        }
    }
    Ok(ThinQr { q: qt.transpose(), r })
}

/// Orthonormal basis for the column span of `a` (columns of `Q`).
pub fn orthonormalize<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Ok(thin_qr(a)?.q)
}
