//! Thin SVD by one-sided Jacobi rotations, meant for tall matrices with few
//! columns.

use super::matrix::{dot, norm2, DenseMatrix};
use crate::scalar::Scalar;

/// `A = U diag(s) Vᵀ` with `s` descending, `U` n×r, `V` m×r, r = min(n, m).
#[derive(Clone, Debug)]
pub struct ThinSvd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

pub fn thin_svd<T: Scalar>(a: &DenseMatrix<T>) -> ThinSvd<T> {
    if a.rows() < a.cols() {
        let t = thin_svd(&a.transpose());
        return ThinSvd { u: t.v, s: t.s, v: t.u };
    }
    let (n, m) = (a.rows(), a.cols());
    // Columns of A as rows of `w`; `vt` rows are columns of V.
    let mut w = a.transpose();
    let mut vt = DenseMatrix::<T>::identity(m);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let alpha = dot(w.row(p), w.row(p));
                let beta = dot(w.row(q), w.row(q));
                let gamma = dot(w.row(p), w.row(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::c(2.0) * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s);
                rotate_pair(&mut vt, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(T, usize)> = (0..m).map(|j| (norm2(w.row(j)), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let s: Vec<T> = sv.iter().map(|x| x.0).collect();
    let tiny = eps * T::c(n.max(m) as f64) * s.first().copied().unwrap_or(T::zero());
    let mut ucols: Vec<Vec<T>> = Vec::with_capacity(m);
    for &(sigma, j) in &sv {
        if sigma > tiny && sigma > T::zero() {
            ucols.push(w.row(j).iter().map(|&x| x / sigma).collect());
        } else {
            ucols.push(complete_basis(&ucols, n));
        }
    }
    let u = DenseMatrix::from_columns(&ucols);
    let v = DenseMatrix::from_fn(m, m, |i, c| vt[(sv[c].1, i)]);
    ThinSvd { u, s, v }
}

fn rotate_pair<T: Scalar>(w: &mut DenseMatrix<T>, p: usize, q: usize, c: T, s: T) {
    let n = w.cols();
    let data = w.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * n);
    let rp = &mut lo[p * n..(p + 1) * n];
    let rq = &mut hi[..n];
    for (a, b) in rp.iter_mut().zip(rq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// A unit vector orthogonal to every vector in `basis` (Gram-Schmidt on the
/// standard basis).
fn complete_basis<T: Scalar>(basis: &[Vec<T>], n: usize) -> Vec<T> {
    let mut best = vec![T::zero(); n];
    let mut best_norm = -T::one();
    for e in 0..n {
        let mut v = vec![T::zero(); n];
        v[e] = T::one();
        for _ in 0..2 {
            for b in basis {
                let d = dot(&v, b);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let nv = norm2(&v);
        if nv > best_norm {
            best_norm = nv;
            best = v;
        }
        if nv > T::c(0.5) {
            break;
        }
    }
    for x in best.iter_mut() {
        *x /= best_norm;
    }
    best
}
