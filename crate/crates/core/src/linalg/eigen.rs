//! Dense symmetric eigendecomposition: Householder tridiagonalization followed
//! by the implicit QL iteration with Wilkinson-type shifts.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Full eigendecomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DenseMatrix<T>,
}

impl<T: Scalar> SymEigen<T> {
    pub fn vector(&self, j: usize) -> Vec<T> {
        self.vectors.column(j)
    }

    /// Rebuilds `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> DenseMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        // Only eigenpairs with nonzero f(λ) contribute.
        let active: Vec<usize> = (0..n).filter(|&j| fv[j] != T::zero()).collect();
        if active.is_empty() {
            return DenseMatrix::zeros(n, n);
        }
        let scaled = DenseMatrix::from_fn(n, active.len(), |i, a| v[(i, active[a])] * fv[active[a]]);
        let plain = DenseMatrix::from_fn(n, active.len(), |i, a| v[(i, active[a])]);
        scaled.matmul_t(&plain)
    }
}

/// Eigendecomposition of a symmetric matrix. Only the lower triangle is read
/// implicitly through symmetry; asymmetric input gives undefined results.
pub fn sym_eigen<T: Scalar>(m: &DenseMatrix<T>) -> Result<SymEigen<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(SymEigen { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut v = m.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    // `tred2` works on the transposed layout so its inner loops are
    // contiguous; the result is already Vᵀ, whose rows the QL rotations touch.
    tred2(&mut v, &mut d, &mut e);
    let mut vt = v;
    tql2(&mut vt, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| vt[(order[j], i)]);
    Ok(SymEigen { values, vectors })
}

/// Householder tridiagonalization; indices are swapped relative to the
/// textbook row-major form, i.e. `v` is stored transposed.
fn tred2<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(j, n - 1)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(j, i - 1)];
                v[(j, i)] = zero;
                v[(i, j)] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[(i, j)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    let vkj = v[(j, k)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(j, k)] -= upd;
                }
                d[j] = v[(j, i - 1)];
                v[(j, i)] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(i, n - 1)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(i + 1, k)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[(i + 1, k)] * v[(j, k)];
                }
                for k in 0..=i {
                    let dk = d[k];
                    v[(j, k)] -= g * dk;
                }
            }
        }
        for k in 0..=i {
            v[(i + 1, k)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(j, n - 1)];
        v[(j, n - 1)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

fn tql2<T: Scalar>(vt: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::c(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    let max_sweeps = 60 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NotConverged { iterations: sweeps, residual: e[l].as_f64() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(vt, i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

#[inline]
fn rotate_rows<T: Scalar>(vt: &mut DenseMatrix<T>, i: usize, c: T, s: T) {
    let n = vt.cols();
    let data = vt.as_mut_slice();
    let (lo, hi) = data.split_at_mut((i + 1) * n);
    let ri = &mut lo[i * n..];
    let rj = &mut hi[..n];
    for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// The `k` leading eigenpairs, ordered by `|λ|` when `by_abs` and by `λ`
/// otherwise (largest first). Vectors are returned as columns.
pub fn sym_eigs<T: Scalar>(m: &DenseMatrix<T>, k: usize, by_abs: bool) -> Result<(Vec<T>, DenseMatrix<T>)> {
    if k > m.rows() {
        return Err(Error::InvalidInput(format!("requested {k} eigenpairs of a {}x{} matrix", m.rows(), m.cols())));
    }
    let eig = sym_eigen(m)?;
    Ok(leading(&eig, k, by_abs))
}

/// Selects the `k` leading pairs from a full decomposition.
pub fn leading<T: Scalar>(eig: &SymEigen<T>, k: usize, by_abs: bool) -> (Vec<T>, DenseMatrix<T>) {
    let n = eig.values.len();
    let mut order: Vec<usize> = (0..n).rev().collect();
    if by_abs {
        // Stable sort keeps larger signed value first among equal magnitudes.
        order.sort_by(|&a, &b| {
            eig.values[b].abs().partial_cmp(&eig.values[a].abs()).unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    let pick = &order[..k];
    let values = pick.iter().map(|&j| eig.values[j]).collect();
    let vectors = DenseMatrix::from_fn(n, k, |i, c| eig.vectors[(i, pick[c])]);
    (values, vectors)
}
