//! k-means++ seeding plus Lloyd iterations, best of several restarts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabelAssignment;
use crate::linalg::DenseMatrix;
use crate::rng::SeedRng;
use crate::scalar::Scalar;

/// Settings for the approximate k-means step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    /// Nominal approximation factor. Recorded only: the restart strategy does
    /// not certify a `(1+γ)` bound.
    pub gamma: f64,
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { gamma: 1.0, restarts: 20, max_iter: 300 }
    }
}

#[derive(Clone, Debug)]
pub struct KMeansResult<T> {
    pub membership: LabelAssignment,
    pub centers: DenseMatrix<T>,
    pub cost: T,
    /// Cost after every assignment step of the winning run.
    pub trace: Vec<T>,
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

fn seed_plus_plus<T: Scalar>(points: &DenseMatrix<T>, k: usize, rng: &mut SeedRng) -> DenseMatrix<T> {
    let n = points.rows();
    let dim = points.cols();
    let mut centers = DenseMatrix::zeros(k, dim);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from_slice(points.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), centers.row(0)).as_f64()).collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if r < d {
                    chosen = i;
                    break;
                }
                r -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).copy_from_slice(points.row(pick));
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), centers.row(c)).as_f64());
        }
    }
    centers
}

fn assign<T: Scalar>(points: &DenseMatrix<T>, centers: &DenseMatrix<T>, labels: &mut [usize]) -> T {
    let mut cost = T::zero();
    for (i, l) in labels.iter_mut().enumerate() {
        let p = points.row(i);
        let mut best = (T::infinity(), 0);
        for c in 0..centers.rows() {
            let d = sq_dist(p, centers.row(c));
            if d < best.0 {
                best = (d, c);
            }
        }
        *l = best.1;
        cost += best.0;
    }
    cost
}

fn lloyd<T: Scalar>(
    points: &DenseMatrix<T>,
    mut centers: DenseMatrix<T>,
    max_iter: usize,
) -> (Vec<usize>, DenseMatrix<T>, T, Vec<T>) {
    let n = points.rows();
    let k = centers.rows();
    let dim = points.cols();
    let mut labels = vec![0usize; n];
    let mut cost = assign(points, &centers, &mut labels);
    let mut trace = vec![cost];
    for _ in 0..max_iter {
        let mut sums = DenseMatrix::<T>::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, &x) in sums.row_mut(labels[i]).iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = T::one() / T::c(counts[c] as f64);
                for (dst, &s) in centers.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s * inv;
                }
            }
        }
        // Re-seed empty clusters at the point farthest from its center.
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(points.row(a), centers.row(labels[a]));
                        let db = sq_dist(points.row(b), centers.row(labels[b]));
                        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .unwrap_or(0);
                let row = points.row(far).to_vec();
                centers.row_mut(c).copy_from_slice(&row);
                labels[far] = c;
            }
        }
        let mut next = labels.clone();
        let new_cost = assign(points, &centers, &mut next);
        trace.push(new_cost);
        let changed = next != labels;
        labels = next;
        cost = new_cost;
        if !changed {
            break;
        }
    }
    (labels, centers, cost, trace)
}

/// Best of `restarts` k-means++-seeded Lloyd runs on the rows of `points`.
pub fn approx_kmeans<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    cfg: &KMeansConfig,
    rng: &mut SeedRng,
) -> Result<KMeansResult<T>> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
    }
    if !(cfg.gamma > 0.0) {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    if points.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("points must be finite".into()));
    }
    let mut best: Option<KMeansResult<T>> = None;
    for _ in 0..cfg.restarts.max(1) {
        let init = seed_plus_plus(points, k, rng);
        let (labels, centers, cost, trace) = lloyd(points, init, cfg.max_iter);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(KMeansResult { membership: LabelAssignment::new(labels, k)?, centers, cost, trace });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Cost of a given assignment with optimal (mean) centers.
pub fn kmeans_cost<T: Scalar>(points: &DenseMatrix<T>, labels: &LabelAssignment) -> T {
    let k = labels.k();
    let dim = points.cols();
    let mut sums = DenseMatrix::<T>::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.labels().iter().enumerate() {
        counts[l] += 1;
        for (s, &x) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    let mut cost = T::zero();
    for (i, &l) in labels.labels().iter().enumerate() {
        let inv = T::one() / T::c(counts[l] as f64);
        let center: Vec<T> = sums.row(l).iter().map(|&s| s * inv).collect();
        cost += sq_dist(points.row(i), &center);
    }
    cost
}
