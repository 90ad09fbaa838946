use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabelAssignment};
use crate::linalg::{sym_eigen, DenseMatrix};
use crate::mechanisms::noise::std_normal;
use crate::mechanisms::{top_eigenvector, NoiseMode};
use crate::rng::SeedRng;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ProjectionResult<T> {
    pub x: DenseMatrix<T>,
    pub iterations: usize,
    /// Stopping quantity at exit: `‖X_{m+1} − X_m‖_F` for Dykstra,
    /// `‖diag(X) − c‖₂` for the dual solver.
    pub residual: T,
}

/// Solver for the projection onto `{X ⪰ 0, X_ii = c}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexSolver {
    /// Alternating projections with Dykstra corrections.
    Dykstra,
    /// L-BFGS on the dual in the diagonal multipliers.
    #[default]
    DualLbfgs,
}

/// Euclidean projection of a symmetric matrix onto the PSD cone.
pub fn project_psd<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let eig = sym_eigen(m)?;
    let mut p = eig.reconstruct_with(|l| l.max(T::zero()));
    p.symmetrize_in_place();
    Ok(p)
}

/// Dykstra's alternating projections onto `{X ⪰ 0} ∩ {X_ii = diag_value}`.
pub fn dykstra_project<T: Scalar>(
    y: &DenseMatrix<T>,
    diag_value: T,
    tol: T,
    max_iter: usize,
) -> Result<ProjectionResult<T>> {
    if !y.is_square() {
        return Err(Error::DimensionMismatch("Dykstra input must be square".into()));
    }
    let n = y.rows();
    let mut x = y.clone();
    let mut p = DenseMatrix::<T>::zeros(n, n);
    let mut q = DenseMatrix::<T>::zeros(n, n);
    let mut residual = T::infinity();
    for it in 1..=max_iter {
        let y1 = project_psd(&x.add(&p))?;
        p = x.add(&p).sub(&y1);
        let mut x_new = y1.add(&q);
        for i in 0..n {
            x_new[(i, i)] = diag_value;
        }
        q = y1.add(&q).sub(&x_new);
        residual = x_new.sub(&x).frobenius_norm();
        x = x_new;
        if residual <= tol {
            return Ok(ProjectionResult { x, iterations: it, residual });
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: residual.as_f64() })
}

/// Default Dykstra settings.
pub const DYKSTRA_TOL: f64 = 1e-8;
pub const DYKSTRA_MAX_ITER: usize = 5000;
/// Default dual-solver settings.
pub const DUAL_TOL: f64 = 1e-10;
pub const DUAL_MAX_ITER: usize = 500;

/// Same projection through its dual: minimize
/// `f(y) = ½‖Π₊(Y + Diag y)‖²_F − c·Σy`, whose gradient is
/// `diag(Π₊(Y + Diag y)) − c`, by L-BFGS with backtracking. The primal
/// solution is `Π₊(Y + Diag y*)`, which is PSD by construction.
pub fn dual_project<T: Scalar>(
    y: &DenseMatrix<T>,
    diag_value: T,
    tol: T,
    max_iter: usize,
) -> Result<ProjectionResult<T>> {
    if !y.is_square() {
        return Err(Error::DimensionMismatch("projection input must be square".into()));
    }
    let n = y.rows();
    let half = T::c(0.5);
    let eval = |mult: &[T]| -> Result<(T, Vec<T>, DenseMatrix<T>)> {
        let mut m = y.clone();
        for i in 0..n {
            m[(i, i)] += mult[i];
        }
        let p = project_psd(&m)?;
        let fro = p.frobenius_norm();
        let f = half * fro * fro - diag_value * mult.iter().copied().sum::<T>();
        let g = (0..n).map(|i| p[(i, i)] - diag_value).collect();
        Ok((f, g, p))
    };
    let norm = |v: &[T]| v.iter().map(|&a| a * a).sum::<T>().sqrt();
    let dotp = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&u, &v)| u * v).sum::<T>();
    let memory = 10;
    let mut mult = vec![T::zero(); n];
    let (mut f, mut g, mut x) = eval(&mult)?;
    let mut hist: Vec<(Vec<T>, Vec<T>, T)> = Vec::new();
    for it in 0..=max_iter {
        let gn = norm(&g);
        if gn <= tol {
            return Ok(ProjectionResult { x, iterations: it, residual: gn });
        }
        if it == max_iter {
            return Err(Error::NotConverged { iterations: max_iter, residual: gn.as_f64() });
        }
        // Two-loop recursion for the search direction.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, yv, rho) in hist.iter().rev() {
            let a = *rho * dotp(s, &q);
            for (qi, yi) in q.iter_mut().zip(yv) {
                *qi -= a * *yi;
            }
            alphas.push(a);
        }
        if let Some((s, yv, _)) = hist.last() {
            let gamma = dotp(s, yv) / dotp(yv, yv);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, yv, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = *rho * dotp(yv, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (*a - b) * *si;
            }
        }
        let mut dir: Vec<T> = q.iter().map(|&v| -v).collect();
        let mut slope = dotp(&g, &dir);
        if slope >= T::zero() {
            hist.clear();
            dir = g.iter().map(|&v| -v).collect();
            slope = -gn * gn;
        }
        // Near the optimum f changes below its rounding error, so a step that
        // shrinks the gradient is also accepted.
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<T> = mult.iter().zip(&dir).map(|(&m, &d)| m + step * d).collect();
            let (fv, gv, xv) = eval(&trial)?;
            if fv <= f + T::c(1e-4) * step * slope || norm(&gv) < gn {
                accepted = Some((fv, gv, xv, trial));
                break;
            }
            step *= half;
        }
        let (f_new, g_new, x_new, trial) = match accepted {
            Some(a) => a,
            None => {
                // A unit gradient step always decreases f (its gradient is 1-Lipschitz).
                hist.clear();
                let trial: Vec<T> = mult.iter().zip(&g).map(|(&m, &d)| m - d).collect();
                let (fv, gv, xv) = eval(&trial)?;
                (fv, gv, xv, trial)
            }
        };
        let s: Vec<T> = trial.iter().zip(&mult).map(|(&a, &b)| a - b).collect();
        let yv: Vec<T> = g_new.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dotp(&s, &yv);
        if sy > T::epsilon() * norm(&s) * norm(&yv) {
            if hist.len() == memory {
                hist.remove(0);
            }
            hist.push((s, yv, T::one() / sy));
        }
        mult = trial;
        f = f_new;
        g = g_new;
        x = x_new;
    }
    unreachable!("loop returns on its last iteration")
}

/// Two-community recovery via projection of the recentered adjacency onto
/// `{X ⪰ 0, X_ii = 1/n}`, Gaussian perturbation, and the sign pattern of the
/// leading eigenvector. `ε²/(4 log(1/δ))`-zCDP with respect to edges.
#[allow(clippy::too_many_arguments)]
pub fn two_community_convex(
    g: &Graph,
    b11: f64,
    b12: f64,
    eps: f64,
    delta: f64,
    solver: ConvexSolver,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    if !(b11 > b12) {
        return Err(Error::InvalidInput(format!("need B11 > B12, got {b11} and {b12}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta={delta} must lie in (0,1)")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps={eps} must be positive and finite")));
    }
    let n = g.n();
    let nf = n as f64;
    let gap = b11 - b12;
    // Mean of A off the planted direction is (B11 + B12)/2 per entry; this
    // makes E[Y] ≈ θθᵀ/n, a feasible point of the projection.
    let shift = (b11 + b12) / 2.0;
    let scale = 2.0 / (nf * gap);
    let a = g.adjacency::<f64>();
    let y = a.map(|x| scale * (x - shift));
    let proj = match solver {
        ConvexSolver::Dykstra => dykstra_project(&y, 1.0 / nf, DYKSTRA_TOL, DYKSTRA_MAX_ITER)?,
        ConvexSolver::DualLbfgs => dual_project(&y, 1.0 / nf, DUAL_TOL, DUAL_MAX_ITER)?,
    };
    let mut diag = Diagnostics::new(noise);
    diag.set("projection_iterations", proj.iterations as f64);
    diag.set("projection_residual", proj.residual);
    let mut xh = proj.x;
    if !noise.is_off() {
        let var = 96.0 * (1.0 / delta).ln() / (nf * nf * eps * eps * gap);
        let sd = var.sqrt();
        diag.set("noise_sd", sd);
        for i in 0..n {
            for j in i..n {
                let z = sd * std_normal(rng);
                xh[(i, j)] += z;
                if i != j {
                    xh[(j, i)] += z;
                }
            }
        }
    }
    let v = top_eigenvector(&xh)?;
    let labels = LabelAssignment::new(v.iter().map(|&x| if x >= 0.0 { 0 } else { 1 }).collect(), 2)?;
    let budget = if noise.is_off() {
        None
    } else {
        Some(PrivacyBudget::zcdp(eps * eps / (4.0 * (1.0 / delta).ln()), Scope::Edge, "convex_gaussian")?)
    };
    Ok(EstimatorOutput { labels, budget, diagnostics: diag })
}
