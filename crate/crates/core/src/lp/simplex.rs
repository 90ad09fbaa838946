//! Bounded-variable revised simplex with a dense basis inverse.
//!
//! Variables are shifted/split so every internal column lives in `[0, u]`.
//! Rows whose slack cannot start feasibly get an artificial column and a
//! phase-one pass minimizes their sum. Pricing is Dantzig's rule, switching to
//! Bland's rule after a run of degenerate pivots.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    /// Per-variable `[lo, hi]`; infinities allowed.
    pub bounds: Vec<(T, T)>,
    /// Optional starting point; each bounded variable starts at the bound
    /// nearest its hint.
    pub hint: Option<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// Largest constraint or bound violation of `x`.
    pub max_residual: T,
}

impl<T: Scalar> LpSolution<T> {
    /// Unwraps an optimal solution or maps the status to an error.
    pub fn into_optimal(self) -> Result<Self> {
        match &self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::LpInfeasible),
            LpStatus::Unbounded => Err(Error::LpUnbounded),
            LpStatus::NumericalFailure(m) => Err(Error::LpNumerical(m.clone())),
        }
    }
}

impl<T: Scalar> LpProblem<T> {
    /// Problem over `nvars` variables with zero objective and bounds `[0, ∞)`.
    pub fn new(nvars: usize, sense: Sense) -> Self {
        Self {
            sense,
            objective: vec![T::zero(); nvars],
            constraints: Vec::new(),
            bounds: vec![(T::zero(), T::infinity()); nvars],
            hint: None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn add_dense_constraint(&mut self, coeffs: &[T], relation: Relation, rhs: T) {
        let sparse = coeffs.iter().copied().enumerate().filter(|(_, a)| *a != T::zero()).collect();
        self.add_constraint(sparse, relation, rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lo: T, hi: T) {
        self.bounds[j] = (lo, hi);
    }

    fn validate(&self) -> Result<()> {
        let nv = self.nvars();
        if self.bounds.len() != nv {
            return Err(Error::DimensionMismatch("bounds length differs from objective length".into()));
        }
        if let Some(h) = &self.hint {
            if h.len() != nv {
                return Err(Error::DimensionMismatch("hint length differs from objective length".into()));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("objective must be finite".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == T::infinity() || hi == T::neg_infinity() {
                return Err(Error::InvalidInput(format!("invalid bounds for variable {j}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &c.coeffs {
                if j >= nv || !a.is_finite() {
                    return Err(Error::InvalidInput(format!("row {i} has an invalid coefficient")));
                }
            }
        }
        Ok(())
    }

    /// Objective value at `x`.
    pub fn evaluate(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            worst = worst.max(lo - x[j]).max(x[j] - hi);
        }
        for c in &self.constraints {
            let act: T = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match c.relation {
                Relation::Le => act - c.rhs,
                Relation::Ge => c.rhs - act,
                Relation::Eq => (act - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Human-readable dump in an LP-file-like layout.
    pub fn to_debug_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", if self.sense == Sense::Maximize { "maximize" } else { "minimize" });
        let _ = writeln!(s, "  obj: {}", fmt_terms(self.objective.iter().copied().enumerate()));
        let _ = writeln!(s, "subject to");
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(s, "  r{i}: {} {rel} {}", fmt_terms(c.coeffs.iter().copied()), c.rhs);
        }
        let _ = writeln!(s, "bounds");
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(s, "  {lo} <= x{j} <= {hi}");
        }
        s.push_str("end\n");
        s
    }
}

fn fmt_terms<T: Scalar>(terms: impl Iterator<Item = (usize, T)>) -> String {
    let parts: Vec<String> = terms.filter(|(_, a)| *a != T::zero()).map(|(j, a)| format!("{a} x{j}")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl<T: Scalar> fmt::Display for LpSolution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status {:?}", self.status)?;
        writeln!(f, "objective {}", self.objective)?;
        writeln!(f, "iterations {}", self.iterations)?;
        writeln!(f, "max_residual {:e}", self.max_residual.as_f64())?;
        for (j, x) in self.x.iter().enumerate() {
            writeln!(f, "x{j} = {x}")?;
        }
        Ok(())
    }
}

/// How an original variable maps to internal columns.
#[derive(Clone, Copy, Debug)]
enum VarMap<T> {
    /// `x = lo + c`.
    Shift { col: usize, lo: T },
    /// `x = hi − c`.
    Mirror { col: usize, hi: T },
    /// `x = c⁺ − c⁻`.
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Pos {
    Basic(usize),
    Lower,
    Upper,
}

struct Tableau<T> {
    m: usize,
    cols: Vec<Vec<(usize, T)>>,
    upper: Vec<T>,
    b: Vec<T>,
    basis: Vec<usize>,
    pos: Vec<Pos>,
    binv: DenseMatrix<T>,
    xb: Vec<T>,
    iterations: usize,
    since_refactor: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<T: Scalar> Tableau<T> {
    fn nonbasic_value(&self, j: usize) -> T {
        match self.pos[j] {
            Pos::Upper => self.upper[j],
            _ => T::zero(),
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut bm = DenseMatrix::<T>::zeros(m, m);
        for (r, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                bm[(i, r)] = a;
            }
        }
        self.binv = invert(&bm)?;
        let mut rhs = self.b.clone();
        for j in 0..self.cols.len() {
            if self.pos[j] == Pos::Upper {
                let u = self.upper[j];
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * u;
                }
            }
        }
        self.xb = self.binv.matvec(&rhs);
        self.since_refactor = 0;
        Ok(())
    }

    fn run(&mut self, cost: &[T], max_iter: usize) -> Result<PhaseEnd> {
        let m = self.m;
        let ncols = self.cols.len();
        let opt_tol = T::c(T::OPT_TOL);
        let piv_tol = T::c(T::PIVOT_TOL);
        let refactor_every = m.max(64);
        let mut degenerate_run = 0usize;
        let mut y = vec![T::zero(); m];
        let mut alpha = vec![T::zero(); m];
        loop {
            if self.iterations >= max_iter {
                return Ok(PhaseEnd::IterationLimit);
            }
            if self.since_refactor >= refactor_every {
                self.refactor()?;
            }
            // Duals y = c_Bᵀ B⁻¹.
            for v in y.iter_mut() {
                *v = T::zero();
            }
            for (r, &j) in self.basis.iter().enumerate() {
                let cb = cost[j];
                if cb != T::zero() {
                    for (yk, &bk) in y.iter_mut().zip(self.binv.row(r)) {
                        *yk += cb * bk;
                    }
                }
            }
            let bland = degenerate_run > 50;
            let mut entering: Option<(usize, T)> = None;
            for j in 0..ncols {
                let p = self.pos[j];
                if matches!(p, Pos::Basic(_)) || self.upper[j] == T::zero() {
                    continue;
                }
                let mut d = cost[j];
                for &(i, a) in &self.cols[j] {
                    d -= y[i] * a;
                }
                let eligible = (p == Pos::Lower && d < -opt_tol) || (p == Pos::Upper && d > opt_tol);
                if !eligible {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, bd)| d.abs() > bd.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((q, _dq)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            // α = B⁻¹ a_q.
            for (i, ai) in alpha.iter_mut().enumerate() {
                let row = self.binv.row(i);
                let mut s = T::zero();
                for &(r, a) in &self.cols[q] {
                    s += row[r] * a;
                }
                *ai = s;
            }
            let dir = if self.pos[q] == Pos::Lower { T::one() } else { -T::one() };
            // Ratio test on x_B(θ) = x_B − dir·θ·α.
            let mut theta = self.upper[q];
            let mut leave: Option<(usize, bool)> = None; // (row, goes to upper)
            let mut best_piv = T::zero();
            for i in 0..m {
                let da = dir * alpha[i];
                if da.abs() <= piv_tol {
                    continue;
                }
                let j = self.basis[i];
                let (t, to_upper) = if da > T::zero() {
                    ((self.xb[i]).max(T::zero()) / da, false)
                } else {
                    let u = self.upper[j];
                    if u == T::infinity() {
                        continue;
                    }
                    ((u - self.xb[i]).max(T::zero()) / (-da), true)
                };
                let better = match leave {
                    None => t < theta,
                    Some((li, _)) if bland => t < theta || (t == theta && j < self.basis[li]),
                    Some(_) => t < theta || (t == theta && da.abs() > best_piv),
                };
                if better {
                    theta = t;
                    leave = Some((i, to_upper));
                    best_piv = da.abs();
                }
            }
            if theta == T::infinity() {
                return Ok(PhaseEnd::Unbounded);
            }
            self.iterations += 1;
            if theta <= T::c(T::FEAS_TOL) * T::c(1e-3) {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            for i in 0..m {
                self.xb[i] -= dir * theta * alpha[i];
            }
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    self.pos[q] = if self.pos[q] == Pos::Lower { Pos::Upper } else { Pos::Lower };
                }
                Some((r, to_upper)) => {
                    let start = self.nonbasic_value(q);
                    let out = self.basis[r];
                    self.pos[out] = if to_upper { Pos::Upper } else { Pos::Lower };
                    self.basis[r] = q;
                    self.pos[q] = Pos::Basic(r);
                    self.xb[r] = start + dir * theta;
                    self.pivot(r, &alpha);
                    self.since_refactor += 1;
                }
            }
        }
    }

    /// Eta update of B⁻¹ for a pivot at row `r` with column `alpha`.
    fn pivot(&mut self, r: usize, alpha: &[T]) {
        let m = self.m;
        let inv = T::one() / alpha[r];
        for v in self.binv.row_mut(r) {
            *v *= inv;
        }
        let pivot_row: Vec<T> = self.binv.row(r).to_vec();
        for i in 0..m {
            if i == r || alpha[i] == T::zero() {
                continue;
            }
            let f = alpha[i];
            for (x, &p) in self.binv.row_mut(i).iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
        }
    }

    fn column_values(&self) -> Vec<T> {
        let mut x: Vec<T> = (0..self.cols.len()).map(|j| self.nonbasic_value(j)).collect();
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.xb[r].max(T::zero()).min(self.upper[j]);
        }
        x
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    let mut w = a.clone();
    let mut inv = DenseMatrix::<T>::identity(n);
    for c in 0..n {
        let mut p = c;
        let mut best = w[(c, c)].abs();
        for r in (c + 1)..n {
            let v = w[(r, c)].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= T::c(T::PIVOT_TOL) * T::c(1e-3) {
            return Err(Error::LpNumerical("singular basis during refactorization".into()));
        }
        if p != c {
            for k in 0..n {
                let t = w[(c, k)];
                w[(c, k)] = w[(p, k)];
                w[(p, k)] = t;
                let t = inv[(c, k)];
                inv[(c, k)] = inv[(p, k)];
                inv[(p, k)] = t;
            }
        }
        let d = T::one() / w[(c, c)];
        for k in 0..n {
            w[(c, k)] *= d;
            inv[(c, k)] *= d;
        }
        let wr: Vec<T> = w.row(c).to_vec();
        let ir: Vec<T> = inv.row(c).to_vec();
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = w[(r, c)];
            if f == T::zero() {
                continue;
            }
            for k in 0..n {
                w[(r, k)] -= f * wr[k];
                inv[(r, k)] -= f * ir[k];
            }
        }
    }
    Ok(inv)
}

/// Solves the problem. Errors only on malformed input; solver outcomes are
/// reported through [`LpStatus`].
pub fn solve_lp<T: Scalar>(p: &LpProblem<T>) -> Result<LpSolution<T>> {
    p.validate()?;
    let nv = p.nvars();
    let m = p.constraints.len();
    let inf = T::infinity();
    let zero = T::zero();

    // Map original variables to internal columns in [0, u].
    let mut maps = Vec::with_capacity(nv);
    let mut upper: Vec<T> = Vec::new();
    let mut cost: Vec<T> = Vec::new();
    let sign = if p.sense == Sense::Maximize { -T::one() } else { T::one() };
    for j in 0..nv {
        let (lo, hi) = p.bounds[j];
        let c = sign * p.objective[j];
        if lo > hi {
            let x = vec![zero; nv];
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x,
                objective: zero,
                iterations: 0,
                max_residual: zero,
            });
        }
        if lo.is_finite() {
            maps.push(VarMap::Shift { col: upper.len(), lo });
            upper.push(hi - lo);
            cost.push(c);
        } else if hi.is_finite() {
            maps.push(VarMap::Mirror { col: upper.len(), hi });
            upper.push(inf);
            cost.push(-c);
        } else {
            let pos = upper.len();
            maps.push(VarMap::Split { pos, neg: pos + 1 });
            upper.push(inf);
            upper.push(inf);
            cost.push(c);
            cost.push(-c);
        }
    }
    let nstruct = upper.len();
    let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); nstruct];
    let mut b = vec![zero; m];
    for (i, c) in p.constraints.iter().enumerate() {
        let mut rhs = c.rhs;
        for &(j, a) in &c.coeffs {
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    cols[col].push((i, a));
                    rhs -= a * lo;
                }
                VarMap::Mirror { col, hi } => {
                    cols[col].push((i, -a));
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    cols[pos].push((i, a));
                    cols[neg].push((i, -a));
                }
            }
        }
        b[i] = rhs;
    }
    // Merge duplicate row entries within a column.
    for col in cols.iter_mut() {
        col.sort_by_key(|e| e.0);
        col.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        col.retain(|e| e.1 != T::zero());
    }

    // Starting positions for structural columns.
    let mut pos: Vec<Pos> = vec![Pos::Lower; nstruct];
    if let Some(h) = &p.hint {
        for j in 0..nv {
            if let VarMap::Shift { col, lo } = maps[j] {
                let u = upper[col];
                if u.is_finite() && (h[j] - lo) > u / T::c(2.0) {
                    pos[col] = Pos::Upper;
                }
            }
        }
    }
    let mut residual = b.clone();
    for j in 0..nstruct {
        if pos[j] == Pos::Upper {
            for &(i, a) in &cols[j] {
                residual[i] -= a * upper[j];
            }
        }
    }

    // Slack / artificial columns and the starting basis.
    let mut basis = vec![0usize; m];
    let mut xb = vec![zero; m];
    let mut artificial = Vec::new();
    let mut binv_diag = vec![T::one(); m];
    for (i, c) in p.constraints.iter().enumerate() {
        let r = residual[i];
        let slack_sign = match c.relation {
            Relation::Le => Some(T::one()),
            Relation::Ge => Some(-T::one()),
            Relation::Eq => None,
        };
        let mut placed = false;
        if let Some(s) = slack_sign {
            let j = cols.len();
            cols.push(vec![(i, s)]);
            upper.push(inf);
            cost.push(zero);
            let val = s * r;
            if val >= zero {
                pos.push(Pos::Basic(i));
                basis[i] = j;
                xb[i] = val;
                binv_diag[i] = s;
                placed = true;
            } else {
                pos.push(Pos::Lower);
            }
        }
        if !placed {
            let s = if r >= zero { T::one() } else { -T::one() };
            let j = cols.len();
            cols.push(vec![(i, s)]);
            upper.push(inf);
            cost.push(zero);
            pos.push(Pos::Basic(i));
            basis[i] = j;
            xb[i] = s * r;
            binv_diag[i] = s;
            artificial.push(j);
        }
    }
    let ncols = cols.len();
    let mut tab = Tableau {
        m,
        cols,
        upper,
        b,
        basis,
        pos,
        binv: DenseMatrix::diag(&binv_diag),
        xb,
        iterations: 0,
        since_refactor: 0,
    };
    let max_iter = 50 * (m + ncols) + 10_000;
    let scale = tab.b.iter().fold(T::one(), |a, &x| a.max(x.abs()));
    let feas_tol = T::c(T::FEAS_TOL);

    let fail = |tab: &Tableau<T>, msg: &str| LpSolution {
        status: LpStatus::NumericalFailure(msg.into()),
        x: vec![zero; nv],
        objective: zero,
        iterations: tab.iterations,
        max_residual: zero,
    };

    if !artificial.is_empty() {
        let mut c1 = vec![zero; ncols];
        for &j in &artificial {
            c1[j] = T::one();
        }
        match tab.run(&c1, max_iter) {
            Ok(PhaseEnd::Optimal) => {}
            Ok(PhaseEnd::Unbounded) => return Ok(fail(&tab, "phase one reported unbounded")),
            Ok(PhaseEnd::IterationLimit) => return Ok(fail(&tab, "iteration limit in phase one")),
            Err(e) => return Ok(fail(&tab, &e.to_string())),
        }
        if tab.refactor().is_err() {
            return Ok(fail(&tab, "singular basis after phase one"));
        }
        let infeas: T = artificial
            .iter()
            .map(|&j| match tab.pos[j] {
                Pos::Basic(r) => tab.xb[r].max(zero),
                Pos::Upper => tab.upper[j],
                Pos::Lower => zero,
            })
            .sum();
        if infeas > feas_tol * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![zero; nv],
                objective: zero,
                iterations: tab.iterations,
                max_residual: infeas,
            });
        }
        for &j in &artificial {
            tab.upper[j] = zero;
            if tab.pos[j] == Pos::Upper {
                tab.pos[j] = Pos::Lower;
            }
        }
    }
    let mut c2 = cost.clone();
    c2.resize(ncols, zero);
    let end = match tab.run(&c2, max_iter) {
        Ok(e) => e,
        Err(e) => return Ok(fail(&tab, &e.to_string())),
    };
    match end {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![zero; nv],
                objective: if p.sense == Sense::Maximize { inf } else { -inf },
                iterations: tab.iterations,
                max_residual: zero,
            })
        }
        PhaseEnd::IterationLimit => return Ok(fail(&tab, "iteration limit in phase two")),
    }
    if tab.refactor().is_err() {
        return Ok(fail(&tab, "singular final basis"));
    }
    let vals = tab.column_values();
    let x: Vec<T> = maps
        .iter()
        .map(|mp| match *mp {
            VarMap::Shift { col, lo } => lo + vals[col],
            VarMap::Mirror { col, hi } => hi - vals[col],
            VarMap::Split { pos, neg } => vals[pos] - vals[neg],
        })
        .collect();
    let objective = p.evaluate(&x);
    let max_residual = p.max_violation(&x);
    let status = if max_residual <= feas_tol * scale {
        LpStatus::Optimal
    } else {
        LpStatus::NumericalFailure(format!("primal residual {:e} after solve", max_residual.as_f64()))
    };
    Ok(LpSolution { status, x, objective, iterations: tab.iterations, max_residual })
}
