//! Lipschitz extension of the quadratic PCA score.
//!
//! For a graph with adjacency `A` and orthonormal `V` (n×q) the score is
//! `s(V) = Tr(VᵀA²V) + Tr(A²J)`. Its extension `ŝ(V)` maximizes
//! `Tr(C(VVᵀ + J))` over symmetric `C` with `0 ≤ C_ij ≤ (A²)_ij` and all row
//! sums at most `D²`; it coincides with `s` whenever the maximum degree is at
//! most `D`.

use super::simplex::{solve_lp, LpProblem, Relation, Sense};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::DenseMatrix;

/// Reusable LP structure for one graph and one `D`.
#[derive(Clone, Debug)]
pub struct LipschitzScorer {
    n: usize,
    d: f64,
    a2: DenseMatrix<f64>,
    /// Variable list: pairs `(i, j)` with `i ≤ j` and `(A²)_ij > 0`.
    pairs: Vec<(usize, usize)>,
    bounded: bool,
    total: f64,
}

impl LipschitzScorer {
    pub fn new(g: &Graph, d: f64) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::InvalidInput(format!("D={d} must be positive")));
        }
        let n = g.n();
        let a2 = g.adjacency_squared();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                if a2[(i, j)] > 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        let bounded = (g.max_degree() as f64) <= d;
        let total = a2.sum();
        Ok(Self { n, d, a2, pairs, bounded, total })
    }

    pub fn a_squared(&self) -> &DenseMatrix<f64> {
        &self.a2
    }

    /// `Tr(A²J) = 𝟏ᵀA²𝟏`.
    pub fn offset(&self) -> f64 {
        self.total
    }

    /// Whether the graph already has maximum degree at most `D`.
    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// The unextended score `Tr(VᵀA²V) + Tr(A²J)`.
    pub fn plain_score(&self, v: &DenseMatrix<f64>) -> f64 {
        let av = self.a2.matmul(v);
        let mut tr = 0.0;
        for c in 0..v.cols() {
            for i in 0..self.n {
                tr += v[(i, c)] * av[(i, c)];
            }
        }
        tr + self.total
    }

    /// `ŝ(V)`, skipping the LP when the degree bound already holds.
    pub fn score(&self, v: &DenseMatrix<f64>) -> Result<f64> {
        check_orthonormal(v, self.n)?;
        if self.bounded {
            return Ok(self.plain_score(v));
        }
        self.score_lp(v)
    }

    /// `ŝ(V)` always computed by solving the LP.
    pub fn score_lp(&self, v: &DenseMatrix<f64>) -> Result<f64> {
        check_orthonormal(v, self.n)?;
        if self.pairs.is_empty() {
            return Ok(0.0);
        }
        let q = v.cols();
        let weight = |i: usize, j: usize| -> f64 { 1.0 + (0..q).map(|c| v[(i, c)] * v[(j, c)]).sum::<f64>() };
        let mut lp = LpProblem::new(self.pairs.len(), Sense::Maximize);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let w = weight(i, j);
            lp.objective[k] = if i == j { w } else { 2.0 * w };
            lp.bounds[k] = (0.0, self.a2[(i, j)]);
            rows[i].push((k, 1.0));
            if i != j {
                rows[j].push((k, 1.0));
            }
        }
        let d2 = self.d * self.d;
        for row in rows.into_iter().filter(|r| !r.is_empty()) {
            lp.add_constraint(row, Relation::Le, d2);
        }
        let sol = solve_lp(&lp)?.into_optimal()?;
        Ok(sol.objective)
    }
}

fn check_orthonormal(v: &DenseMatrix<f64>, n: usize) -> Result<()> {
    if v.rows() != n {
        return Err(Error::DimensionMismatch(format!("V has {} rows, graph has {n} nodes", v.rows())));
    }
    let g = v.t_matmul(v);
    let q = v.cols();
    for a in 0..q {
        for b in 0..q {
            let target = if a == b { 1.0 } else { 0.0 };
            if (g[(a, b)] - target).abs() > 1e-10 {
                return Err(Error::InvalidInput("V must have orthonormal columns".into()));
            }
        }
    }
    Ok(())
}

/// `ŝ_{A²}(V)` for the graph `g` and degree parameter `D`.
pub fn lipschitz_extension_score(g: &Graph, v: &DenseMatrix<f64>, d: f64) -> Result<f64> {
    LipschitzScorer::new(g, d)?.score(v)
}
