//! Graphs, stochastic block model parameters, sampling, and thinning.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, DenseMatrix};
use crate::rng::SeedRng;

/// Simple undirected graph with a dense 0/1 adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adj: Vec<u8>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![0; n * n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Star with node 0 as the hub and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Self::empty(leaves + 1);
        for i in 1..=leaves {
            g.add_edge(0, i);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at node {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from a symmetric 0/1 mask; entries above 1/2 count as edges.
    pub fn from_matrix(m: &DenseMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("adjacency must be square".into()));
        }
        let n = m.rows();
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let a = m[(i, j)] > 0.5;
                if a != (m[(j, i)] > 0.5) {
                    return Err(Error::InvalidInput(format!("asymmetric entry ({i},{j})")));
                }
                if a {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v] != 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loops are not allowed");
        self.adj[u * self.n + v] = 1;
        self.adj[v * self.n + u] = 1;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.n + v] = 0;
        self.adj[v * self.n + u] = 0;
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        if present {
            self.add_edge(u, v)
        } else {
            self.remove_edge(u, v)
        }
    }

    pub fn row(&self, u: usize) -> &[u8] {
        &self.adj[u * self.n..(u + 1) * self.n]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().filter(|(_, &a)| a != 0).map(|(v, _)| v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|&a| a as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|&a| a as usize).sum::<usize>() / 2
    }

    pub fn adjacency<T: crate::Scalar>(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.n, self.n, |i, j| if self.has_edge(i, j) { T::one() } else { T::zero() })
    }

    /// `A²` with integer entries (common-neighbor counts).
    pub fn adjacency_squared(&self) -> DenseMatrix<f64> {
        let a = self.adjacency::<f64>();
        a.matmul(&a)
    }

    /// Relabels nodes: node `i` of the result is node `perm[i]` of `self`,
    /// i.e. the adjacency becomes `P A Pᵀ` with `P[i][perm[i]] = 1`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = Self::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(perm[i], perm[j]) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Replaces the neighborhood of `u` by `new_nbrs` (a node rewiring).
    pub fn rewired(&self, u: usize, new_nbrs: &[bool]) -> Self {
        let mut g = self.clone();
        for v in 0..self.n {
            if v != u {
                g.set_edge(u, v, new_nbrs[v]);
            }
        }
        g
    }

    /// Fewest nodes whose rewiring turns `self` into `other`: a minimum vertex
    /// cover of the edge symmetric difference. Exponential in the answer;
    /// meant for small graphs.
    pub fn node_distance(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n);
        let mut diff = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) != other.has_edge(u, v) {
                    diff.push((u, v));
                }
            }
        }
        let mut budget = 0;
        while !cover_within(&diff, &mut vec![false; self.n], budget) {
            budget += 1;
        }
        budget
    }

    pub fn to_weighted(&self) -> WeightedGraph {
        WeightedGraph { n: self.n, w: self.adj.iter().map(|&a| a as f64).collect() }
    }

    /// Text edge-list serialization.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n={} weighted=0\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

/// Undirected graph with real edge weights; zero weight means no edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<f64>,
}

impl WeightedGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, w: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.w[u * self.n + v]
    }

    pub fn set_weight(&mut self, u: usize, v: usize, w: f64) {
        assert!(u != v || w == 0.0, "self-loops are not allowed");
        self.w[u * self.n + v] = w;
        self.w[v * self.n + u] = w;
    }

    pub fn binarize(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.weight(u, v) != 0.0 {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn matrix(&self) -> DenseMatrix<f64> {
        DenseMatrix::from_vec(self.n, self.n, self.w.clone())
    }

    /// Keeps only the weights on edges present in `mask`.
    pub fn masked(&self, mask: &Graph) -> Self {
        let mut out = Self::empty(self.n);
        for (u, v) in mask.edges() {
            out.set_weight(u, v, self.weight(u, v));
        }
        out
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n={} weighted=1\n", self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let w = self.weight(u, v);
                if w != 0.0 {
                    let _ = writeln!(s, "{u} {v} {w:?}");
                }
            }
        }
        s
    }
}

/// Either kind of graph read from an edge-list file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyGraph {
    Plain(Graph),
    Weighted(WeightedGraph),
}

impl AnyGraph {
    pub fn binarize(&self) -> Graph {
        match self {
            AnyGraph::Plain(g) => g.clone(),
            AnyGraph::Weighted(w) => w.binarize(),
        }
    }
}

/// Parses the text edge-list format: a header `n=<int> weighted=<0|1>` and
/// then one `u v [weight]` line per edge. Blank lines and `#` comments are
/// skipped.
pub fn parse_edge_list(text: &str) -> Result<AnyGraph> {
    let mut lines = text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
    let mut n = None;
    let mut weighted = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("bad n: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("weighted=") {
            weighted = Some(match v {
                "0" => false,
                "1" => true,
                _ => return Err(Error::Parse(format!("bad weighted flag {v:?}"))),
            });
        } else {
            return Err(Error::Parse(format!("unknown header token {tok:?}")));
        }
    }
    let n = n.ok_or_else(|| Error::Parse("header lacks n=".into()))?;
    let weighted = weighted.ok_or_else(|| Error::Parse("header lacks weighted=".into()))?;
    let mut wg = WeightedGraph::empty(n);
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad("expected `u v [weight]`"));
        }
        let u: usize = parts[0].parse().map_err(|_| bad("bad node id"))?;
        let v: usize = parts[1].parse().map_err(|_| bad("bad node id"))?;
        if u >= n || v >= n {
            return Err(bad("node id out of range"));
        }
        if u == v {
            return Err(bad("self-loop"));
        }
        let w = match parts.get(2) {
            Some(t) if weighted => t.parse::<f64>().map_err(|_| bad("bad weight"))?,
            Some(_) => return Err(bad("weight given for an unweighted graph")),
            None => 1.0,
        };
        wg.set_weight(u, v, w);
    }
    Ok(if weighted { AnyGraph::Weighted(wg) } else { AnyGraph::Plain(wg.binarize()) })
}

/// Community labels in `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl LabelAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidInput(format!("label {bad} outside 0..{k}")));
        }
        Ok(Self { labels, k })
    }

    /// Contiguous balanced blocks: node `i` gets label `i / (n/k)`.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || !n.is_multiple_of(k) {
            return Err(Error::InvalidInput(format!("n={n} not divisible by k={k}")));
        }
        let size = n / k;
        Self::new((0..n).map(|i| i / size).collect(), k)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }

    pub fn is_balanced(&self) -> bool {
        let n = self.labels.len();
        n.is_multiple_of(self.k) && self.counts().iter().all(|&c| c == n / self.k)
    }

    /// One-hot n×k membership matrix.
    pub fn to_membership(&self) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(self.labels.len(), self.k, |i, j| if self.labels[i] == j { 1.0 } else { 0.0 })
    }

    /// Applies a label permutation: label `l` becomes `perm[l]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        Self { labels: self.labels.iter().map(|&l| perm[l]).collect(), k: self.k }
    }

    /// Reorders nodes: entry `i` of the result is entry `idx[i]` of `self`.
    pub fn reindexed(&self, idx: &[usize]) -> Self {
        Self { labels: idx.iter().map(|&i| self.labels[i]).collect(), k: self.k }
    }
}

/// Zero-inflated Gaussian weight law: present edges between communities
/// `a`, `b` get weight `N(mean[a][b], sd²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    pub mean: Vec<Vec<f64>>,
    pub sd: f64,
}

/// Stochastic block model parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub n: usize,
    pub k: usize,
    pub b: Vec<Vec<f64>>,
    pub theta: LabelAssignment,
    pub weight_model: Option<WeightModel>,
}

impl SbmParams {
    /// Balanced SBM with contiguous communities.
    pub fn new(n: usize, b: Vec<Vec<f64>>) -> Result<Self> {
        let k = b.len();
        let p = Self { n, k, b, theta: LabelAssignment::balanced(n, k)?, weight_model: None };
        p.validate()?;
        Ok(p)
    }

    /// `k` balanced communities with within/between probabilities.
    pub fn planted(n: usize, k: usize, p_in: f64, p_out: f64) -> Result<Self> {
        let b = (0..k).map(|a| (0..k).map(|c| if a == c { p_in } else { p_out }).collect()).collect();
        Self::new(n, b)
    }

    pub fn with_weights(mut self, wm: WeightModel) -> Result<Self> {
        self.weight_model = Some(wm);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        if k == 0 || !self.n.is_multiple_of(k) {
            return Err(Error::InvalidInput(format!("n={} not divisible by k={k}", self.n)));
        }
        if self.b.len() != k || self.b.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("B must be k×k".into()));
        }
        for a in 0..k {
            for c in 0..k {
                let x = self.b[a][c];
                if !(x > 0.0 && x <= 1.0) {
                    return Err(Error::InvalidInput(format!("B[{a}][{c}]={x} outside (0,1]")));
                }
                if x != self.b[c][a] {
                    return Err(Error::InvalidInput("B must be symmetric".into()));
                }
            }
        }
        if self.theta.len() != self.n || self.theta.k() != k {
            return Err(Error::DimensionMismatch("theta must have n labels in 0..k".into()));
        }
        if !self.theta.is_balanced() {
            return Err(Error::InvalidInput("theta must be balanced".into()));
        }
        if let Some(wm) = &self.weight_model {
            self.check_weight_model(wm)?;
        }
        Ok(())
    }

    fn check_weight_model(&self, wm: &WeightModel) -> Result<()> {
        let k = self.k;
        if wm.mean.len() != k || wm.mean.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("weight mean must be k×k".into()));
        }
        if !(wm.sd >= 0.0 && wm.sd.is_finite()) {
            return Err(Error::InvalidInput("weight sd must be finite and nonnegative".into()));
        }
        let bw = DenseMatrix::from_rows(&wm.mean);
        if !bw.is_symmetric(0.0) {
            return Err(Error::InvalidInput("weight mean must be symmetric".into()));
        }
        let ev = sym_eigen(&bw)?.values;
        let tol = 1e-12 * bw.max_abs().max(1.0);
        let psd = ev.iter().all(|&l| l >= -tol);
        let nsd = ev.iter().all(|&l| l <= tol);
        if !(psd || nsd) {
            return Err(Error::InvalidInput("weight mean must be positive or negative semidefinite".into()));
        }
        let prod = DenseMatrix::from_fn(k, k, |a, c| self.b[a][c] * wm.mean[a][c]);
        let pe = sym_eigen(&prod)?.values;
        let scale = pe.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let smallest = pe.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
        if scale == 0.0 || smallest <= 1e-10 * scale {
            return Err(Error::InvalidInput("B ⊙ B_w is numerically singular".into()));
        }
        Ok(())
    }

    /// Largest expected degree scale `d = n·max(B)`.
    pub fn d(&self) -> f64 {
        let m = self.b.iter().flatten().fold(0.0f64, |a, &x| a.max(x));
        self.n as f64 * m
    }

    /// Non-fatal diagnostics: the dense-regime scale condition
    /// `25 k log(n) / (n min_j B_jj) ≤ 1` is reported, never enforced.
    pub fn assumption_warnings(&self) -> Vec<String> {
        let n = self.n as f64;
        let min_diag = (0..self.k).map(|j| self.b[j][j]).fold(f64::INFINITY, f64::min);
        let need = 25.0 * self.k as f64 * n.ln() / (n * min_diag);
        if need > 1.0 {
            vec![format!("degree scale below the dense-regime condition: 25·k·log(n)/(n·min B_jj) = {need:.3} > 1")]
        } else {
            vec![]
        }
    }
}

/// Samples an SBM graph: each pair `i<j` is an edge with probability
/// `B[θ_i][θ_j]`, independently.
pub fn sample_sbm(params: &SbmParams, rng: &mut SeedRng) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    let th = params.theta.labels();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = params.b[th[i]][th[j]];
            if rng.random::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Samples the graph as [`sample_sbm`] does, then independent Gaussian weights
/// on the present edges.
pub fn sample_weighted_sbm(params: &SbmParams, rng: &mut SeedRng) -> Result<WeightedGraph> {
    let wm = params
        .weight_model
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("weighted sampling requires a weight model".into()))?;
    let g = sample_sbm(params, rng)?;
    let th = params.theta.labels();
    let mut w = WeightedGraph::empty(params.n);
    for (u, v) in g.edges() {
        let mu = wm.mean[th[u]][th[v]];
        let x = if wm.sd == 0.0 {
            mu
        } else {
            Normal::new(mu, wm.sd).map_err(|e| Error::InvalidInput(e.to_string()))?.sample(rng)
        };
        w.set_weight(u, v, x);
    }
    Ok(w)
}

/// `count` independent thinnings of `g`, each keeping every edge with
/// probability `1/t`.
pub fn thin_graph(g: &Graph, t: usize, count: usize, rng: &mut SeedRng) -> Result<Vec<Graph>> {
    if t == 0 {
        return Err(Error::InvalidInput("T must be positive".into()));
    }
    if count != t {
        return Err(Error::InvalidInput(format!("count={count} must equal T={t}")));
    }
    let p = 1.0 / t as f64;
    let edges = g.edges();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut h = Graph::empty(g.n());
        for &(u, v) in &edges {
            if t == 1 || rng.random::<f64>() < p {
                h.add_edge(u, v);
            }
        }
        out.push(h);
    }
    Ok(out)
}

pub fn max_degree(g: &Graph) -> usize {
    g.max_degree()
}

/// Whether at most `budget` more nodes cover every edge in `edges`.
fn cover_within(edges: &[(usize, usize)], chosen: &mut Vec<bool>, budget: usize) -> bool {
    let Some(&(u, v)) = edges.iter().find(|&&(u, v)| !chosen[u] && !chosen[v]) else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    for w in [u, v] {
        chosen[w] = true;
        let ok = cover_within(edges, chosen, budget - 1);
        chosen[w] = false;
        if ok {
            return true;
        }
    }
    false
}
