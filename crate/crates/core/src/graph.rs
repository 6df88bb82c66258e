//! Undirected weighted graphs and their generalized Laplacians.
//!
//! A generalized Laplacian carries the negated edge weights off-diagonal and
//! the negated off-diagonal row sum on the diagonal, so every row sums to
//! zero by construction. Weights may be negative; standard Laplacians and
//! stress matrices are both special cases.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{self, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected connected graph over `0..n`, stored as a weighted edge list
/// with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut normalized = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has non-finite weight"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            normalized.push(Edge { i, j, weight: w });
        }
        let graph = Self {
            n,
            edges: normalized,
        };
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Same topology with unit weights on every edge.
    pub fn with_unit_weights(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    /// Same topology, weights replaced edge-by-edge (order must match `edges()`).
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.edges.len(),
                got: weights.len(),
                context: "edge weight vector",
            });
        }
        Self::new(
            self.n,
            self.edges
                .iter()
                .zip(weights)
                .map(|(e, &w)| (e.i, e.j, w)),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().any(|e| e.i == i && e.j == j)
    }

    fn is_connected(&self) -> bool {
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            for e in &self.edges {
                if e.i == v && !visited[e.j] {
                    stack.push(e.j);
                } else if e.j == v && !visited[e.i] {
                    stack.push(e.i);
                }
            }
        }
        visited.into_iter().all(|v| v)
    }

    /// Generalized Laplacian of the graph. The diagonal is the negated sum of
    /// the off-diagonal row entries, accumulated in ascending column order, so
    /// summing a row in that same order cancels exactly in floating point.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.i, e.j)] = -e.weight;
            l[(e.j, e.i)] = -e.weight;
        }
        for i in 0..self.n {
            let mut off = 0.0;
            for k in 0..self.n {
                if k != i {
                    off += l[(i, k)];
                }
            }
            l[(i, i)] = -off;
        }
        l
    }
}

/// Largest absolute row sum of `l`, accumulating the off-diagonal entries in
/// ascending order before adding the diagonal — the order that makes
/// `Graph::laplacian` row sums vanish exactly.
pub fn row_sum_residual(l: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..l.nrows() {
        let mut off = 0.0;
        for k in 0..l.ncols() {
            if k != i {
                off += l[(i, k)];
            }
        }
        worst = worst.max((off + l[(i, i)]).abs());
    }
    worst
}

/// Structural health report for a candidate Laplacian.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub symmetry_residual: f64,
    pub ones_residual: f64,
    pub min_eigenvalue: f64,
    pub rank: usize,
    pub positive_semidefinite: bool,
    pub pattern_matches: bool,
}

impl ValidationReport {
    pub fn all_standard_checks_pass(&self) -> bool {
        self.symmetry_residual < 1e-12
            && self.ones_residual < 1e-8
            && self.positive_semidefinite
            && self.pattern_matches
    }
}

/// Checks symmetry, the zero row-sum property, definiteness, rank and
/// agreement of the sparsity pattern with the graph. Failures are reported,
/// not raised; only a size mismatch is an error.
pub fn validate_laplacian(l: &DMatrix<f64>, g: &Graph) -> Result<ValidationReport> {
    let n = g.vertex_count();
    if l.nrows() != n || l.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: l.nrows(),
            context: "Laplacian size vs. graph order",
        });
    }
    let mut symmetry_residual = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            symmetry_residual = symmetry_residual.max((l[(i, j)] - l[(j, i)]).abs());
        }
    }
    let ones_residual = row_sum_residual(l);
    // Eigenvalues of the symmetrized matrix; if the input is asymmetric the
    // symmetry residual already flags it.
    let sym = (l + l.transpose()) * 0.5;
    let values = spectral::symmetric_eigenvalues(&sym)?;
    let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_max = values.iter().copied().fold(0.0f64, f64::max);
    let threshold = DEFAULT_TOL * lambda_max.max(1.0);
    let rank = values.iter().filter(|&&v| v > threshold).count();
    let positive_semidefinite = min_eigenvalue >= -threshold;
    let scale = l.amax().max(1.0);
    let mut pattern_matches = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if !g.has_edge(i, j) && l[(i, j)].abs() > 1e-12 * scale {
                pattern_matches = false;
            }
        }
    }
    Ok(ValidationReport {
        symmetry_residual,
        ones_residual,
        min_eigenvalue,
        rank,
        positive_semidefinite,
        pattern_matches,
    })
}
