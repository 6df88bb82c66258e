//! Stress matrices for affine formation configurations.
//!
//! A stress matrix is a generalized Laplacian whose nullspace contains the
//! all-ones vector and every coordinate column of the target configuration;
//! for a universally rigid framework it is PSD with rank n - d - 1. Synthesis
//! works in two stages: the linear space of edge weights satisfying the
//! per-agent equilibrium constraints is computed first, then that space is
//! searched for a combination whose restriction to the complement of the
//! affine span is positive definite.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{self, DEFAULT_TOL};

/// Target positions for `n` agents in 2-D or 3-D.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    /// One row per agent.
    positions: DMatrix<f64>,
}

impl Configuration {
    pub fn new(dim: usize, positions: DMatrix<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if positions.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: positions.ncols(),
                context: "configuration coordinate columns",
            });
        }
        if !positions.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, positions })
    }

    /// From the stacked layout `[x1, y1, x2, y2, ...]`.
    pub fn from_stacked(dim: usize, stacked: &[f64]) -> Result<Self> {
        if dim == 0 || stacked.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: stacked.len(),
                context: "stacked coordinate length",
            });
        }
        let n = stacked.len() / dim;
        let positions = DMatrix::from_fn(n, dim, |i, k| stacked[i * dim + k]);
        Self::new(dim, positions)
    }

    pub fn agent_count(&self) -> usize {
        self.positions.nrows()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, agent: usize) -> DVector<f64> {
        self.positions.row(agent).transpose()
    }

    /// Coordinate column `k` across all agents.
    pub fn coordinate_column(&self, k: usize) -> DVector<f64> {
        self.positions.column(k).into_owned()
    }

    /// The stacked state vector `[x1, y1, x2, y2, ...]`.
    pub fn stacked(&self) -> DVector<f64> {
        let n = self.agent_count();
        DVector::from_fn(n * self.dim, |idx, _| {
            self.positions[(idx / self.dim, idx % self.dim)]
        })
    }
}

const RESTARTS: usize = 12;
const ITERATIONS: usize = 220;
const INITIAL_STEP: f64 = 0.8;

/// Per-agent equilibrium constraints stacked into an (n d) x m matrix: column
/// e holds the displacement z_i - z_j in agent i's rows and z_j - z_i in
/// agent j's rows, so `C w = 0` says every agent's weighted displacements sum
/// to zero.
fn constraint_matrix(g: &Graph, config: &Configuration) -> DMatrix<f64> {
    let d = config.dim();
    let mut c = DMatrix::zeros(g.vertex_count() * d, g.edges().len());
    for (e_idx, e) in g.edges().iter().enumerate() {
        let zi = config.position(e.i);
        let zj = config.position(e.j);
        for k in 0..d {
            c[(e.i * d + k, e_idx)] = zi[k] - zj[k];
            c[(e.j * d + k, e_idx)] = zj[k] - zi[k];
        }
    }
    c
}

/// Orthonormal basis of the orthogonal complement of span{1, coordinate
/// columns}, i.e. the subspace on which a valid stress must be positive
/// definite.
fn affine_complement_basis(config: &Configuration) -> Result<DMatrix<f64>> {
    let n = config.agent_count();
    let d = config.dim();
    let mut span = DMatrix::zeros(n, d + 1);
    span.column_mut(0).fill(1.0);
    for k in 0..d {
        span.column_mut(k + 1).copy_from(&config.coordinate_column(k));
    }
    let gram = span.transpose() * &span;
    let gram_vals = spectral::symmetric_eigenvalues(&gram)?;
    let gmax = gram_vals.iter().copied().fold(0.0f64, f64::max);
    let gmin = gram_vals.iter().copied().fold(f64::INFINITY, f64::min);
    if gmin <= 1e-10 * gmax.max(1.0) {
        return Err(Error::DegenerateConfiguration(
            "positions do not affinely span the ambient space".into(),
        ));
    }
    let solved = gram
        .lu()
        .solve(&span.transpose())
        .expect("Gram matrix verified nonsingular");
    let projector = DMatrix::identity(n, n) - &span * solved;
    let split = spectral::split_range_nullspace(&spectral::gamma(&projector)?, 1e-6)?;
    if split.rank != n - d - 1 {
        return Err(Error::DegenerateConfiguration(format!(
            "affine complement has dimension {} instead of {}",
            split.rank,
            n - d - 1
        )));
    }
    Ok(split.range_basis)
}

fn assemble_from_weights(g: &Graph, weights: &[f64]) -> Result<DMatrix<f64>> {
    Ok(g.with_weights(weights)?.laplacian())
}

fn combine(basis: &[DMatrix<f64>], coeffs: &[f64]) -> DMatrix<f64> {
    let mut acc = basis[0].clone() * coeffs[0];
    for (b, &c) in basis.iter().zip(coeffs).skip(1) {
        acc += b * c;
    }
    acc
}

fn min_eig_with_vector(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let se = m.clone().symmetric_eigen();
    let mut idx = 0;
    for k in 1..se.eigenvalues.len() {
        if se.eigenvalues[k] < se.eigenvalues[idx] {
            idx = k;
        }
    }
    (se.eigenvalues[idx], se.eigenvectors.column(idx).into_owned())
}

fn normalize(c: &mut [f64]) {
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in c.iter_mut() {
            *x /= norm;
        }
    }
}

/// Synthesizes a PSD stress matrix of rank n - d - 1 for the graph and target
/// configuration, or reports infeasibility with the best achieved rank.
///
/// The search maximizes the smallest eigenvalue of the stress restricted to
/// the affine complement, by projected subgradient ascent over the unit
/// sphere of constraint-nullspace coefficients, with seeded random restarts.
/// The result is scaled so the largest edge weight has unit magnitude;
/// identical seeds give identical matrices.
pub fn compute_stress_matrix(
    g: &Graph,
    config: &Configuration,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let n = g.vertex_count();
    let d = config.dim();
    if config.agent_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: config.agent_count(),
            context: "configuration size vs. graph order",
        });
    }
    if n < d + 2 {
        return Err(Error::DegenerateConfiguration(format!(
            "need at least {} agents in dimension {d}, got {n}",
            d + 2
        )));
    }
    let required_rank = n - d - 1;

    let constraints = constraint_matrix(g, config);
    // Nullspace of C from the spectral split of C^T C.
    let gram = constraints.transpose() * &constraints;
    let gram_split = spectral::split_range_nullspace(&spectral::gamma(&gram)?, 1e-12)?;
    let weight_space = gram_split.null_basis;
    let k = weight_space.ncols();
    if k == 0 {
        return Err(Error::StressInfeasible {
            required_rank,
            achieved_rank: 0,
        });
    }

    let complement = affine_complement_basis(config)?;
    let restricted: Vec<DMatrix<f64>> = (0..k)
        .map(|l| {
            let weights: Vec<f64> = weight_space.column(l).iter().copied().collect();
            let omega = assemble_from_weights(g, &weights)?;
            Ok(complement.transpose() * omega * &complement)
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_coeffs = vec![0.0; k];
    let mut best_value = f64::NEG_INFINITY;
    for _ in 0..RESTARTS {
        let mut coeffs: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        normalize(&mut coeffs);
        for it in 0..ITERATIONS {
            let m = combine(&restricted, &coeffs);
            let (_, v) = min_eig_with_vector(&m);
            let step = INITIAL_STEP / ((it + 1) as f64).sqrt();
            for (c, b) in coeffs.iter_mut().zip(&restricted) {
                *c += step * (v.transpose() * b * &v)[(0, 0)];
            }
            normalize(&mut coeffs);
        }
        let value = min_eig_with_vector(&combine(&restricted, &coeffs)).0;
        if value > best_value {
            best_value = value;
            best_coeffs = coeffs;
        }
    }

    let mut weights = vec![0.0; g.edges().len()];
    for (l, &c) in best_coeffs.iter().enumerate() {
        for (w, b) in weights.iter_mut().zip(weight_space.column(l).iter()) {
            *w += c * b;
        }
    }
    let peak = weights.iter().map(|w| w.abs()).fold(0.0f64, f64::max);
    if peak > 0.0 {
        for w in &mut weights {
            *w /= peak;
        }
    }
    let omega = assemble_from_weights(g, &weights)?;

    let values = spectral::symmetric_eigenvalues(&omega)?;
    let lambda_max = values.iter().copied().fold(0.0f64, f64::max);
    let threshold = DEFAULT_TOL * lambda_max.max(1.0);
    let achieved_rank = values.iter().filter(|&&v| v > threshold).count();
    let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -threshold || achieved_rank != required_rank {
        return Err(Error::StressInfeasible {
            required_rank,
            achieved_rank,
        });
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn complete_graph(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::with_unit_weights(n, edges).unwrap()
    }

    /// Independent statement of the equilibrium constraints, built entry by
    /// entry from the definition rather than through `constraint_matrix`.
    fn check_equilibrium(g: &Graph, config: &Configuration, omega: &DMatrix<f64>) -> f64 {
        let d = config.dim();
        let mut worst = 0.0f64;
        for i in 0..g.vertex_count() {
            for k in 0..d {
                let mut acc = 0.0;
                for e in g.edges() {
                    let (other, sign) = if e.i == i {
                        (e.j, 1.0)
                    } else if e.j == i {
                        (e.i, 1.0)
                    } else {
                        continue;
                    };
                    let w = -omega[(e.i, e.j)];
                    acc += sign * w * (config.position(i)[k] - config.position(other)[k]);
                }
                worst = worst.max(acc.abs());
            }
        }
        worst
    }

    fn stress_posts(g: &Graph, config: &Configuration, omega: &DMatrix<f64>) {
        let n = g.vertex_count();
        let d = config.dim();
        // Row sums vanish.
        assert!(crate::graph::row_sum_residual(omega) < 1e-8);
        // Coordinate columns are annihilated.
        for k in 0..d {
            let residual = (omega * config.coordinate_column(k)).norm();
            assert!(residual < 1e-8, "coordinate residual {residual}");
        }
        // PSD with the expected rank.
        let split = spectral::split_range_nullspace(omega, DEFAULT_TOL).unwrap();
        assert_eq!(split.rank, n - d - 1);
        // Sparsity pattern matches the graph.
        let report = crate::graph::validate_laplacian(omega, g).unwrap();
        assert!(report.pattern_matches);
        assert!(report.positive_semidefinite);
        // Direct restatement of the constraints.
        assert!(check_equilibrium(g, config, omega) < 1e-8);
    }

    #[test]
    fn complete_graph_on_generic_planar_points_has_rank_one_stress() {
        let g = complete_graph(4);
        let config = Configuration::from_stacked(
            2,
            &[0.0, 0.0, 2.1, 0.3, 0.7, 1.9, -1.3, 1.1],
        )
        .unwrap();
        // Brute-force check that the constraint system leaves exactly one
        // degree of freedom: 8 equations on 6 edge weights with a rank-5
        // coefficient matrix.
        let c = constraint_matrix(&g, &config);
        let gram = c.transpose() * &c;
        let vals = spectral::symmetric_eigenvalues(&gram).unwrap();
        let max = vals.iter().copied().fold(0.0f64, f64::max);
        let nullity = vals.iter().filter(|&&v| v <= 1e-10 * max).count();
        assert_eq!(nullity, 1);

        let omega = compute_stress_matrix(&g, &config, 1).unwrap();
        stress_posts(&g, &config, &omega);
    }

    #[test]
    fn infeasible_topology_reports_achieved_rank() {
        // A path graph cannot support any nonzero equilibrium stress on
        // generic points: every leaf constraint forces its single incident
        // weight to zero, and the zeros propagate inward.
        let g = Graph::with_unit_weights(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let config =
            Configuration::from_stacked(2, &[0.0, 0.0, 1.0, 0.4, 2.0, -0.3, 3.0, 0.9]).unwrap();
        match compute_stress_matrix(&g, &config, 1) {
            Err(Error::StressInfeasible { achieved_rank, .. }) => {
                assert_eq!(achieved_rank, 0);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_configuration_rejected() {
        // All points on a line do not affinely span the plane.
        let g = complete_graph(4);
        let config =
            Configuration::from_stacked(2, &[0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0]).unwrap();
        assert!(matches!(
            compute_stress_matrix(&g, &config, 1),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn same_seed_same_stress() {
        let g = complete_graph(5);
        let config = Configuration::from_stacked(
            2,
            &[0.0, 0.0, 2.0, 0.1, 1.1, 1.7, -0.9, 1.3, 0.4, -1.2],
        )
        .unwrap();
        let a = compute_stress_matrix(&g, &config, 9).unwrap();
        let b = compute_stress_matrix(&g, &config, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_generic_configurations_on_complete_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for trial in 0..100 {
            let n = 4 + trial % 4;
            let g = complete_graph(n);
            let config = Configuration::new(
                2,
                DMatrix::from_fn(n, 2, |_, _| rng.random_range(-3.0..3.0)),
            )
            .unwrap();
            let omega = compute_stress_matrix(&g, &config, trial as u64).unwrap();
            stress_posts(&g, &config, &omega);
        }
    }
}
