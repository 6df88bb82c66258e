//! Stability of the ambiguous consensus system `dz/dt = -H L~ z`.
//!
//! The exact test: the system is globally and exponentially stable iff the
//! symmetrized compression of the global ambiguity onto the Laplacian's
//! lifted range is positive definite. Every report carries both that minimum
//! eigenvalue and the full complex spectrum of the product matrix, and the
//! two routes are cross-checked against each other.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambiguity::{improper_rotation, rotation, AgentAmbiguity, AmbiguitySet};
use crate::error::{Error, Result};
use crate::spectral::{self, ComplexSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    /// The minimum eigenvalue sits inside the tolerance band around zero;
    /// the boundary is exposed rather than forced into a binary answer.
    Marginal,
}

/// Outcome of the exact stability test, with the eigenvalue evidence that
/// produced it.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Smallest eigenvalue of the symmetrized range compression of the
    /// ambiguity; positive means stable.
    pub min_eig_gamma: f64,
    /// Full spectrum of the negated ambiguous system matrix.
    pub spectrum: ComplexSpectrum,
    /// Largest real part among the eigenvalues not classified as zero.
    pub max_real_nonzero: f64,
    /// Eigenvalues with modulus inside the zero band; equals the nullity of
    /// the lifted Laplacian when everything is consistent.
    pub zero_multiplicity: usize,
    pub tolerance: f64,
    /// Whether the eigenvalue route and the definiteness route agree outside
    /// the tolerance band.
    pub consistent: bool,
}

fn lifted_range_basis(split: &spectral::SpectralSplit, dim: usize) -> DMatrix<f64> {
    split
        .range_basis
        .kronecker(&DMatrix::identity(dim, dim))
}

fn min_eig_of_compression(lifted_basis: &DMatrix<f64>, ambient: &DMatrix<f64>) -> f64 {
    if lifted_basis.ncols() == 0 {
        return f64::INFINITY;
    }
    let compressed = lifted_basis.transpose() * ambient * lifted_basis;
    let sym = (&compressed + compressed.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Exact stability test for the Laplacian `l` under the ambiguity `amb`.
///
/// Builds the lifted system, compresses the ambiguity onto the lifted range,
/// and classifies by the sign of the smallest symmetrized eigenvalue with a
/// `Marginal` band of width `tol`. The full product spectrum is computed
/// independently and cross-checked.
pub fn stability_check(
    l: &DMatrix<f64>,
    amb: &AmbiguitySet,
    tol: f64,
) -> Result<StabilityReport> {
    let n = l.nrows();
    let d = amb.dim();
    if amb.agent_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: amb.agent_count(),
            context: "ambiguity agents vs. Laplacian order",
        });
    }
    let split = spectral::split_range_nullspace(l, tol)?;
    let lifted_basis = lifted_range_basis(&split, d);
    let min_eig_gamma = min_eig_of_compression(&lifted_basis, amb.matrix());

    let lifted = l.kronecker(&DMatrix::identity(d, d));
    let product = -(amb.matrix() * lifted);
    let spectrum = spectral::general_eig(&product)?;

    let scale = spectrum
        .values()
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let zero_band = tol * scale;
    let zero_multiplicity = spectrum
        .values()
        .iter()
        .filter(|z| z.norm() <= zero_band)
        .count();
    let max_real_nonzero = spectrum
        .nonzero(zero_band)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);

    let verdict = if min_eig_gamma > tol {
        Verdict::Stable
    } else if min_eig_gamma < -tol {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };

    // Outside the band, "stable by definiteness" must mean "all nonzero
    // eigenvalues strictly in the left half-plane", and vice versa.
    let consistent = if min_eig_gamma.abs() <= tol || max_real_nonzero.abs() <= tol {
        true
    } else {
        (min_eig_gamma > 0.0) == (max_real_nonzero < 0.0)
    };

    Ok(StabilityReport {
        verdict,
        min_eig_gamma,
        spectrum,
        max_real_nonzero,
        zero_multiplicity,
        tolerance: tol,
        consistent,
    })
}

/// Sufficient test: positive definiteness of the symmetrized global
/// ambiguity itself. Never necessary (the range basis is tall), but cheap:
/// block diagonal, so the blocks are examined directly.
pub fn sufficient_check(amb: &AmbiguitySet, tol: f64) -> (bool, f64) {
    let mut min_eig = f64::INFINITY;
    for agent in amb.agents() {
        let block = agent.block();
        let sym = (&block + block.transpose()) * 0.5;
        let local = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        min_eig = min_eig.min(local);
    }
    (min_eig > tol, min_eig)
}

/// Closed-form verdict for homogeneous rotations: proper rotations are
/// stable exactly on the open interval (-pi/2, pi/2); improper rotations are
/// always unstable. No matrices are formed.
pub fn homogeneous_margin(theta: f64, proper: bool, dim: usize) -> Result<Verdict> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !proper {
        return Ok(Verdict::Unstable);
    }
    let c = theta.cos();
    Ok(if c > spectral::DEFAULT_TOL {
        Verdict::Stable
    } else if c < -spectral::DEFAULT_TOL {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    })
}

/// Verifies the spectral picture of homogeneous rotations numerically: the
/// spectrum of `-(L (x) H)` must be the negated Laplacian spectrum scaled by
/// each eigenvalue of the block (a rotation by +-theta for proper blocks; a
/// mirror through +-1 for planar improper ones). Returns the worst matching
/// distance under greedy optimal assignment.
pub fn check_rotation_lemma(
    l: &DMatrix<f64>,
    theta: f64,
    dim: usize,
    proper: bool,
) -> Result<f64> {
    let (lap_values, _) = spectral::symmetric_eig(l)?;
    if let Some(min) = lap_values.last() {
        let lambda_max = lap_values.first().copied().unwrap_or(0.0).max(0.0);
        if *min < -spectral::DEFAULT_TOL * lambda_max.max(1.0) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: *min,
            });
        }
    }
    let block = if proper {
        rotation(theta, dim)?
    } else {
        improper_rotation(theta, dim)?
    };
    let computed = spectral::general_eig(&(-l.kronecker(&block)))?;

    let block_eigs: Vec<num_complex::Complex64> = match (dim, proper) {
        (2, true) => vec![
            num_complex::Complex64::from_polar(1.0, theta),
            num_complex::Complex64::from_polar(1.0, -theta),
        ],
        (3, true) => vec![
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::from_polar(1.0, theta),
            num_complex::Complex64::from_polar(1.0, -theta),
        ],
        (2, false) => vec![
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(-1.0, 0.0),
        ],
        (3, false) => vec![
            num_complex::Complex64::new(-1.0, 0.0),
            num_complex::Complex64::from_polar(1.0, theta),
            num_complex::Complex64::from_polar(1.0, -theta),
        ],
        (other, _) => return Err(Error::UnsupportedDimension(other)),
    };
    let mut predicted = Vec::with_capacity(lap_values.len() * dim);
    for &lambda in &lap_values {
        for mu in &block_eigs {
            predicted.push(-lambda * mu);
        }
    }
    computed.matching_distance(&ComplexSpectrum::from_values(predicted))
}

/// One- or two-axis grid of minimum symmetrized eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct SweepGrid {
    /// Angle samples per axis (radians); one axis for homogeneous sweeps,
    /// two for heterogeneous ones.
    pub axes: Vec<Vec<f64>>,
    /// `values[i][j]` for axes `[i, j]`; single-axis grids have one-element
    /// rows.
    pub values: Vec<Vec<f64>>,
    /// Agents held at a constant ambiguity during the sweep.
    pub fixed_agents: BTreeMap<usize, AgentAmbiguity>,
}

impl SweepGrid {
    pub fn min_value(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Minimum symmetrized eigenvalue across a grid of homogeneous rotation
/// angles. For planar proper rotations the curve is exactly the cosine.
pub fn sweep_homogeneous(
    l: &DMatrix<f64>,
    dim: usize,
    proper: bool,
    thetas: &[f64],
) -> Result<SweepGrid> {
    if thetas.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one angle".into()));
    }
    let n = l.nrows();
    let split = spectral::split_range_nullspace(l, spectral::DEFAULT_TOL)?;
    let lifted_basis = lifted_range_basis(&split, dim);
    let mut values = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let agent = AgentAmbiguity::new(theta, proper, dim)?;
        let set = AmbiguitySet::homogeneous(n, agent)?;
        values.push(vec![min_eig_of_compression(&lifted_basis, set.matrix())]);
    }
    Ok(SweepGrid {
        axes: vec![thetas.to_vec()],
        values,
        fixed_agents: BTreeMap::new(),
    })
}

/// Two free agents sweep proper rotation angles while the rest stay fixed.
/// Cells with positive values form the empirical stability region.
pub fn sweep_heterogeneous(
    l: &DMatrix<f64>,
    dim: usize,
    free_agents: (usize, usize),
    thetas_first: &[f64],
    thetas_second: &[f64],
    fixed: &BTreeMap<usize, AgentAmbiguity>,
) -> Result<SweepGrid> {
    let n = l.nrows();
    let (a, b) = free_agents;
    if a == b {
        return Err(Error::InvalidConfig("free agents must be distinct".into()));
    }
    for &idx in [a, b].iter().chain(fixed.keys()) {
        if idx >= n {
            return Err(Error::AgentOutOfRange {
                index: idx,
                agents: n,
            });
        }
    }
    for idx in 0..n {
        if idx != a && idx != b && !fixed.contains_key(&idx) {
            return Err(Error::InvalidConfig(format!(
                "agent {idx} is neither free nor fixed"
            )));
        }
    }
    if thetas_first.is_empty() || thetas_second.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one angle".into()));
    }

    let split = spectral::split_range_nullspace(l, spectral::DEFAULT_TOL)?;
    let lifted_basis = lifted_range_basis(&split, dim);
    let template: Vec<AgentAmbiguity> = (0..n)
        .map(|idx| match fixed.get(&idx) {
            Some(agent) => Ok(*agent),
            None => AgentAmbiguity::identity(dim),
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(thetas_first.len());
    for &ta in thetas_first {
        let mut row = Vec::with_capacity(thetas_second.len());
        for &tb in thetas_second {
            let mut agents = template.clone();
            agents[a] = AgentAmbiguity::proper(ta, dim)?;
            agents[b] = AgentAmbiguity::proper(tb, dim)?;
            let set = AmbiguitySet::new(agents)?;
            row.push(min_eig_of_compression(&lifted_basis, set.matrix()));
        }
        values.push(row);
    }
    Ok(SweepGrid {
        axes: vec![thetas_first.to_vec(), thetas_second.to_vec()],
        values,
        fixed_agents: fixed.clone(),
    })
}

/// A stable draw found while hunting for counterexamples; logged verbatim.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub thetas: Vec<f64>,
    pub min_eig_gamma: f64,
}

/// Evidence report for the conjecture that one improper agent destroys
/// stability no matter what the others do.
#[derive(Debug, Clone, Serialize)]
pub struct MixedRotationEvidence {
    pub trials: usize,
    pub stable_count: usize,
    pub max_min_eig_gamma: f64,
    pub counterexamples: Vec<Counterexample>,
}

/// Randomized falsification harness: one agent keeps a fixed improper block
/// while every other agent draws a random proper angle each trial. Stable
/// verdicts are counted and logged, never suppressed; the conjecture predicts
/// zero.
pub fn mixed_rotation_evidence(
    l: &DMatrix<f64>,
    dim: usize,
    improper_agent: usize,
    improper_theta: f64,
    trials: usize,
    seed: u64,
) -> Result<MixedRotationEvidence> {
    let n = l.nrows();
    if improper_agent >= n {
        return Err(Error::AgentOutOfRange {
            index: improper_agent,
            agents: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stable_count = 0;
    let mut max_min_eig_gamma = f64::NEG_INFINITY;
    let mut counterexamples = Vec::new();
    for _ in 0..trials {
        let mut agents = Vec::with_capacity(n);
        let mut thetas = Vec::with_capacity(n);
        for idx in 0..n {
            if idx == improper_agent {
                agents.push(AgentAmbiguity::improper(improper_theta, dim)?);
                thetas.push(improper_theta);
            } else {
                let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                agents.push(AgentAmbiguity::proper(theta, dim)?);
                thetas.push(theta);
            }
        }
        let set = AmbiguitySet::new(agents)?;
        let report = stability_check(l, &set, spectral::DEFAULT_TOL)?;
        max_min_eig_gamma = max_min_eig_gamma.max(report.min_eig_gamma);
        if report.verdict == Verdict::Stable {
            stable_count += 1;
            counterexamples.push(Counterexample {
                thetas: thetas.clone(),
                min_eig_gamma: report.min_eig_gamma,
            });
        }
    }
    Ok(MixedRotationEvidence {
        trials,
        stable_count,
        max_min_eig_gamma,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn cycle_with_chord() -> DMatrix<f64> {
        crate::graph::Graph::with_unit_weights(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
            .unwrap()
            .laplacian()
    }

    #[test]
    fn identity_ambiguity_is_stable_with_unit_margin() {
        let l = cycle_with_chord();
        let amb = AmbiguitySet::identity(4, 2).unwrap();
        let report = stability_check(&l, &amb, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
        assert_relative_eq!(report.min_eig_gamma, 1.0, epsilon = 1e-12);
        assert!(report.consistent);
        assert_eq!(report.zero_multiplicity, 2);
    }

    #[test]
    fn homogeneous_proper_margin_is_cosine() {
        let l = cycle_with_chord();
        let agent = AgentAmbiguity::proper(FRAC_PI_3, 2).unwrap();
        let amb = AmbiguitySet::homogeneous(4, agent).unwrap();
        let report = stability_check(&l, &amb, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
        assert_relative_eq!(report.min_eig_gamma, 0.5, epsilon = 1e-12);
        assert!(report.consistent);
    }

    #[test]
    fn homogeneous_improper_is_unstable() {
        let l = cycle_with_chord();
        for theta in [0.0, 0.9, -2.5] {
            let agent = AgentAmbiguity::improper(theta, 2).unwrap();
            let amb = AmbiguitySet::homogeneous(4, agent).unwrap();
            let report = stability_check(&l, &amb, 1e-9).unwrap();
            assert_eq!(report.verdict, Verdict::Unstable);
            assert!(report.max_real_nonzero > 0.0);
            assert!(report.consistent);
        }
    }

    #[test]
    fn boundary_angle_is_marginal() {
        let l = cycle_with_chord();
        let agent = AgentAmbiguity::proper(FRAC_PI_2, 2).unwrap();
        let amb = AmbiguitySet::homogeneous(4, agent).unwrap();
        let report = stability_check(&l, &amb, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Marginal);
    }

    #[test]
    fn sufficient_check_matches_cosine_floor() {
        let thetas = [0.2, -1.1, 0.8, 1.4];
        let agents: Vec<_> = thetas
            .iter()
            .map(|&t| AgentAmbiguity::proper(t, 2).unwrap())
            .collect();
        let set = AmbiguitySet::new(agents).unwrap();
        let (ok, min_eig) = sufficient_check(&set, 1e-9);
        assert!(ok);
        let expected = thetas.iter().map(|t| t.cos()).fold(f64::INFINITY, f64::min);
        assert_relative_eq!(min_eig, expected, epsilon = 1e-12);

        // Any improper block kills sufficiency.
        let mut agents: Vec<_> = thetas
            .iter()
            .map(|&t| AgentAmbiguity::proper(t, 2).unwrap())
            .collect();
        agents[1] = AgentAmbiguity::improper(0.4, 2).unwrap();
        let set = AmbiguitySet::new(agents).unwrap();
        let (ok, min_eig) = sufficient_check(&set, 1e-9);
        assert!(!ok);
        assert_relative_eq!(min_eig, -1.0, epsilon = 1e-12);

        // A right-angle rotation sits exactly on the boundary.
        let set = AmbiguitySet::homogeneous(3, AgentAmbiguity::proper(FRAC_PI_2, 2).unwrap())
            .unwrap();
        let (ok, min_eig) = sufficient_check(&set, 1e-9);
        assert!(!ok);
        assert!(min_eig.abs() < 1e-12);
    }

    #[test]
    fn sufficiency_implies_stability() {
        let l = cycle_with_chord();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let agents: Vec<_> = (0..4)
                .map(|_| {
                    AgentAmbiguity::proper(rng.random_range(-PI..PI), 2).unwrap()
                })
                .collect();
            let set = AmbiguitySet::new(agents).unwrap();
            let (sufficient, _) = sufficient_check(&set, 1e-9);
            if sufficient {
                let report = stability_check(&l, &set, 1e-9).unwrap();
                assert_eq!(report.verdict, Verdict::Stable);
            }
        }
    }

    #[test]
    fn closed_form_margin() {
        assert_eq!(
            homogeneous_margin(std::f64::consts::FRAC_PI_4, true, 2).unwrap(),
            Verdict::Stable
        );
        assert_eq!(
            homogeneous_margin(FRAC_PI_2, true, 2).unwrap(),
            Verdict::Marginal
        );
        assert_eq!(homogeneous_margin(2.0, true, 3).unwrap(), Verdict::Unstable);
        assert_eq!(homogeneous_margin(0.1, false, 2).unwrap(), Verdict::Unstable);
        assert!(homogeneous_margin(0.1, true, 5).is_err());
    }

    #[test]
    fn rotation_lemma_proper_planar() {
        let l = crate::graph::Graph::with_unit_weights(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
            .unwrap()
            .laplacian();
        for theta in [0.0, 0.3, FRAC_PI_3, -2.0] {
            let residual = check_rotation_lemma(&l, theta, 2, true).unwrap();
            assert!(residual < 1e-8, "residual {residual} at theta {theta}");
        }
    }

    #[test]
    fn rotation_lemma_improper_has_positive_real_eigenvalue() {
        let l = cycle_with_chord();
        let residual = check_rotation_lemma(&l, 0.0, 2, false).unwrap();
        assert!(residual < 1e-8);
        let spectrum =
            spectral::general_eig(&(-l.kronecker(&improper_rotation(0.0, 2).unwrap()))).unwrap();
        assert!(spectrum.max_real_part() > 1.0);
    }

    #[test]
    fn rotation_lemma_identity_block() {
        let l = cycle_with_chord();
        // theta = 0 proper: each Laplacian eigenvalue negated, multiplicity d.
        let residual = check_rotation_lemma(&l, 0.0, 3, true).unwrap();
        assert!(residual < 1e-8);
    }

    #[test]
    fn homogeneous_sweep_traces_cosine() {
        let l = cycle_with_chord();
        let thetas: Vec<f64> = (0..73).map(|k| -PI + 2.0 * PI * k as f64 / 72.0).collect();
        let grid = sweep_homogeneous(&l, 2, true, &thetas).unwrap();
        for (row, &theta) in grid.values.iter().zip(&thetas) {
            assert_relative_eq!(row[0], theta.cos(), epsilon = 1e-9);
        }

        let improper = sweep_homogeneous(&l, 2, false, &thetas).unwrap();
        assert!(improper.max_value() <= 0.0 + 1e-12);

        let single = sweep_homogeneous(&l, 2, true, &[0.0]).unwrap();
        assert_relative_eq!(single.values[0][0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn heterogeneous_sweep_contains_sufficient_box() {
        let l = cycle_with_chord();
        let fixed: BTreeMap<usize, AgentAmbiguity> = [
            (0usize, AgentAmbiguity::identity(2).unwrap()),
            (1usize, AgentAmbiguity::identity(2).unwrap()),
        ]
        .into_iter()
        .collect();
        let thetas: Vec<f64> = (0..37).map(|k| -PI + 2.0 * PI * k as f64 / 36.0).collect();
        let grid = sweep_heterogeneous(&l, 2, (2, 3), &thetas, &thetas, &fixed).unwrap();
        for (i, &ta) in thetas.iter().enumerate() {
            for (j, &tb) in thetas.iter().enumerate() {
                if ta.abs() < FRAC_PI_2 - 0.05 && tb.abs() < FRAC_PI_2 - 0.05 {
                    assert!(
                        grid.values[i][j] > 0.0,
                        "cell ({ta}, {tb}) = {} should be stable",
                        grid.values[i][j]
                    );
                }
            }
        }

        let trivial = sweep_heterogeneous(&l, 2, (2, 3), &[0.0], &[0.0], &fixed).unwrap();
        assert_relative_eq!(trivial.values[0][0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn congruence_invariance_of_min_eig() {
        // Replacing the range basis by any orthogonal recombination leaves
        // the minimum symmetrized eigenvalue unchanged.
        let l = cycle_with_chord();
        let split = spectral::split_range_nullspace(&l, 1e-9).unwrap();
        let lifted = lifted_range_basis(&split, 2);
        let set = AmbiguitySet::new(vec![
            AgentAmbiguity::proper(0.7, 2).unwrap(),
            AgentAmbiguity::proper(-0.2, 2).unwrap(),
            AgentAmbiguity::proper(1.9, 2).unwrap(),
            AgentAmbiguity::proper(0.4, 2).unwrap(),
        ])
        .unwrap();
        let base = min_eig_of_compression(&lifted, set.matrix());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0))
            .qr()
            .q();
        let rotated = &lifted * p;
        let alt = min_eig_of_compression(&rotated, set.matrix());
        assert_relative_eq!(base, alt, epsilon = 1e-9);
    }

    #[test]
    fn nonzero_spectrum_matches_range_compression() {
        // The nonzero part of the product spectrum equals the spectrum of the
        // compressed product with the lifted eigenvalue block.
        let l = cycle_with_chord();
        let set = AmbiguitySet::new(vec![
            AgentAmbiguity::proper(0.5, 2).unwrap(),
            AgentAmbiguity::improper(-0.9, 2).unwrap(),
            AgentAmbiguity::proper(2.2, 2).unwrap(),
            AgentAmbiguity::proper(-1.4, 2).unwrap(),
        ])
        .unwrap();
        let report = stability_check(&l, &set, 1e-9).unwrap();

        let split = spectral::split_range_nullspace(&l, 1e-9).unwrap();
        let lifted_basis = lifted_range_basis(&split, 2);
        let lambda_lift = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            split
                .eigenvalues
                .iter()
                .flat_map(|&v| [v, v])
                .collect::<Vec<_>>(),
        ));
        let compressed = -(lifted_basis.transpose() * set.matrix() * &lifted_basis) * lambda_lift;
        let compressed_spectrum = spectral::general_eig(&compressed).unwrap();

        let zero_band = 1e-9
            * report
                .spectrum
                .values()
                .iter()
                .map(|z| z.norm())
                .fold(1.0f64, f64::max);
        let nonzero: Vec<_> = report.spectrum.nonzero(zero_band).collect();
        assert_eq!(nonzero.len(), compressed_spectrum.len());
        let lhs = ComplexSpectrum::from_values(nonzero);
        assert!(lhs.matching_distance(&compressed_spectrum).unwrap() < 1e-8);
        assert_eq!(report.zero_multiplicity, 2);
    }

    #[test]
    fn evidence_harness_finds_no_stable_mixed_draws() {
        let l = cycle_with_chord();
        let evidence = mixed_rotation_evidence(&l, 2, 3, 0.0, 100, 23).unwrap();
        assert_eq!(evidence.stable_count, 0);
        assert!(evidence.counterexamples.is_empty());
        assert!(evidence.max_min_eig_gamma <= 0.0);
    }

    #[test]
    fn consistency_on_random_heterogeneous_draws() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let n = rng.random_range(3..7);
            let g = crate::graph::tests::random_unit_graph(&mut rng, n);
            let agents: Vec<_> = (0..n)
                .map(|_| {
                    AgentAmbiguity::new(
                        rng.random_range(-PI..PI),
                        rng.random_bool(0.7),
                        2,
                    )
                    .unwrap()
                })
                .collect();
            let set = AmbiguitySet::new(agents).unwrap();
            let report = stability_check(&g.laplacian(), &set, 1e-9).unwrap();
            assert!(report.consistent, "inconsistent report: {report:?}");
            assert_eq!(report.zero_multiplicity, 2);
        }
    }
}
