//! Per-agent rotational ambiguities and the global block-diagonal ambiguity
//! matrix.
//!
//! An agent's perception of positions is distorted by an orthogonal block:
//! a proper rotation (determinant +1) or an improper one (determinant -1,
//! a rotation composed with a reflection). In three dimensions the rotation
//! axis is fixed to z, which loses no generality for the stability question.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Proper rotation by `theta`: the 2x2 plane rotation, or the 3x3 rotation
/// about the z-axis.
pub fn rotation(theta: f64, dim: usize) -> Result<DMatrix<f64>> {
    let (c, s) = (theta.cos(), theta.sin());
    match dim {
        2 => Ok(DMatrix::from_row_slice(2, 2, &[c, -s, s, c])),
        3 => Ok(DMatrix::from_row_slice(
            3,
            3,
            &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0],
        )),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Improper rotation: the proper rotation right-multiplied by the reflection
/// diag(1, -1) in 2-D or diag(1, 1, -1) in 3-D.
pub fn improper_rotation(theta: f64, dim: usize) -> Result<DMatrix<f64>> {
    let mut h = rotation(theta, dim)?;
    let last = dim - 1;
    for r in 0..dim {
        h[(r, last)] = -h[(r, last)];
    }
    Ok(h)
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = theta.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

/// One agent's frame ambiguity: an angle in (-pi, pi], a proper/improper
/// flag and the spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentAmbiguity {
    theta: f64,
    proper: bool,
    dim: usize,
}

impl AgentAmbiguity {
    pub fn new(theta: f64, proper: bool, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            theta: wrap_angle(theta),
            proper,
            dim,
        })
    }

    pub fn proper(theta: f64, dim: usize) -> Result<Self> {
        Self::new(theta, true, dim)
    }

    pub fn improper(theta: f64, dim: usize) -> Result<Self> {
        Self::new(theta, false, dim)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(0.0, true, dim)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The d x d orthogonal block this ambiguity applies to perceived positions.
    pub fn block(&self) -> DMatrix<f64> {
        if self.proper {
            rotation(self.theta, self.dim)
        } else {
            improper_rotation(self.theta, self.dim)
        }
        .expect("dimension validated at construction")
    }
}

/// The global ambiguity: one orthogonal block per agent, assembled into a
/// block-diagonal nd x nd matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySet {
    agents: Vec<AgentAmbiguity>,
    assembled: DMatrix<f64>,
}

/// Assembles the per-agent blocks into the global block-diagonal matrix.
/// All agents must share one spatial dimension.
pub fn assemble_global(agents: &[AgentAmbiguity]) -> Result<AmbiguitySet> {
    AmbiguitySet::new(agents.to_vec())
}

impl AmbiguitySet {
    pub fn new(agents: Vec<AgentAmbiguity>) -> Result<Self> {
        let first = agents.first().ok_or(Error::EmptyAmbiguity)?;
        let dim = first.dim();
        if agents.iter().any(|a| a.dim() != dim) {
            return Err(Error::MixedDimensions);
        }
        let n = agents.len();
        let mut assembled = DMatrix::zeros(n * dim, n * dim);
        for (idx, agent) in agents.iter().enumerate() {
            let block = agent.block();
            assembled
                .view_mut((idx * dim, idx * dim), (dim, dim))
                .copy_from(&block);
        }
        Ok(Self { agents, assembled })
    }

    /// Every agent shares the same block.
    pub fn homogeneous(n: usize, agent: AgentAmbiguity) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAmbiguity);
        }
        Self::new(vec![agent; n])
    }

    /// No ambiguity at all: the identity on every agent.
    pub fn identity(n: usize, dim: usize) -> Result<Self> {
        Self::homogeneous(n, AgentAmbiguity::identity(dim)?)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn dim(&self) -> usize {
        self.agents[0].dim()
    }

    pub fn agents(&self) -> &[AgentAmbiguity] {
        &self.agents
    }

    /// The assembled block-diagonal matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.assembled
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn rotation_layouts() {
        assert_relative_eq!(
            rotation(0.0, 2).unwrap(),
            DMatrix::identity(2, 2),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            rotation(FRAC_PI_2, 2).unwrap(),
            dmatrix![0.0, -1.0; 1.0, 0.0],
            epsilon = 1e-15
        );
        assert_relative_eq!(
            rotation(PI, 3).unwrap(),
            DMatrix::from_diagonal(&nalgebra::dvector![-1.0, -1.0, 1.0]),
            epsilon = 1e-15
        );
        assert!(rotation(0.1, 4).is_err());
    }

    #[test]
    fn improper_layouts() {
        assert_relative_eq!(
            improper_rotation(0.0, 2).unwrap(),
            DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            improper_rotation(0.0, 3).unwrap(),
            DMatrix::from_diagonal(&nalgebra::dvector![1.0, 1.0, -1.0]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn determinants_match_flags() {
        for &theta in &[0.0, 0.4, -2.2, PI] {
            for dim in [2usize, 3] {
                assert_relative_eq!(rotation(theta, dim).unwrap().determinant(), 1.0, epsilon = 1e-12);
                assert_relative_eq!(
                    improper_rotation(theta, dim).unwrap().determinant(),
                    -1.0,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn planar_improper_is_a_reflection() {
        // Eigenvalues {+1, -1} for every angle.
        for &theta in &[0.0, 0.7, -1.9, 2.8] {
            let h = improper_rotation(theta, 2).unwrap();
            let spectrum = crate::spectral::general_eig(&h).unwrap();
            let values = spectrum.values();
            assert_relative_eq!(values[0].re, -1.0, epsilon = 1e-12);
            assert_relative_eq!(values[1].re, 1.0, epsilon = 1e-12);
            assert!(values[0].im.abs() < 1e-12 && values[1].im.abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_assembly_equals_kron() {
        let agent = AgentAmbiguity::proper(FRAC_PI_3, 2).unwrap();
        let set = AmbiguitySet::homogeneous(4, agent).unwrap();
        let expected = crate::spectral::kron(&DMatrix::identity(4, 4), &agent.block());
        assert_eq!(set.matrix(), &expected);
    }

    #[test]
    fn single_agent_assembly_is_the_block() {
        let agent = AgentAmbiguity::improper(0.3, 3).unwrap();
        let set = AmbiguitySet::new(vec![agent]).unwrap();
        assert_eq!(set.matrix(), &agent.block());
    }

    #[test]
    fn two_block_assembly_layout() {
        let a = AgentAmbiguity::proper(FRAC_PI_4, 2).unwrap();
        let b = AgentAmbiguity::improper(0.0, 2).unwrap();
        let set = AmbiguitySet::new(vec![a, b]).unwrap();
        let m = set.matrix();
        assert_eq!(m.view((0, 0), (2, 2)).clone_owned(), a.block());
        assert_eq!(m.view((2, 2), (2, 2)).clone_owned(), b.block());
        assert_eq!(m.view((0, 2), (2, 2)).amax(), 0.0);
        assert_eq!(m.view((2, 0), (2, 2)).amax(), 0.0);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = AgentAmbiguity::proper(0.0, 2).unwrap();
        let b = AgentAmbiguity::proper(0.0, 3).unwrap();
        assert!(matches!(
            AmbiguitySet::new(vec![a, b]),
            Err(Error::MixedDimensions)
        ));
    }

    #[test]
    fn assembled_matrix_is_orthogonal() {
        let agents = vec![
            AgentAmbiguity::proper(0.9, 2).unwrap(),
            AgentAmbiguity::improper(-2.4, 2).unwrap(),
            AgentAmbiguity::proper(-0.1, 2).unwrap(),
        ];
        let set = AmbiguitySet::new(agents).unwrap();
        let m = set.matrix();
        let residual = (m.transpose() * m - DMatrix::identity(6, 6)).amax();
        assert!(residual < 1e-12);
    }

    #[test]
    fn symmetrized_proper_planar_set_is_diagonal_of_cosines() {
        let thetas = [0.3, -1.2, 2.0, 0.0];
        let agents: Vec<_> = thetas
            .iter()
            .map(|&t| AgentAmbiguity::proper(t, 2).unwrap())
            .collect();
        let set = AmbiguitySet::new(agents).unwrap();
        let g = crate::spectral::gamma(set.matrix()).unwrap();
        let mut expected = DMatrix::zeros(8, 8);
        for (i, &t) in thetas.iter().enumerate() {
            expected[(2 * i, 2 * i)] = t.cos();
            expected[(2 * i + 1, 2 * i + 1)] = t.cos();
        }
        assert_relative_eq!(g, expected, epsilon = 1e-12);
    }

    #[test]
    fn angles_wrap_into_half_open_interval() {
        let a = AgentAmbiguity::proper(3.0 * PI, 2).unwrap();
        assert_relative_eq!(a.theta(), PI, epsilon = 1e-12);
        let b = AgentAmbiguity::proper(-PI, 2).unwrap();
        assert_relative_eq!(b.theta(), PI, epsilon = 1e-12);
    }
}
