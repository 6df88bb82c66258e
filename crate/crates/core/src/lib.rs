//! Stability analysis and simulation of linear consensus systems whose agents
//! perceive positions through rotated or reflected local frames.
//!
//! The crate is organized around a dense linear-algebra kernel ([`spectral`]),
//! graph Laplacians and stress matrices ([`graph`], [`stress`]), per-agent
//! frame ambiguities ([`ambiguity`]), the stability theory itself
//! ([`stability`]), time-domain integration with leader pinning
//! ([`dynamics`]) and scenario orchestration plus file I/O ([`scenario`],
//! [`output`]).

pub mod ambiguity;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod output;
pub mod scenario;
pub mod spectral;
pub mod stability;
pub mod stress;

pub use ambiguity::{assemble_global, improper_rotation, rotation, AgentAmbiguity, AmbiguitySet};
pub use dynamics::{
    error_trace, fit_decay_rate, integrate, pin_leaders, Classification, DecayFit,
    IntegrationMethod, PinnedSystem, SimulationTrace,
};
pub use error::{Error, Result};
pub use graph::{validate_laplacian, Graph, ValidationReport};
pub use scenario::{
    formation_scenario, rendezvous_scenario, run_experiment, ExperimentResult, ScenarioConfig,
};
pub use spectral::{
    gamma, general_eig, is_positive_definite, kron, matrix_exponential, split_range_nullspace,
    symmetric_eig, ComplexSpectrum, SpectralSplit, DEFAULT_TOL,
};
pub use stability::{
    check_rotation_lemma, homogeneous_margin, mixed_rotation_evidence, stability_check,
    sufficient_check, sweep_heterogeneous, sweep_homogeneous, MixedRotationEvidence,
    StabilityReport, SweepGrid, Verdict,
};
pub use stress::{compute_stress_matrix, Configuration};
