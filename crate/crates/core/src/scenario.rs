//! Scenario definitions, config ingestion and experiment orchestration.
//!
//! Scenarios are JSON files: a graph (explicit weights, or a stress matrix
//! synthesized from a target configuration), leaders, per-agent ambiguities
//! with explicit angle units, and optional sweep and simulation sections.
//! Agent IDs in files are 1-based to match the usual figure labeling;
//! everything internal is 0-based, converted only at this boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{AgentAmbiguity, AmbiguitySet};
use crate::dynamics::{self, Classification, DecayFit, IntegrationMethod, SimulationTrace};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::output::{self, ManifestEntry};
use crate::spectral::DEFAULT_TOL;
use crate::stability::{self, StabilityReport, SweepGrid};
use crate::stress::{self, Configuration};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleUnit {
    Rad,
    Deg,
}

fn to_radians(theta: f64, unit: AngleUnit) -> f64 {
    match unit {
        AngleUnit::Rad => theta,
        AngleUnit::Deg => theta.to_radians(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub i: usize,
    pub j: usize,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    #[default]
    Standard,
    StressFromConfiguration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub laplacian: LaplacianKind,
    /// Seed for the stress synthesis search; ignored for standard Laplacians.
    #[serde(default)]
    pub stress_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityMode {
    Homogeneous,
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityEntry {
    /// 1-based agent ID; ignored in homogeneous mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<usize>,
    pub theta: f64,
    pub unit: AngleUnit,
    pub proper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguitySpec {
    pub mode: AmbiguityMode,
    pub entries: Vec<AmbiguityEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    ExactExp,
    Rk4,
}

impl From<MethodSpec> for IntegrationMethod {
    fn from(m: MethodSpec) -> Self {
        match m {
            MethodSpec::ExactExp => IntegrationMethod::ExactExp,
            MethodSpec::Rk4 => IntegrationMethod::Rk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub method: MethodSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

impl AxisSpec {
    pub fn sample(&self, unit: AngleUnit) -> Vec<f64> {
        if self.samples <= 1 {
            return vec![to_radians(self.start, unit)];
        }
        let step = (self.stop - self.start) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| to_radians(self.start + k as f64 * step, unit))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub mode: AmbiguityMode,
    /// Whether the swept blocks are proper rotations.
    #[serde(default = "default_true")]
    pub proper: bool,
    pub unit: AngleUnit,
    pub axes: Vec<AxisSpec>,
    /// 1-based IDs of the two swept agents (heterogeneous mode).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free_agents: Vec<usize>,
    /// Constant ambiguities for the remaining agents (heterogeneous mode).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixed: Vec<AmbiguityEntry>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub dimension: usize,
    pub graph: GraphSpec,
    /// 1-based leader IDs.
    pub leaders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<Vec<f64>>,
    /// Stacked target coordinates, required for stress synthesis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Vec<f64>>,
    pub ambiguity: AmbiguitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut body = serde_json::to_string_pretty(self).expect("config serializes");
        body.push('\n');
        body
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.vertices;
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::InvalidConfig(format!(
                "dimension must be 2 or 3, got {}",
                self.dimension
            )));
        }
        for e in &self.graph.edges {
            if e.i < 1 || e.i > n || e.j < 1 || e.j > n {
                return Err(Error::InvalidConfig(format!(
                    "edge ({}, {}) outside 1..={n}",
                    e.i, e.j
                )));
            }
        }
        let mut seen_leaders = BTreeSet::new();
        for &id in &self.leaders {
            if id < 1 || id > n {
                return Err(Error::InvalidConfig(format!("leader {id} outside 1..={n}")));
            }
            if !seen_leaders.insert(id) {
                return Err(Error::InvalidConfig(format!("duplicate leader {id}")));
            }
        }
        if let Some(z_e) = &self.equilibrium {
            if z_e.len() != n * self.dimension {
                return Err(Error::InvalidConfig(format!(
                    "equilibrium has {} entries, expected {}",
                    z_e.len(),
                    n * self.dimension
                )));
            }
        }
        if let Some(coords) = &self.configuration {
            if coords.len() != n * self.dimension {
                return Err(Error::InvalidConfig(format!(
                    "configuration has {} entries, expected {}",
                    coords.len(),
                    n * self.dimension
                )));
            }
        }
        if self.graph.laplacian == LaplacianKind::StressFromConfiguration
            && self.configuration.is_none()
        {
            return Err(Error::InvalidConfig(
                "stress synthesis needs a target configuration".into(),
            ));
        }
        match self.ambiguity.mode {
            AmbiguityMode::Homogeneous => {
                if self.ambiguity.entries.len() != 1 {
                    return Err(Error::InvalidConfig(
                        "homogeneous ambiguity takes exactly one entry".into(),
                    ));
                }
            }
            AmbiguityMode::Heterogeneous => {
                check_agent_cover(&self.ambiguity.entries, n, "ambiguity")?;
            }
        }
        if let Some(sim) = &self.simulation {
            if !(sim.dt > 0.0) || !(sim.t_end >= sim.dt) {
                return Err(Error::InvalidConfig(format!(
                    "simulation needs 0 < dt <= t_end, got dt = {}, t_end = {}",
                    sim.dt, sim.t_end
                )));
            }
            if self.leaders.is_empty() {
                return Err(Error::InvalidConfig(
                    "simulation needs at least one leader".into(),
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            match sweep.mode {
                AmbiguityMode::Homogeneous => {
                    if sweep.axes.len() != 1 {
                        return Err(Error::InvalidConfig(
                            "homogeneous sweep takes exactly one axis".into(),
                        ));
                    }
                }
                AmbiguityMode::Heterogeneous => {
                    if sweep.axes.len() != 2 {
                        return Err(Error::InvalidConfig(
                            "heterogeneous sweep takes exactly two axes".into(),
                        ));
                    }
                    if sweep.free_agents.len() != 2
                        || sweep.free_agents[0] == sweep.free_agents[1]
                    {
                        return Err(Error::InvalidConfig(
                            "heterogeneous sweep needs two distinct free agents".into(),
                        ));
                    }
                    for &id in &sweep.free_agents {
                        if id < 1 || id > n {
                            return Err(Error::InvalidConfig(format!(
                                "free agent {id} outside 1..={n}"
                            )));
                        }
                    }
                    let mut covered: Vec<AmbiguityEntry> = sweep.fixed.clone();
                    covered.extend(sweep.free_agents.iter().map(|&id| AmbiguityEntry {
                        agent: Some(id),
                        theta: 0.0,
                        unit: AngleUnit::Rad,
                        proper: true,
                    }));
                    check_agent_cover(&covered, n, "sweep")?;
                }
            }
            for axis in &sweep.axes {
                if axis.samples == 0 {
                    return Err(Error::InvalidConfig("sweep axis needs samples >= 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::new(
            self.graph.vertices,
            self.graph
                .edges
                .iter()
                .map(|e| (e.i - 1, e.j - 1, e.weight)),
        )
    }

    /// The system Laplacian: built from the edge weights, or synthesized as a
    /// stress matrix from the target configuration.
    pub fn laplacian(&self) -> Result<DMatrix<f64>> {
        let graph = self.graph()?;
        match self.graph.laplacian {
            LaplacianKind::Standard => Ok(graph.laplacian()),
            LaplacianKind::StressFromConfiguration => {
                let coords = self
                    .configuration
                    .as_ref()
                    .expect("validated: stress mode carries a configuration");
                let config = Configuration::from_stacked(self.dimension, coords)?;
                stress::compute_stress_matrix(&graph, &config, self.graph.stress_seed)
            }
        }
    }

    pub fn ambiguity_set(&self) -> Result<AmbiguitySet> {
        let n = self.graph.vertices;
        let d = self.dimension;
        match self.ambiguity.mode {
            AmbiguityMode::Homogeneous => {
                let e = &self.ambiguity.entries[0];
                AmbiguitySet::homogeneous(
                    n,
                    AgentAmbiguity::new(to_radians(e.theta, e.unit), e.proper, d)?,
                )
            }
            AmbiguityMode::Heterogeneous => {
                let mut agents = vec![AgentAmbiguity::identity(d)?; n];
                for e in &self.ambiguity.entries {
                    let id = e.agent.expect("validated: entries carry agent ids");
                    agents[id - 1] =
                        AgentAmbiguity::new(to_radians(e.theta, e.unit), e.proper, d)?;
                }
                AmbiguitySet::new(agents)
            }
        }
    }

    /// Leaders as 0-based indices.
    pub fn leaders0(&self) -> BTreeSet<usize> {
        self.leaders.iter().map(|&id| id - 1).collect()
    }

    /// The equilibrium state: explicit, else the stress configuration, else
    /// the origin.
    pub fn equilibrium_vector(&self) -> DVector<f64> {
        let n = self.graph.vertices * self.dimension;
        if let Some(z_e) = &self.equilibrium {
            return DVector::from_vec(z_e.clone());
        }
        if self.graph.laplacian == LaplacianKind::StressFromConfiguration {
            if let Some(coords) = &self.configuration {
                return DVector::from_vec(coords.clone());
            }
        }
        DVector::zeros(n)
    }
}

fn check_agent_cover(entries: &[AmbiguityEntry], n: usize, what: &str) -> Result<()> {
    if entries.len() != n {
        return Err(Error::InvalidConfig(format!(
            "{what} covers {} agents, expected {n}",
            entries.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for e in entries {
        let id = e.agent.ok_or_else(|| {
            Error::InvalidConfig(format!("{what} entries need explicit agent ids"))
        })?;
        if id < 1 || id > n {
            return Err(Error::InvalidConfig(format!(
                "{what} references agent {id} outside 1..={n}"
            )));
        }
        if !seen.insert(id) {
            return Err(Error::InvalidConfig(format!(
                "{what} lists agent {id} twice"
            )));
        }
    }
    Ok(())
}

/// Four agents on a cycle with one chord, unit weights, leader 1 pinned at
/// the origin; the classic rendezvous setup.
pub fn rendezvous_scenario() -> ScenarioConfig {
    ScenarioConfig {
        name: "rendezvous".into(),
        provenance: Some("baseline rendezvous case: leader at the origin, unambiguous".into()),
        dimension: 2,
        graph: GraphSpec {
            vertices: 4,
            edges: [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]
                .into_iter()
                .map(|(i, j)| EdgeSpec { i, j, weight: 1.0 })
                .collect(),
            laplacian: LaplacianKind::Standard,
            stress_seed: 0,
        },
        leaders: vec![1],
        equilibrium: Some(vec![0.0; 8]),
        configuration: None,
        ambiguity: AmbiguitySpec {
            mode: AmbiguityMode::Homogeneous,
            entries: vec![AmbiguityEntry {
                agent: None,
                theta: 0.0,
                unit: AngleUnit::Rad,
                proper: true,
            }],
        },
        simulation: Some(SimulationSpec {
            dt: 0.01,
            t_end: 30.0,
            seed: 42,
            method: MethodSpec::ExactExp,
        }),
        sweep: None,
    }
}

/// Target coordinates of the seven-agent planar arrow formation; agents 1-3
/// are the leaders.
pub const FORMATION_COORDS: [f64; 14] = [
    2.0, 0.0, 1.0, 1.0, 1.0, -1.0, 0.0, 1.0, 0.0, -1.0, -1.0, 1.0, -1.0, -1.0,
];

/// Seven agents holding a planar arrow under a synthesized stress matrix;
/// the first three agents lead from their target positions.
pub fn formation_scenario() -> ScenarioConfig {
    let mut edges: Vec<EdgeSpec> = Vec::new();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        edges.push(EdgeSpec { i, j, weight: 1.0 });
    }
    for leader in 1..=3 {
        for follower in 4..=7 {
            edges.push(EdgeSpec {
                i: leader,
                j: follower,
                weight: 1.0,
            });
        }
    }
    for (i, j) in [(4, 6), (6, 7), (5, 7), (4, 5)] {
        edges.push(EdgeSpec { i, j, weight: 1.0 });
    }
    ScenarioConfig {
        name: "formation".into(),
        provenance: Some(
            "affine formation case: stress matrix over the seven-point arrow; \
             the printed target vector is interpreted as the symmetric planar \
             arrow [2,0, 1,1, 1,-1, 0,1, 0,-1, -1,1, -1,-1], and the edge set \
             is a choice (leader triangle, leaders to all followers, follower \
             ring) validated by the rank condition"
                .into(),
        ),
        dimension: 2,
        graph: GraphSpec {
            vertices: 7,
            edges,
            laplacian: LaplacianKind::StressFromConfiguration,
            stress_seed: 7,
        },
        leaders: vec![1, 2, 3],
        equilibrium: Some(FORMATION_COORDS.to_vec()),
        configuration: Some(FORMATION_COORDS.to_vec()),
        ambiguity: AmbiguitySpec {
            mode: AmbiguityMode::Homogeneous,
            entries: vec![AmbiguityEntry {
                agent: None,
                theta: 0.0,
                unit: AngleUnit::Rad,
                proper: true,
            }],
        },
        simulation: Some(SimulationSpec {
            dt: 0.01,
            t_end: 60.0,
            seed: 42,
            method: MethodSpec::ExactExp,
        }),
        sweep: None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceMetadata {
    pub scenario: String,
    pub seed: u64,
    pub method: MethodSpec,
    pub dt: f64,
    pub t_end: f64,
    pub classification: Classification,
    pub decay_rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub initial_error: f64,
    pub final_error: f64,
}

/// Everything one scenario run produced, plus the checksummed list of files
/// it wrote.
#[derive(Debug)]
pub struct ExperimentResult {
    pub name: String,
    pub report: StabilityReport,
    pub sufficient: (bool, f64),
    pub sweep: Option<SweepGrid>,
    pub trace: Option<SimulationTrace>,
    pub decay: Option<DecayFit>,
    pub manifest: Vec<ManifestEntry>,
}

/// Runs the analyses a scenario declares — the stability check always, then
/// the sweep and the simulation when configured — and writes their artifacts
/// under `out_dir`, named `<scenario>_*`. Deterministic for a fixed config.
pub fn run_experiment(cfg: &ScenarioConfig, out_dir: &Path) -> Result<ExperimentResult> {
    cfg.validate()?;
    let laplacian = cfg.laplacian()?;
    let amb = cfg.ambiguity_set()?;
    let mut manifest: Vec<ManifestEntry> = Vec::new();

    let report = stability::stability_check(&laplacian, &amb, DEFAULT_TOL)?;
    let sufficient = stability::sufficient_check(&amb, DEFAULT_TOL);
    output::emit(
        out_dir,
        &format!("{}_report.json", cfg.name),
        {
            let mut body = serde_json::to_string_pretty(&report)?;
            body.push('\n');
            body
        }
        .as_bytes(),
        &mut manifest,
    )?;
    output::emit(
        out_dir,
        &format!("{}_spectrum.csv", cfg.name),
        output::spectrum_csv(&report.spectrum).as_bytes(),
        &mut manifest,
    )?;

    let sweep = match &cfg.sweep {
        Some(spec) => Some(run_sweep(cfg, spec, &laplacian, out_dir, &mut manifest)?),
        None => None,
    };

    let (trace, decay) = match &cfg.simulation {
        Some(sim) => {
            let (trace, decay) = run_simulation(cfg, sim, &laplacian, &amb, out_dir, &mut manifest)?;
            (Some(trace), decay)
        }
        None => (None, None),
    };

    output::write_json(
        &out_dir.join(format!("{}_manifest.json", cfg.name)),
        &manifest,
    )?;

    Ok(ExperimentResult {
        name: cfg.name.clone(),
        report,
        sufficient,
        sweep,
        trace,
        decay,
        manifest,
    })
}

fn run_sweep(
    cfg: &ScenarioConfig,
    spec: &SweepSpec,
    laplacian: &DMatrix<f64>,
    out_dir: &Path,
    manifest: &mut Vec<ManifestEntry>,
) -> Result<SweepGrid> {
    let d = cfg.dimension;
    let grid = match spec.mode {
        AmbiguityMode::Homogeneous => {
            let thetas = spec.axes[0].sample(spec.unit);
            stability::sweep_homogeneous(laplacian, d, spec.proper, &thetas)?
        }
        AmbiguityMode::Heterogeneous => {
            let first = spec.axes[0].sample(spec.unit);
            let second = spec.axes[1].sample(spec.unit);
            let free = (spec.free_agents[0] - 1, spec.free_agents[1] - 1);
            let fixed: BTreeMap<usize, AgentAmbiguity> = spec
                .fixed
                .iter()
                .map(|e| {
                    let agent = e.agent.expect("validated: fixed entries carry ids") - 1;
                    Ok((
                        agent,
                        AgentAmbiguity::new(to_radians(e.theta, e.unit), e.proper, d)?,
                    ))
                })
                .collect::<Result<_>>()?;
            stability::sweep_heterogeneous(laplacian, d, free, &first, &second, &fixed)?
        }
    };
    output::emit(
        out_dir,
        &format!("{}_sweep.csv", cfg.name),
        output::sweep_csv(&grid).as_bytes(),
        manifest,
    )?;
    Ok(grid)
}

fn run_simulation(
    cfg: &ScenarioConfig,
    sim: &SimulationSpec,
    laplacian: &DMatrix<f64>,
    amb: &AmbiguitySet,
    out_dir: &Path,
    manifest: &mut Vec<ManifestEntry>,
) -> Result<(SimulationTrace, Option<DecayFit>)> {
    let leaders = cfg.leaders0();
    let system = dynamics::pin_leaders(laplacian, amb, &leaders)?;
    let z_e = cfg.equilibrium_vector();
    let z0 = initial_state(cfg, &z_e, sim.seed);
    let trace = dynamics::integrate(&system, &z0, sim.dt, sim.t_end, sim.method.into())?;
    let mut trace = dynamics::error_trace(trace, &z_e)?;
    let decay = if trace.classification == Some(Classification::Converged) {
        let fit = dynamics::fit_decay_rate(&trace)?;
        trace.decay_rate = Some(fit.rate);
        Some(fit)
    } else {
        None
    };

    output::emit(
        out_dir,
        &format!("{}_trace.csv", cfg.name),
        output::trace_csv(&trace, cfg.dimension).as_bytes(),
        manifest,
    )?;
    let meta = TraceMetadata {
        scenario: cfg.name.clone(),
        seed: sim.seed,
        method: sim.method,
        dt: sim.dt,
        t_end: sim.t_end,
        classification: trace.classification.expect("completed trace"),
        decay_rate: decay.map(|f| f.rate),
        r_squared: decay.map(|f| f.r_squared),
        initial_error: trace.errors[0],
        final_error: *trace.errors.last().unwrap(),
    };
    output::emit(
        out_dir,
        &format!("{}_trace_meta.json", cfg.name),
        {
            let mut body = serde_json::to_string_pretty(&meta)?;
            body.push('\n');
            body
        }
        .as_bytes(),
        manifest,
    )?;
    Ok((trace, decay))
}

/// Leaders start on their equilibrium coordinates; followers draw uniformly
/// from [-5, 5] per coordinate, in agent order, from the scenario seed.
fn initial_state(cfg: &ScenarioConfig, z_e: &DVector<f64>, seed: u64) -> DVector<f64> {
    let n = cfg.graph.vertices;
    let d = cfg.dimension;
    let leaders = cfg.leaders0();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z0 = DVector::zeros(n * d);
    for agent in 0..n {
        for k in 0..d {
            let idx = agent * d + k;
            z0[idx] = if leaders.contains(&agent) {
                z_e[idx]
            } else {
                rng.random_range(-5.0..5.0)
            };
        }
    }
    z0
}

/// The scenarios shipped with the crate, embedded so `reproduce all` works
/// from any working directory. The JSON files under `configs/` are the
/// source of truth.
pub fn shipped_scenarios() -> Vec<(&'static str, &'static str)> {
    macro_rules! shipped {
        ($($file:literal),+ $(,)?) => {
            vec![$(($file, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/", $file)))),+]
        };
    }
    shipped![
        "homogeneous_proper_sweep.json",
        "homogeneous_improper_sweep.json",
        "heterogeneous_sweep.json",
        "mixed_improper_check.json",
        "rendezvous_sim_unambiguous.json",
        "rendezvous_sim_proper_60deg.json",
        "rendezvous_sim_boundary.json",
        "rendezvous_sim_improper.json",
        "rendezvous_sim_hetero_inrange.json",
        "rendezvous_sim_hetero_beyond.json",
        "rendezvous_sim_mixed_improper.json",
        "formation_sim_unambiguous.json",
        "formation_sim_hetero_inrange.json",
        "formation_sim_improper_follower.json",
    ]
}

/// Runs every shipped scenario into `out_dir`; the data behind all the
/// margin curves, heatmaps and error traces.
pub fn reproduce_all(out_dir: &Path) -> Result<Vec<ExperimentResult>> {
    let mut results = Vec::new();
    for (file, text) in shipped_scenarios() {
        let cfg = ScenarioConfig::from_json(text)
            .map_err(|e| Error::InvalidConfig(format!("{file}: {e}")))?;
        results.push(run_experiment(&cfg, out_dir)?);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendezvous_defaults_validate_and_stabilize() {
        let cfg = rendezvous_scenario();
        cfg.validate().unwrap();
        let l = cfg.laplacian().unwrap();
        let amb = cfg.ambiguity_set().unwrap();
        let report = stability::stability_check(&l, &amb, DEFAULT_TOL).unwrap();
        assert_eq!(report.verdict, stability::Verdict::Stable);
        // Standard Laplacian of a connected 4-node graph: corank 1.
        let split = crate::spectral::split_range_nullspace(&l, DEFAULT_TOL).unwrap();
        assert_eq!(split.rank, 3);
    }

    #[test]
    fn config_round_trips_through_json() {
        for cfg in [rendezvous_scenario(), formation_scenario()] {
            let text = cfg.to_json();
            let parsed = ScenarioConfig::from_json(&text).unwrap();
            assert_eq!(cfg, parsed);
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = rendezvous_scenario();
        cfg.leaders = vec![5];
        assert!(cfg.validate().is_err());

        let mut cfg = rendezvous_scenario();
        cfg.equilibrium = Some(vec![0.0; 3]);
        assert!(cfg.validate().is_err());

        let mut cfg = rendezvous_scenario();
        cfg.ambiguity.entries.push(cfg.ambiguity.entries[0]);
        assert!(cfg.validate().is_err());

        let mut cfg = rendezvous_scenario();
        cfg.ambiguity.mode = AmbiguityMode::Heterogeneous;
        assert!(cfg.validate().is_err(), "entries lack agent ids");
    }

    #[test]
    fn degree_entries_convert() {
        let mut cfg = rendezvous_scenario();
        cfg.ambiguity.entries[0].theta = 60.0;
        cfg.ambiguity.entries[0].unit = AngleUnit::Deg;
        let set = cfg.ambiguity_set().unwrap();
        let expected = std::f64::consts::FRAC_PI_3;
        assert!((set.agents()[0].theta() - expected).abs() < 1e-12);
    }

    #[test]
    fn experiment_runs_are_deterministic() {
        let mut cfg = rendezvous_scenario();
        cfg.simulation = Some(SimulationSpec {
            dt: 0.05,
            t_end: 5.0,
            seed: 11,
            method: MethodSpec::ExactExp,
        });
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_experiment(&cfg, dir_a.path()).unwrap();
        run_experiment(&cfg, dir_b.path()).unwrap();
        for entry in std::fs::read_dir(dir_a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let a = std::fs::read(dir_a.path().join(&name)).unwrap();
            let b = std::fs::read(dir_b.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name:?} differs between identical runs");
        }
    }

    #[test]
    fn shipped_scenarios_parse_and_validate() {
        for (file, text) in shipped_scenarios() {
            let cfg = ScenarioConfig::from_json(text)
                .unwrap_or_else(|e| panic!("{file} failed to parse: {e}"));
            assert!(!cfg.name.is_empty());
        }
    }
}
