//! Time-domain integration of the ambiguous consensus dynamics with leader
//! pinning.
//!
//! Leaders hold their initial state for the whole trace, modeled by zeroing
//! their block-rows of the system matrix; follower rows are untouched. The
//! default integrator advances by the matrix exponential of one step, which
//! is exact for this LTI system up to roundoff; classical RK4 is kept for
//! cross-validation.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ambiguity::AmbiguitySet;
use crate::error::{Error, Result};
use crate::spectral;

/// State norms beyond this are treated as numerical blow-up and abort the
/// integration.
const DIVERGENCE_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegrationMethod {
    ExactExp,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Converged,
    Diverged,
    Undetermined,
}

/// The pinned system matrix: the negated ambiguous consensus matrix with the
/// leader block-rows zeroed so pinned agents have no dynamics.
#[derive(Debug, Clone)]
pub struct PinnedSystem {
    matrix: DMatrix<f64>,
    leaders: BTreeSet<usize>,
    dim: usize,
}

impl PinnedSystem {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn leaders(&self) -> &BTreeSet<usize> {
        &self.leaders
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_len(&self) -> usize {
        self.matrix.nrows()
    }

    fn leader_coords(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaders
            .iter()
            .flat_map(move |&agent| (0..self.dim).map(move |k| agent * self.dim + k))
    }
}

/// Builds the pinned system `-H L~` with the block-rows of every leader
/// zeroed. A leader's own ambiguity block is irrelevant: its row is removed
/// from the dynamics entirely.
pub fn pin_leaders(
    l: &DMatrix<f64>,
    amb: &AmbiguitySet,
    leaders: &BTreeSet<usize>,
) -> Result<PinnedSystem> {
    let n = l.nrows();
    let d = amb.dim();
    if amb.agent_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: amb.agent_count(),
            context: "ambiguity agents vs. Laplacian order",
        });
    }
    if leaders.is_empty() {
        return Err(Error::NoLeaders);
    }
    if let Some(&bad) = leaders.iter().find(|&&a| a >= n) {
        return Err(Error::AgentOutOfRange {
            index: bad,
            agents: n,
        });
    }
    if leaders.len() == n {
        return Err(Error::DegenerateSystem);
    }
    let lifted = l.kronecker(&DMatrix::identity(d, d));
    let mut matrix = -(amb.matrix() * lifted);
    for &agent in leaders {
        for k in 0..d {
            matrix.row_mut(agent * d + k).fill(0.0);
        }
    }
    Ok(PinnedSystem {
        matrix,
        leaders: leaders.clone(),
        dim: d,
    })
}

/// Time grid, stacked states and (once completed) the error trace with its
/// convergence classification.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub errors: Vec<f64>,
    pub decay_rate: Option<f64>,
    pub classification: Option<Classification>,
}

impl SimulationTrace {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trace has at least one sample")
    }
}

/// Integrates the pinned system from `z0` on the grid `k * dt`, k = 0..steps.
/// Leader coordinates are copied from `z0` after every step, so they stay
/// bit-exact. A non-finite or guard-exceeding state truncates the trace and
/// flags it `Diverged`.
pub fn integrate(
    sys: &PinnedSystem,
    z0: &DVector<f64>,
    dt: f64,
    t_end: f64,
    method: IntegrationMethod,
) -> Result<SimulationTrace> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidIntegration(format!("dt = {dt}")));
    }
    if !(t_end >= dt) || !t_end.is_finite() {
        return Err(Error::InvalidIntegration(format!(
            "t_end = {t_end} must be at least dt = {dt}"
        )));
    }
    if z0.len() != sys.state_len() {
        return Err(Error::DimensionMismatch {
            expected: sys.state_len(),
            got: z0.len(),
            context: "initial state length",
        });
    }
    if !z0.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite);
    }

    let steps = ((t_end + dt * 1e-9) / dt).floor() as usize;
    let propagator = match method {
        IntegrationMethod::ExactExp => Some(spectral::matrix_exponential(&(sys.matrix() * dt))),
        IntegrationMethod::Rk4 => None,
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(z0.clone());
    let mut z = z0.clone();
    let mut classification = None;

    for k in 1..=steps {
        z = match &propagator {
            Some(phi) => phi * &z,
            None => rk4_step(sys.matrix(), &z, dt),
        };
        for c in sys.leader_coords() {
            z[c] = z0[c];
        }
        let finite = z.iter().all(|x| x.is_finite());
        if !finite {
            classification = Some(Classification::Diverged);
            break;
        }
        times.push(k as f64 * dt);
        states.push(z.clone());
        if z.norm() > DIVERGENCE_GUARD {
            classification = Some(Classification::Diverged);
            break;
        }
    }

    Ok(SimulationTrace {
        times,
        states,
        errors: Vec::new(),
        decay_rate: None,
        classification,
    })
}

fn rk4_step(a: &DMatrix<f64>, z: &DVector<f64>, dt: f64) -> DVector<f64> {
    let k1 = a * z;
    let k2 = a * (z + &k1 * (dt / 2.0));
    let k3 = a * (z + &k2 * (dt / 2.0));
    let k4 = a * (z + &k3 * dt);
    z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Fills in the error trace `|z(t) - z_e|` and classifies convergence:
/// converged when the final error is below `1e-6 * max(1, initial)` and the
/// last tenth of the trace never increases; diverged when the error grew
/// tenfold (or the integration already blew up); undetermined otherwise.
pub fn error_trace(mut trace: SimulationTrace, z_e: &DVector<f64>) -> Result<SimulationTrace> {
    let state_len = trace
        .states
        .first()
        .map(|s| s.len())
        .ok_or_else(|| Error::InvalidIntegration("empty trace".into()))?;
    if z_e.len() != state_len {
        return Err(Error::DimensionMismatch {
            expected: state_len,
            got: z_e.len(),
            context: "equilibrium length vs. state length",
        });
    }
    trace.errors = trace.states.iter().map(|z| (z - z_e).norm()).collect();

    if trace.classification != Some(Classification::Diverged) {
        let first = trace.errors[0];
        let last = *trace.errors.last().unwrap();
        let window = trace.errors.len().div_ceil(10).max(2).min(trace.errors.len());
        let tail = &trace.errors[trace.errors.len() - window..];
        let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
        trace.classification = Some(if last < 1e-6 * first.max(1.0) && monotone {
            Classification::Converged
        } else if last > 10.0 * first || !last.is_finite() {
            Classification::Diverged
        } else {
            Classification::Undetermined
        });
    }
    Ok(trace)
}

/// Least-squares exponential decay fit over the middle 60% of a converged
/// trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    /// Decay rate per second (positive for decaying errors).
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
}

/// Fits `log(error)` against time on the middle 60% of the trace. For an
/// unambiguous pinned system the rate lands near the slowest mode of the
/// system matrix; that is a cross-check, not a theorem.
pub fn fit_decay_rate(trace: &SimulationTrace) -> Result<DecayFit> {
    if trace.classification != Some(Classification::Converged) {
        return Err(Error::FitRequiresConverged);
    }
    let len = trace.errors.len();
    let start = len / 5;
    let end = (len * 4).div_ceil(5);
    let window: Vec<(f64, f64)> = (start..end)
        .map(|k| (trace.times[k], trace.errors[k]))
        .collect();
    if window.iter().any(|&(_, e)| e <= 0.0) {
        return Err(Error::FitNonPositiveError);
    }
    let m = window.len() as f64;
    let mean_t = window.iter().map(|&(t, _)| t).sum::<f64>() / m;
    let mean_log = window.iter().map(|&(_, e)| e.ln()).sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(t, e) in &window {
        let dt = t - mean_t;
        let dl = e.ln() - mean_log;
        sxx += dt * dt;
        sxy += dt * dl;
        syy += dl * dl;
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
    })
}
