//! Cross-check of the algebraic steady state against long-time integration
//! from random initial states.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ergotropy::{battery_state_on_manifold, reduce_to_battery};
use crate::error::Result;
use crate::liouvillian::Superoperator;
use crate::model::SystemConfig;
use crate::oracle::{evolve, random_pure_state, IntegrationSpec};
use crate::steadystate::{stationary_manifold, steady_state, trace_distance, DensityMatrix, SteadyStateOptions};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Number of random pure initial states handed to the integrator.
    pub initial_states: usize,
    pub seed: u64,
    /// Integration settings; derived from the config when `None`.
    pub integration: Option<IntegrationSpec>,
    /// Largest accepted trace distance between the two methods.
    pub tolerance: f64,
    pub steady: SteadyStateOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { initial_states: 5, seed: 0, integration: None, tolerance: 1e-5, steady: SteadyStateOptions::default() }
    }
}

/// What the oracle states were compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// The unique steady state of the whole network.
    FullState,
    /// The battery state shared by every steady state of a degenerate
    /// generator.
    BatteryState,
    /// Nothing to compare: the solver found no well-defined reference.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub converged: bool,
    pub t_reached: f64,
    pub trace_drift: f64,
    pub min_eigenvalue: f64,
    /// Trace distance to the solver reference, when there is one.
    pub distance: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// `kind: message` of the solver failure, if any.
    pub solver_error: Option<String>,
    pub unique: bool,
    pub kernel_dim: usize,
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_next: f64,
    pub runs: Vec<OracleRun>,
    /// Largest trace distance between final oracle states from different
    /// initial states (full network).
    pub initial_state_spread: f64,
    pub comparison: Comparison,
    pub max_distance: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
}

pub fn verify(cfg: &SystemConfig, opts: &VerifyOptions) -> Result<VerifyReport> {
    cfg.validate()?;
    let l = Superoperator::build(cfg)?;
    let n = cfg.n_qubits;

    let mut solver_error = None;
    let (reference, comparison, unique, kernel_dim, residual, sigma_min, sigma_next) =
        match steady_state(&l, &opts.steady) {
            Ok(r) => (
                Some(r.state.into_matrix()),
                Comparison::FullState,
                true,
                1,
                r.residual,
                r.null_gap.sigma_min,
                r.null_gap.sigma_next,
            ),
            Err(e) => {
                solver_error = Some(format!("{}: {e}", e.kind()));
                match stationary_manifold(&l, &opts.steady) {
                    Ok(m) => {
                        let battery = battery_state_on_manifold(&m, n).ok();
                        let cmp = if battery.is_some() { Comparison::BatteryState } else { Comparison::None };
                        let (s_min, s_next) = (m.null_gap.sigma_min, m.null_gap.sigma_next);
                        (battery.map(|b| b.0.into_matrix()), cmp, false, m.kernel_dim, m.residual, s_min, s_next)
                    }
                    Err(_) => (None, Comparison::None, false, 0, f64::NAN, f64::NAN, f64::NAN),
                }
            }
        };

    let spec = match opts.integration {
        Some(s) => s,
        None => IntegrationSpec::for_config(cfg)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut runs = Vec::with_capacity(opts.initial_states);
    let mut finals: Vec<DensityMatrix> = Vec::new();
    for _ in 0..opts.initial_states {
        let rho0 = random_pure_state(cfg.hilbert_dim(), &mut rng)?;
        let out = evolve(&rho0, &l, &spec)?;
        let distance = match (&reference, comparison) {
            (Some(r), Comparison::FullState) => Some(trace_distance(out.state.matrix(), r)?),
            (Some(r), Comparison::BatteryState) => {
                Some(trace_distance(&reduce_to_battery(out.state.matrix(), n)?, r)?)
            }
            _ => None,
        };
        runs.push(OracleRun {
            converged: out.converged,
            t_reached: out.t_reached,
            trace_drift: out.trace_drift,
            min_eigenvalue: out.min_eigenvalue,
            distance,
        });
        finals.push(out.state);
    }
    let mut spread: f64 = 0.0;
    for (i, a) in finals.iter().enumerate() {
        for b in &finals[i + 1..] {
            spread = spread.max(trace_distance(a.matrix(), b.matrix())?);
        }
    }
    let max_distance = runs.iter().filter_map(|r| r.distance).reduce(f64::max);
    let all_converged = runs.iter().all(|r| r.converged);
    let verdict = match max_distance {
        Some(d) if d > opts.tolerance => Verdict::Mismatch,
        Some(_) if all_converged => Verdict::Match,
        _ => Verdict::Inconclusive,
    };
    Ok(VerifyReport {
        solver_error,
        unique,
        kernel_dim,
        residual,
        sigma_min,
        sigma_next,
        runs,
        initial_state_spread: spread,
        comparison,
        max_distance,
        tolerance: opts.tolerance,
        verdict,
    })
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.solver_error {
            Some(e) => writeln!(f, "solver: {e}")?,
            None => writeln!(f, "solver: ok")?,
        }
        writeln!(f, "unique = {}", self.unique)?;
        writeln!(f, "kernel_dim = {}", self.kernel_dim)?;
        writeln!(f, "residual = {:e}", self.residual)?;
        writeln!(f, "sigma_min = {:e}", self.sigma_min)?;
        writeln!(f, "sigma_next = {:e}", self.sigma_next)?;
        for (i, r) in self.runs.iter().enumerate() {
            let d = r.distance.map_or("n/a".to_string(), |d| format!("{d:e}"));
            writeln!(
                f,
                "oracle[{i}]: converged = {}, t = {}, trace_drift = {:e}, min_eig = {:e}, distance = {d}",
                r.converged, r.t_reached, r.trace_drift, r.min_eigenvalue
            )?;
        }
        if self.runs.iter().any(|r| !r.converged) {
            writeln!(f, "oracle: not all initial states converged")?;
        }
        writeln!(f, "initial_state_spread = {:e}", self.initial_state_spread)?;
        let cmp = match self.comparison {
            Comparison::FullState => "full_state",
            Comparison::BatteryState => "battery_state",
            Comparison::None => "none",
        };
        writeln!(f, "comparison = {cmp}")?;
        match self.max_distance {
            Some(d) => writeln!(f, "max_trace_distance = {d:e} (tolerance {:e})", self.tolerance)?,
            None => writeln!(f, "max_trace_distance = n/a")?,
        }
        write!(f, "verdict = {:?}", self.verdict)
    }
}
