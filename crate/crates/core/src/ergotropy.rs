//! Battery reduction, passive states and ergotropy.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, C64};
use crate::model::{battery_hamiltonian, SystemConfig};
use crate::steadystate::{validate_density, DensityMatrix, StationaryManifold};

/// Largest spread of the battery state over a stationary manifold that still
/// counts as "the same state".
pub const MANIFOLD_SPREAD_TOL: f64 = 1e-8;

/// Trace over every qubit except the battery (the leftmost factor):
/// `(ρ_B)_{ab} = Σ_k ρ_{a·2^{N−1}+k, b·2^{N−1}+k}`.
///
/// Linear, so it also applies to non-physical operators.
pub fn reduce_to_battery(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if n == 0 || !m.is_square() || m.rows() != 1 << n {
        return Err(Error::ShapeMismatch {
            op: "partial_trace_to_battery",
            detail: format!("{}x{} matrix for {n} qubits", m.rows(), m.cols()),
        });
    }
    let rest = 1 << (n - 1);
    Ok(ComplexMatrix::from_fn(2, 2, |a, b| (0..rest).map(|k| m[(a * rest + k, b * rest + k)]).sum()))
}

pub fn partial_trace_to_battery(rho: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    validate_density(&reduce_to_battery(rho.matrix(), n)?)
}

/// The passive state of `rho` with respect to `h`: eigenvalues of `rho`
/// sorted descending, placed on the eigenvectors of `h` sorted by ascending
/// energy.
pub fn passive_state(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<DensityMatrix> {
    if h.rows() != rho.dim() || !h.is_square() {
        return Err(Error::ShapeMismatch {
            op: "passive_state",
            detail: format!("state dimension {} vs Hamiltonian {}x{}", rho.dim(), h.rows(), h.cols()),
        });
    }
    let mut populations = rho.eigenvalues()?;
    populations.sort_by(|a, b| b.total_cmp(a));
    let levels = eig_hermitian(h)?;
    let d = rho.dim();
    let v = &levels.vectors;
    let sigma = ComplexMatrix::from_fn(d, d, |i, j| {
        (0..d).map(|k| v[(i, k)] * populations[k] * v[(j, k)].conj()).sum()
    });
    validate_density(&sigma.hermitian_part())
}

/// `tr(ρ h)` for Hermitian `h`, real part.
pub fn energy(rho: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let d = rho.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rho[(i, j)] * h[(j, i)];
        }
    }
    acc.re
}

/// Raw ergotropy of a state with respect to a Hamiltonian.
#[derive(Clone, Debug)]
pub struct Ergotropy {
    pub state: DensityMatrix,
    pub passive_state: DensityMatrix,
    pub energy: f64,
    pub passive_energy: f64,
    /// `energy − passive_energy`.
    pub ergotropy: f64,
}

pub fn ergotropy(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<Ergotropy> {
    let passive = passive_state(rho, h)?;
    let e = energy(rho.matrix(), h);
    let pe = energy(passive.matrix(), h);
    Ok(Ergotropy { state: rho.clone(), passive_state: passive, energy: e, passive_energy: pe, ergotropy: e - pe })
}

/// Ergotropy of the fully charged battery, `2|ω₀|`.
pub fn max_ergotropy(cfg: &SystemConfig) -> Result<f64> {
    let e_max = 2.0 * cfg.omega0.abs();
    if e_max > 0.0 {
        Ok(e_max)
    } else {
        Err(Error::UndefinedNormalization)
    }
}

/// `W = E / E_max`.
pub fn normalized_ergotropy(result: &Ergotropy, cfg: &SystemConfig) -> Result<f64> {
    let w = result.ergotropy / max_ergotropy(cfg)?;
    // absorb rounding at the ends of [0, 1]
    Ok(if (-1e-12..0.0).contains(&w) {
        0.0
    } else if w > 1.0 && w <= 1.0 + 1e-12 {
        1.0
    } else {
        w
    })
}

/// Everything reported about the battery qubit of a network state.
#[derive(Clone, Debug)]
pub struct ErgotropyResult {
    pub rho_battery: DensityMatrix,
    pub passive_state: DensityMatrix,
    pub energy: f64,
    pub passive_energy: f64,
    pub ergotropy: f64,
    pub e_max: f64,
    pub normalized: f64,
}

/// Battery ergotropy of a reduced battery state.
pub fn battery_ergotropy(rho_battery: &DensityMatrix, cfg: &SystemConfig) -> Result<ErgotropyResult> {
    let h = battery_hamiltonian(cfg);
    let raw = ergotropy(rho_battery, &h)?;
    let normalized = normalized_ergotropy(&raw, cfg)?;
    Ok(ErgotropyResult {
        rho_battery: raw.state,
        passive_state: raw.passive_state,
        energy: raw.energy,
        passive_energy: raw.passive_energy,
        ergotropy: raw.ergotropy,
        e_max: max_ergotropy(cfg)?,
        normalized,
    })
}

/// Reduces a network state to the battery and evaluates its ergotropy.
pub fn evaluate_battery(state: &DensityMatrix, cfg: &SystemConfig) -> Result<ErgotropyResult> {
    battery_ergotropy(&partial_trace_to_battery(state, cfg.n_qubits)?, cfg)
}

/// Battery state shared by every steady state of a degenerate generator.
///
/// Fails with [`Error::AmbiguousBatteryState`] when different steady states
/// leave the battery in different states.
pub fn battery_state_on_manifold(manifold: &StationaryManifold, n: usize) -> Result<(DensityMatrix, f64)> {
    let (image, spread) = manifold.common_image(|g| reduce_to_battery(g, n))?;
    if spread > MANIFOLD_SPREAD_TOL {
        return Err(Error::AmbiguousBatteryState { spread });
    }
    let rho = image.hermitian_part();
    let t = rho.trace().re;
    Ok((validate_density(&rho.scale_real(1.0 / t))?, spread))
}
