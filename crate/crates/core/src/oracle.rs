//! Independent checks: fixed-step RK4 integration of the master equation,
//! the generator evaluated by plain matrix products, and sampled unitary
//! work extraction.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ergotropy::energy;
use crate::error::{Error, Result};
use crate::linalg::{norm2, spectral_norm, ComplexMatrix, C64, I};
use crate::liouvillian::{devectorize, vectorize, JumpTermSet, Superoperator};
use crate::model::{hamiltonian, SystemConfig};
use crate::steadystate::{nearest_density, trace_distance, DensityMatrix};

/// Largest `|Δ tr ρ|` one step may introduce.
pub const STEP_DRIFT_TOL: f64 = 1e-12;
/// Largest accumulated `|tr ρ − 1|` before the run is rejected.
pub const TOTAL_DRIFT_TOL: f64 = 1e-8;
/// Expected bound on negative eigenvalues at checkpoints of a dissipative run.
pub const POSITIVITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationSpec {
    pub dt: f64,
    pub t_max: f64,
    /// Trace distance between consecutive checkpoints that counts as converged.
    pub convergence_eps: f64,
    pub checkpoint_interval: f64,
}

impl IntegrationSpec {
    /// `dt = 0.01 / max(γ·max(1, max n_i), ‖H‖₂)` with a long horizon.
    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        let n_max = cfg
            .reservoirs
            .entries
            .iter()
            .map(|r| r.occupation(cfg.omega))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(1.0f64, f64::max);
        let h_norm = spectral_norm(&hamiltonian(cfg)?)?;
        let scale = (cfg.gamma * n_max).max(h_norm);
        let dt = if scale > 0.0 { 0.01 / scale } else { 0.01 };
        Ok(Self { dt, t_max: 1e5, convergence_eps: 1e-11, checkpoint_interval: 10.0 })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.t_max > self.dt
            && self.convergence_eps > 0.0
            && self.checkpoint_interval >= self.dt
            && [self.dt, self.t_max, self.convergence_eps, self.checkpoint_interval].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad integration spec {self:?}")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub state: DensityMatrix,
    pub converged: bool,
    pub t_reached: f64,
    /// `|tr ρ − 1|` before the final renormalization.
    pub trace_drift: f64,
    /// Smallest eigenvalue seen at any checkpoint. Negative weight left in
    /// the final state is clipped (see `DensityMatrix::clipped`).
    pub min_eigenvalue: f64,
    pub checkpoints: usize,
}

/// One RK4 step of `v' = L v` as a matrix:
/// `P = I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`.
pub fn rk4_propagator(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let n = l.rows();
    let hl = l.scale_real(h);
    let id = ComplexMatrix::identity(n);
    // Horner: I + hL(I + hL/2(I + hL/3(I + hL/4)))
    let mut acc = id.clone();
    for k in [4.0, 3.0, 2.0, 1.0] {
        acc = &id + &hl.matmul(&acc).scale_real(1.0 / k);
    }
    acc
}

fn matrix_power(p: &ComplexMatrix, mut k: usize) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(p.rows());
    let mut base = p.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.matmul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.matmul(&base);
        }
    }
    result
}

/// Integrates `vec(ρ)' = L vec(ρ)` with fixed RK4 steps until consecutive
/// checkpoints agree to `convergence_eps` or `t_max` is reached.
///
/// The step is shortened so that a whole number of steps fits in one
/// checkpoint interval; the checkpoint-to-checkpoint map is the RK4 step
/// matrix raised to that number. Running out of time is reported through
/// `converged = false`, not as an error.
pub fn evolve(rho0: &DensityMatrix, l: &Superoperator, spec: &IntegrationSpec) -> Result<Evolution> {
    spec.validate()?;
    let d = l.dim_hilbert;
    if rho0.dim() != d {
        return Err(Error::ShapeMismatch {
            op: "evolve",
            detail: format!("state dimension {} vs generator {}", rho0.dim(), d),
        });
    }
    let steps = (spec.checkpoint_interval / spec.dt).ceil().max(1.0) as usize;
    let interval = spec.checkpoint_interval;
    let p = rk4_propagator(&l.matrix, interval / steps as f64);

    // the trace functional must be invariant under one step
    let tr: Vec<usize> = (0..d).map(|k| k * (d + 1)).collect();
    let step_drift = (0..p.cols())
        .map(|j| {
            let col: C64 = tr.iter().map(|&i| p[(i, j)]).sum();
            let expect = if tr.contains(&j) { 1.0 } else { 0.0 };
            (col - expect).norm()
        })
        .sum::<f64>();
    if step_drift > STEP_DRIFT_TOL {
        return Err(Error::TraceDrift { drift: step_drift });
    }
    let q = matrix_power(&p, steps);

    let mut v = vectorize(rho0.matrix())?;
    let mut next = vec![C64::new(0.0, 0.0); v.len()];
    let mut t = 0.0;
    let mut checkpoints = 0;
    let mut min_eig = rho0.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
    let mut current = rho0.matrix().clone();
    let mut converged = false;
    while t < spec.t_max {
        q.matvec_into(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        t += interval;
        checkpoints += 1;
        let m = devectorize(&v, d)?;
        let drift = (m.trace().re - 1.0).abs();
        if drift > TOTAL_DRIFT_TOL || !m.is_finite() {
            return Err(Error::TraceDrift { drift });
        }
        let herm = m.hermitian_part();
        let lowest = crate::linalg::eigvals_hermitian(&herm)?[0];
        min_eig = min_eig.min(lowest);
        let dist = trace_distance(&herm, &current)?;
        current = herm;
        if dist < spec.convergence_eps {
            converged = true;
            break;
        }
    }
    let trace = current.trace().re;
    let state = nearest_density(&current)?;
    Ok(Evolution { state, converged, t_reached: t, trace_drift: (trace - 1.0).abs(), min_eigenvalue: min_eig, checkpoints })
}

/// `−i[H, ρ] + Σ r (L ρ R† − ½{R†L, ρ})` by plain matrix products.
pub fn direct_lindblad_action(rho: &ComplexMatrix, h: &ComplexMatrix, terms: &JumpTermSet) -> ComplexMatrix {
    let mut out = h.commutator(rho).scale(-I);
    for t in terms.iter() {
        let rdag = t.right.adjoint();
        let jump = t.left.matmul(rho).matmul(&rdag);
        let anti = rdag.matmul(&t.left).anticommutator(rho).scale_real(0.5);
        out = &out + &(&jump - &anti).scale_real(t.rate);
    }
    out
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Uniformly distributed pure state of dimension `d`.
pub fn random_pure_state(d: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let mut psi: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = norm2(&psi);
    psi.iter_mut().for_each(|z| *z /= norm);
    DensityMatrix::pure(&psi)
}

/// Haar-random unitary. Qubits use the Euler-angle form with `sin²θ`
/// uniform; larger dimensions orthonormalize a complex Gaussian matrix.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    use std::f64::consts::TAU;
    if d == 2 {
        let alpha = rng.random_range(0.0..TAU);
        let psi = rng.random_range(0.0..TAU);
        let chi = rng.random_range(0.0..TAU);
        let s: f64 = rng.random_range(0.0..1.0f64).sqrt();
        let c = (1.0 - s * s).sqrt();
        let g = C64::from_polar(1.0, alpha);
        let a = C64::from_polar(c, psi);
        let b = C64::from_polar(s, chi);
        return ComplexMatrix::new(2, 2, vec![g * a, g * b, -g * b.conj(), g * a.conj()])
            .expect("2x2 literal");
    }
    // Gram-Schmidt on Gaussian columns leaves R with a positive diagonal,
    // which is exactly the phase fix that makes Q Haar distributed.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
        }
        let n = norm2(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `max_U tr(ρh) − tr(UρU†h)` over the given unitaries.
pub fn extraction_bound_over(rho: &DensityMatrix, h: &ComplexMatrix, unitaries: &[ComplexMatrix]) -> f64 {
    let e0 = energy(rho.matrix(), h);
    unitaries
        .iter()
        .map(|u| e0 - energy(&u.matmul(rho.matrix()).matmul(&u.adjoint()), h))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Best work extracted by `samples` Haar-random unitaries.
pub fn random_unitary_extraction_bound(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let e0 = energy(rho.matrix(), h);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u = haar_unitary(rho.dim(), rng);
        best = best.max(e0 - energy(&u.matmul(rho.matrix()).matmul(&u.adjoint()), h));
    }
    Ok(best)
}
