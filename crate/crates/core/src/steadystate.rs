//! Steady states of the generator and physical-state validation.
//!
//! The default solver replaces the first row of `L` (the `(0,0)` population
//! row) with the trace functional and solves `L' x = e₀` by LU. `L'` is
//! nonsingular exactly when the kernel of `L` is one-dimensional, so its
//! smallest singular value doubles as the uniqueness certificate. The SVD
//! null space is used as a cross-check on small systems and as the fallback.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, norm2, singular_values, svd, ComplexMatrix, LuSolver, NullGap, C64};
use crate::liouvillian::{devectorize, Superoperator};

/// Allowed relative anti-Hermitian part of a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Negative eigenvalues down to this value are clipped to zero.
pub const CLIP_TOL: f64 = 1e-8;
/// Below this minimum eigenvalue a computed steady state is rejected.
pub const UNPHYSICAL_TOL: f64 = 1e-6;

/// A validated state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    clipped: f64,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Total weight of the negative eigenvalues removed during validation.
    pub fn clipped(&self) -> f64 {
        self.clipped
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = norm2(psi);
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        validate_density(&ComplexMatrix::outer(&unit, &unit).hermitian_part())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64), clipped: 0.0 }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        crate::linalg::eigvals_hermitian(&self.matrix)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

enum ClipOutcome {
    Accepted(ComplexMatrix, f64),
    Negative(f64),
}

/// Clips eigenvalues in `[−tol, 0)` of a Hermitian, unit-trace matrix.
fn clip_negative(h: ComplexMatrix, tol: f64) -> Result<ClipOutcome> {
    let eig = eig_hermitian(&h)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min >= 0.0 {
        return Ok(ClipOutcome::Accepted(h, 0.0));
    }
    if min < -tol {
        return Ok(ClipOutcome::Negative(min));
    }
    let clipped: f64 = eig.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let kept: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = kept.iter().sum();
    let n = kept.len();
    let v = &eig.vectors;
    let repaired = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[(i, k)] * (kept[k] / total) * v[(j, k)].conj()).sum()
    });
    Ok(ClipOutcome::Accepted(repaired.hermitian_part(), clipped))
}

/// Checks the density-matrix invariants, repairing tolerance-level negative
/// eigenvalues.
pub fn validate_density(rho: &ComplexMatrix) -> Result<DensityMatrix> {
    if !rho.is_square() {
        return Err(Error::InvalidDensity(format!("not square: {}x{}", rho.rows(), rho.cols())));
    }
    if !rho.is_finite() {
        return Err(Error::InvalidDensity("non-finite entries".into()));
    }
    let dev = rho.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::InvalidDensity(format!("not Hermitian (relative deviation {dev:.3e})")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace {} differs from 1", tr.re)));
    }
    match clip_negative(rho.hermitian_part(), CLIP_TOL)? {
        ClipOutcome::Accepted(matrix, clipped) => Ok(DensityMatrix { matrix, clipped }),
        ClipOutcome::Negative(min) => Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}"))),
    }
}

/// Closest density matrix in the sense of clipping every negative
/// eigenvalue, after Hermitizing and normalizing the trace; the clipped
/// weight is recorded.
pub fn nearest_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    if !m.is_square() || !m.is_finite() {
        return Err(Error::InvalidDensity("not a finite square matrix".into()));
    }
    let h = m.hermitian_part();
    let t = h.trace().re;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidDensity(format!("trace {t} is not positive")));
    }
    match clip_negative(h.scale_real(1.0 / t), f64::INFINITY)? {
        ClipOutcome::Accepted(matrix, clipped) => Ok(DensityMatrix { matrix, clipped }),
        ClipOutcome::Negative(min) => Err(Error::UnphysicalState { min_eigenvalue: min }),
    }
}

/// `½‖A − B‖₁` for Hermitian `A`, `B`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = (a - b).hermitian_part();
    let vals = crate::linalg::eigvals_hermitian(&diff)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyStateMethod {
    NullSpace,
    TraceRowReplacement,
}

#[derive(Clone, Copy, Debug)]
pub struct SteadyStateOptions {
    pub method: SteadyStateMethod,
    /// A singular value `σ ≤ kernel_rel_tol · σ_max` is a kernel direction.
    pub kernel_rel_tol: f64,
    /// Required `σ_next / σ_min` to call the steady state unique.
    pub min_gap_ratio: f64,
    /// Accepted `‖L vec(ρ)‖₂ / ‖L‖_F`.
    pub residual_tol: f64,
    /// The trace-row path also runs an exact SVD when the superoperator side
    /// is at most this.
    pub svd_verify_max_dim: usize,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            method: SteadyStateMethod::TraceRowReplacement,
            kernel_rel_tol: 1e-10,
            min_gap_ratio: 1e4,
            residual_tol: 1e-8,
            svd_verify_max_dim: 256,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SteadyStateReport {
    pub state: DensityMatrix,
    /// `‖L vec(ρ)‖₂` after normalization.
    pub residual: f64,
    pub null_gap: NullGap,
    /// False when `sigma_next` is the lower bound `σ_min(L')` rather than an
    /// exact singular value of `L`.
    pub gap_exact: bool,
    pub method: SteadyStateMethod,
    pub unique: bool,
}

impl SteadyStateOptions {
    fn is_degenerate(&self, gap: &NullGap) -> bool {
        let kernel = self.kernel_rel_tol * gap.sigma_max;
        gap.sigma_next <= kernel || gap.sigma_next < self.min_gap_ratio * gap.sigma_min
    }
}

/// Computes the unique steady state of `l`.
pub fn steady_state(l: &Superoperator, opts: &SteadyStateOptions) -> Result<SteadyStateReport> {
    match opts.method {
        SteadyStateMethod::NullSpace => null_space_steady_state(l, opts),
        SteadyStateMethod::TraceRowReplacement => match trace_row_steady_state(l, opts) {
            Err(Error::NoConvergence(_)) => null_space_steady_state(l, opts),
            other => other,
        },
    }
}

fn trace_row_steady_state(l: &Superoperator, opts: &SteadyStateOptions) -> Result<SteadyStateReport> {
    let d = l.dim_hilbert;
    let big = l.dim();
    let norm = l.matrix.frobenius_norm();
    let mut replaced = l.matrix.clone();
    for col in 0..big {
        replaced[(0, col)] = C64::new(0.0, 0.0);
    }
    for k in 0..d {
        replaced[(0, k * (d + 1))] = C64::new(1.0, 0.0);
    }
    let lu = LuSolver::new(&replaced)?;
    let sigma_replaced = lu.sigma_min_estimate(30);

    let mut rhs = vec![C64::new(0.0, 0.0); big];
    rhs[0] = C64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    let x_finite = x.iter().all(|z| z.is_finite());

    let exact = if big <= opts.svd_verify_max_dim { Some(singular_values(&l.matrix)?) } else { None };
    let (gap, gap_exact) = match &exact {
        Some(values) => (gap_of(values), true),
        None => {
            let unit_residual = if x_finite {
                let nx = norm2(&x);
                norm2(&l.matrix.matvec(&x)) / nx
            } else {
                0.0
            };
            // σ_min(L') ≤ σ_next(L) by interlacing, so it is a safe lower bound.
            (NullGap { sigma_min: unit_residual, sigma_next: sigma_replaced, sigma_max: norm }, false)
        }
    };
    if opts.is_degenerate(&gap) || sigma_replaced <= opts.kernel_rel_tol * norm {
        return Err(Error::DegenerateSteadyState { sigma_min: gap.sigma_min, sigma_next: gap.sigma_next });
    }
    if !x_finite {
        return Err(Error::NoConvergence("trace-row LU produced non-finite entries".into()));
    }
    finish(l, &x, gap, gap_exact, SteadyStateMethod::TraceRowReplacement, opts)
}

fn null_space_steady_state(l: &Superoperator, opts: &SteadyStateOptions) -> Result<SteadyStateReport> {
    let parts = svd(&l.matrix)?;
    let gap = gap_of(&parts.values);
    if gap.sigma_min > opts.kernel_rel_tol * gap.sigma_max {
        return Err(Error::NoConvergence(format!(
            "no kernel direction: sigma_min {:.3e}, sigma_max {:.3e}",
            gap.sigma_min, gap.sigma_max
        )));
    }
    if opts.is_degenerate(&gap) {
        return Err(Error::DegenerateSteadyState { sigma_min: gap.sigma_min, sigma_next: gap.sigma_next });
    }
    let v = parts.v.column(l.dim() - 1);
    finish(l, &v, gap, true, SteadyStateMethod::NullSpace, opts)
}

fn gap_of(values: &[f64]) -> NullGap {
    let n = values.len();
    NullGap {
        sigma_min: values[n - 1],
        sigma_next: if n > 1 { values[n - 2] } else { f64::INFINITY },
        sigma_max: values[0],
    }
}

/// Fixes the phase and trace of a raw kernel vector, Hermitizes and validates.
fn finish(
    l: &Superoperator,
    raw: &[C64],
    gap: NullGap,
    gap_exact: bool,
    method: SteadyStateMethod,
    opts: &SteadyStateOptions,
) -> Result<SteadyStateReport> {
    let x = devectorize(raw, l.dim_hilbert)?;
    let tr = x.trace();
    if tr.norm() <= 1e-14 * x.frobenius_norm() {
        return Err(Error::NoConvergence("kernel vector has vanishing trace".into()));
    }
    let mut rho = x.scale(tr.inv()).hermitian_part();
    let t = rho.trace().re;
    rho = rho.scale_real(1.0 / t);
    let (matrix, clipped) = match clip_negative(rho, UNPHYSICAL_TOL)? {
        ClipOutcome::Accepted(m, c) => (m, c),
        ClipOutcome::Negative(min_eigenvalue) => return Err(Error::UnphysicalState { min_eigenvalue }),
    };
    let residual = norm2(&l.matrix.matvec(&crate::liouvillian::vectorize(&matrix)?));
    if residual.is_nan() || residual > opts.residual_tol * l.matrix.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(format!("steady-state residual {residual:.3e} above tolerance")));
    }
    Ok(SteadyStateReport { state: DensityMatrix { matrix, clipped }, residual, null_gap: gap, gap_exact, method, unique: true })
}

/// The set of all steady states when the kernel is not one-dimensional,
/// represented by a Hermitian spanning set of the kernel.
#[derive(Clone, Debug)]
pub struct StationaryManifold {
    pub generators: Vec<ComplexMatrix>,
    pub kernel_dim: usize,
    pub null_gap: NullGap,
    /// Largest `‖L vec(G)‖₂ / ‖G‖_F` over the generators.
    pub residual: f64,
}

impl StationaryManifold {
    /// The generator with the largest trace, scaled to unit trace.
    fn reference(&self) -> Option<(usize, ComplexMatrix)> {
        let (idx, g) = self
            .generators
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.trace().re.abs().total_cmp(&b.1.trace().re.abs()))?;
        let t = g.trace().re;
        if t.abs() <= 1e-12 * g.frobenius_norm() {
            return None;
        }
        Some((idx, g.scale_real(1.0 / t)))
    }

    /// Applies a linear map (such as a partial trace) to every steady state
    /// and returns its common value with the largest deviation found. A
    /// deviation near zero means the quantity is the same for every steady
    /// state.
    pub fn common_image(&self, map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<(ComplexMatrix, f64)> {
        let (_, reference) =
            self.reference().ok_or_else(|| Error::NoConvergence("kernel contains no trace-carrying element".into()))?;
        let image = map(&reference)?;
        let mut spread: f64 = 0.0;
        for g in &self.generators {
            let t = g.trace().re;
            let dev = (&map(g)? - &image.scale_real(t)).frobenius_norm() / g.frobenius_norm();
            spread = spread.max(dev);
        }
        Ok((image, spread))
    }
}

pub fn stationary_manifold(l: &Superoperator, opts: &SteadyStateOptions) -> Result<StationaryManifold> {
    let (basis, null_gap) = crate::linalg::null_space_basis(&l.matrix, opts.kernel_rel_tol)?;
    let kernel_dim = basis.len();
    if kernel_dim == 0 {
        return Err(Error::NoConvergence("generator has no kernel".into()));
    }
    let mut generators = Vec::with_capacity(2 * kernel_dim);
    let mut residual: f64 = 0.0;
    for v in &basis {
        let x = devectorize(v, l.dim_hilbert)?;
        let xd = x.adjoint();
        let re = (&x + &xd).scale_real(0.5);
        let im = (&x - &xd).scale(C64::new(0.0, -0.5));
        for g in [re, im] {
            let n = g.frobenius_norm();
            if n > 1e-8 {
                let r = norm2(&l.matrix.matvec(&crate::liouvillian::vectorize(&g)?)) / n;
                residual = residual.max(r);
                generators.push(g);
            }
        }
    }
    Ok(StationaryManifold { generators, kernel_dim, null_gap, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::vectorize;
    use crate::model::{excitation_number, fermi_occupation, SystemConfig};

    fn solve(cfg: &SystemConfig) -> Result<SteadyStateReport> {
        steady_state(&Superoperator::build(cfg)?, &SteadyStateOptions::default())
    }

    #[test]
    fn validate_density_examples() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let ok = validate_density(&half).unwrap();
        assert_eq!(ok.matrix(), &half);
        assert_eq!(ok.clipped(), 0.0);

        let nearly = ComplexMatrix::from_real_diag(&[1.000_000_000_1, -1e-10]);
        let fixed = validate_density(&nearly).unwrap();
        assert!(fixed.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-15);
        assert!((fixed.clipped() - 1e-10).abs() < 1e-15);

        assert!(matches!(
            validate_density(&ComplexMatrix::from_real_diag(&[0.7, 0.4])),
            Err(Error::InvalidDensity(_))
        ));
        assert!(validate_density(&ComplexMatrix::from_real_diag(&[1.1, -0.1])).is_err());
        assert!(validate_density(&ComplexMatrix::from_real(2, 2, &[0.5, 0.3, 0.0, 0.5])).is_err());
    }

    #[test]
    fn single_qubit_detailed_balance() {
        for (mu, t) in [(3.0, 1.0), (-2.0, 0.4), (0.5, 7.0)] {
            for gamma in [0.3, 1.0, 4.0] {
                let cfg = SystemConfig::equilibrium(1, mu, t).with_gamma(gamma);
                let report = solve(&cfg).unwrap();
                let n = fermi_occupation(1.0, mu, t).unwrap();
                let want = ComplexMatrix::from_real_diag(&[n, 1.0 - n]);
                assert!(report.state.matrix().max_abs_diff(&want) < 1e-12);
                assert!(report.unique && report.gap_exact);
            }
        }
    }

    #[test]
    fn symmetric_rates_give_maximally_mixed_state() {
        let report = solve(&SystemConfig::equilibrium(1, 1.0, 2.0)).unwrap();
        assert!(report.state.matrix().max_abs_diff(&DensityMatrix::maximally_mixed(2).into_matrix()) < 1e-14);
    }

    #[test]
    fn no_dissipation_is_degenerate() {
        for n in 1..=3 {
            let cfg = SystemConfig::biased(n, 1.0, 1.0, 1.0).with_gamma(0.0);
            assert!(matches!(solve(&cfg), Err(Error::DegenerateSteadyState { .. })), "N={n}");
            let opts = SteadyStateOptions { method: SteadyStateMethod::NullSpace, ..Default::default() };
            let l = Superoperator::build(&cfg).unwrap();
            assert!(matches!(steady_state(&l, &opts), Err(Error::DegenerateSteadyState { .. })));
        }
    }

    #[test]
    fn collective_two_and_three_qubits_are_degenerate() {
        for n in [2, 3] {
            let cfg = SystemConfig::equilibrium(n, 3.0, 1.0);
            assert!(matches!(solve(&cfg), Err(Error::DegenerateSteadyState { .. })));
            let l = Superoperator::build(&cfg).unwrap();
            let manifold = stationary_manifold(&l, &SteadyStateOptions::default()).unwrap();
            assert_eq!(manifold.kernel_dim, 2);
            assert!(manifold.residual < 1e-10 * l.matrix.frobenius_norm());
        }
    }

    #[test]
    fn methods_agree() {
        let cfgs = [
            SystemConfig::biased(2, 1.0, 2.0, 1.0),
            SystemConfig::biased(3, 0.0, 4.0, 0.8).with_coupling(0.4),
            SystemConfig::biased(3, 8.0, 1.0, 2.0),
            SystemConfig::equilibrium(1, 0.2, 0.3),
        ];
        for cfg in cfgs {
            let l = Superoperator::build(&cfg).unwrap();
            let a = steady_state(&l, &SteadyStateOptions::default()).unwrap();
            let b = steady_state(&l, &SteadyStateOptions { method: SteadyStateMethod::NullSpace, ..Default::default() })
                .unwrap();
            assert_eq!(a.method, SteadyStateMethod::TraceRowReplacement);
            assert_eq!(b.method, SteadyStateMethod::NullSpace);
            assert!(trace_distance(a.state.matrix(), b.state.matrix()).unwrap() < 1e-8);
            for r in [&a, &b] {
                assert!(r.residual <= 1e-8 * l.matrix.frobenius_norm());
                let v = vectorize(r.state.matrix()).unwrap();
                assert!((norm2(&l.matrix.matvec(&v)) - r.residual).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lu_only_path_certifies_uniqueness() {
        let cfg = SystemConfig::biased(3, 1.0, 2.0, 1.0);
        let l = Superoperator::build(&cfg).unwrap();
        let opts = SteadyStateOptions { svd_verify_max_dim: 0, ..Default::default() };
        let report = steady_state(&l, &opts).unwrap();
        assert!(!report.gap_exact);
        let exact = singular_values(&l.matrix).unwrap();
        let sigma_next = exact[exact.len() - 2];
        assert!(report.null_gap.sigma_next <= sigma_next * (1.0 + 1e-6));
        assert!(report.null_gap.sigma_next > 1e-3);

        let degenerate = Superoperator::build(&SystemConfig::equilibrium(3, 1.0, 1.0)).unwrap();
        assert!(matches!(steady_state(&degenerate, &opts), Err(Error::DegenerateSteadyState { .. })));
    }

    #[test]
    fn excitation_sectors_do_not_mix() {
        let cfg = SystemConfig::biased(3, 0.5, 3.0, 1.2).with_coupling(1.3);
        let rho = solve(&cfg).unwrap().state.into_matrix();
        let nexc = excitation_number(3).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if nexc[(i, i)] != nexc[(j, j)] {
                    assert!(rho[(i, j)].norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn trace_distance_basics() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
    }
}
