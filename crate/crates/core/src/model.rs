//! The physical model: qubit operators, the star-network Hamiltonian and the
//! reservoir occupations.
//!
//! Basis convention for a single qubit: `|e⟩ = (1, 0)ᵀ`, `|g⟩ = (0, 1)ᵀ`, so
//! `σ_z = diag(1, −1)`, `σ₊ = |e⟩⟨g|` and `σ₋ = |g⟩⟨e|`. Site 0 is the battery
//! and is the leftmost Kronecker factor.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{add_scaled_kron, ComplexMatrix, ONE};

/// Largest supported network (the superoperator side is `4^N`).
pub const MAX_QUBITS: usize = 7;

/// Index of the battery qubit.
pub const BATTERY_SITE: usize = 0;

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingMode {
    /// All qubits share one reservoir; the dissipators carry i≠j cross terms.
    EquilibriumCollective,
    /// Each qubit has its own reservoir; only diagonal terms.
    NonEquilibriumIndividual,
}

impl CouplingMode {
    pub fn name(self) -> &'static str {
        match self {
            CouplingMode::EquilibriumCollective => "equilibrium",
            CouplingMode::NonEquilibriumIndividual => "nonequilibrium",
        }
    }
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fermionic reservoir. Temperatures are in energy units (k_B = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reservoir {
    pub mu: f64,
    pub temperature: f64,
}

impl Reservoir {
    pub fn new(mu: f64, temperature: f64) -> Self {
        Self { mu, temperature }
    }

    pub fn occupation(&self, omega: f64) -> Result<f64> {
        fermi_occupation(omega, self.mu, self.temperature)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReservoirSpec {
    pub entries: Vec<Reservoir>,
}

impl ReservoirSpec {
    pub fn shared(mu: f64, temperature: f64) -> Self {
        Self { entries: vec![Reservoir::new(mu, temperature)] }
    }

    /// Battery reservoir at `mu`, every ancilla reservoir at `mu + delta_mu`.
    pub fn biased(n_qubits: usize, mu: f64, delta_mu: f64, temperature: f64) -> Self {
        let mut entries = vec![Reservoir::new(mu, temperature)];
        entries.extend((1..n_qubits).map(|_| Reservoir::new(mu + delta_mu, temperature)));
        Self { entries }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub n_qubits: usize,
    /// Qubit transition frequency ω₀.
    pub omega0: f64,
    /// Frequency at which the reservoir occupations are evaluated.
    pub omega: f64,
    pub coupling_j: f64,
    pub gamma: f64,
    pub reservoirs: ReservoirSpec,
    pub mode: CouplingMode,
}

impl SystemConfig {
    /// Collective coupling to a single reservoir `(mu, temperature)`, with
    /// ω₀ = 10 and ω = γ = J = 1.
    pub fn equilibrium(n_qubits: usize, mu: f64, temperature: f64) -> Self {
        Self {
            n_qubits,
            omega0: 10.0,
            omega: 1.0,
            coupling_j: 1.0,
            gamma: 1.0,
            reservoirs: ReservoirSpec::shared(mu, temperature),
            mode: CouplingMode::EquilibriumCollective,
        }
    }

    /// Individual reservoirs: battery at `mu`, ancillas at `mu + delta_mu`,
    /// common temperature; ω₀ = 10 and ω = γ = J = 1.
    pub fn biased(n_qubits: usize, mu: f64, delta_mu: f64, temperature: f64) -> Self {
        Self {
            n_qubits,
            omega0: 10.0,
            omega: 1.0,
            coupling_j: 1.0,
            gamma: 1.0,
            reservoirs: ReservoirSpec::biased(n_qubits, mu, delta_mu, temperature),
            mode: CouplingMode::NonEquilibriumIndividual,
        }
    }

    pub fn with_coupling(mut self, j: f64) -> Self {
        self.coupling_j = j;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn hilbert_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidConfig(format!("n_qubits must be in 1..={MAX_QUBITS}, got {n}")));
        }
        for (name, v) in [
            ("omega0", self.omega0),
            ("omega", self.omega),
            ("coupling_j", self.coupling_j),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        let expected = match self.mode {
            CouplingMode::EquilibriumCollective => 1,
            CouplingMode::NonEquilibriumIndividual => n,
        };
        if self.reservoirs.entries.len() != expected {
            return Err(Error::ReservoirCount { expected, found: self.reservoirs.entries.len() });
        }
        for r in &self.reservoirs.entries {
            if !r.mu.is_finite() {
                return Err(Error::InvalidConfig(format!("chemical potential must be finite, got {}", r.mu)));
            }
            if !r.temperature.is_finite() || r.temperature <= 0.0 {
                return Err(Error::NonPositiveTemperature(r.temperature));
            }
        }
        Ok(())
    }
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `site` (0-based) among `n` qubits.
pub fn embed(op: &ComplexMatrix, site: usize, n: usize) -> Result<ComplexMatrix> {
    if op.rows() != 2 || op.cols() != 2 {
        return Err(Error::ShapeMismatch {
            op: "embed",
            detail: format!("expected a 2x2 operator, got {}x{}", op.rows(), op.cols()),
        });
    }
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    if n > MAX_QUBITS {
        return Err(Error::InvalidConfig(format!("n_qubits must be at most {MAX_QUBITS}, got {n}")));
    }
    let left = ComplexMatrix::identity(1 << site);
    let right = ComplexMatrix::identity(1 << (n - site - 1));
    let dim = 1 << n;
    let mut partial = ComplexMatrix::zeros(2 << site, 2 << site);
    add_scaled_kron(&mut partial, ONE, &left, op);
    let mut out = ComplexMatrix::zeros(dim, dim);
    add_scaled_kron(&mut out, ONE, &partial, &right);
    Ok(out)
}

/// `H = Σᵢ ω₀ σ_zⁱ + Σ_{k≥1} J (σ₊⁰σ₋ᵏ + σ₋⁰σ₊ᵏ)`: the battery (site 0) couples
/// to every ancilla, ancillas do not couple to each other.
pub fn hamiltonian(cfg: &SystemConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let dim = cfg.hilbert_dim();
    let mut h = ComplexMatrix::zeros(dim, dim);
    let sz = sigma_z();
    for site in 0..n {
        h = &h + &embed(&sz, site, n)?.scale_real(cfg.omega0);
    }
    if cfg.coupling_j != 0.0 {
        let bp = embed(&sigma_plus(), BATTERY_SITE, n)?;
        let bm = embed(&sigma_minus(), BATTERY_SITE, n)?;
        for site in 1..n {
            let hop = &bp.matmul(&embed(&sigma_minus(), site, n)?) + &bm.matmul(&embed(&sigma_plus(), site, n)?);
            h = &h + &hop.scale_real(cfg.coupling_j);
        }
    }
    Ok(h)
}

/// The battery's local Hamiltonian `ω₀ σ_z`.
pub fn battery_hamiltonian(cfg: &SystemConfig) -> ComplexMatrix {
    sigma_z().scale_real(cfg.omega0)
}

/// Total excitation number `Σᵢ σ₊ⁱσ₋ⁱ`.
pub fn excitation_number(n: usize) -> Result<ComplexMatrix> {
    let proj = sigma_plus().matmul(&sigma_minus());
    let dim = 1 << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for site in 0..n {
        out = &out + &embed(&proj, site, n)?;
    }
    Ok(out)
}

/// Fermi-Dirac occupation `1 / (exp((ω − μ)/T) + 1)`.
pub fn fermi_occupation(omega: f64, mu: f64, temperature: f64) -> Result<f64> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let x = (omega - mu) / temperature;
    // Evaluate on the side where the exponential cannot overflow.
    Ok(if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    })
}
