//! Superoperator form of the master-equation generator
//!
//! `D[ρ] = −i[H, ρ] + Σ_k r_k (L_k ρ R_k† − ½{R_k† L_k, ρ})`
//!
//! acting on column-stacked density matrices, so that
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{add_scaled_kron, ComplexMatrix, C64, DEFAULT_DIMENSION_CAP, I};
use crate::model::{embed, fermi_occupation, hamiltonian, sigma_minus, sigma_plus, CouplingMode, SystemConfig};

/// Column-stacking vectorization: `v[j·d + i] = ρ[i, j]`.
pub fn vectorize(rho: &ComplexMatrix) -> Result<Vec<C64>> {
    if !rho.is_square() {
        return Err(Error::ShapeMismatch {
            op: "vectorize",
            detail: format!("expected a square matrix, got {}x{}", rho.rows(), rho.cols()),
        });
    }
    let d = rho.rows();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(rho[(i, j)]);
        }
    }
    Ok(v)
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[C64], dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 || v.len() != dim * dim {
        return Err(Error::ShapeMismatch {
            op: "devectorize",
            detail: format!("vector of length {} cannot form a {dim}x{dim} matrix", v.len()),
        });
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| v[j * dim + i]))
}

/// Side length of a square matrix stored as a vector of length `len`.
pub fn side_of(len: usize) -> Result<usize> {
    let d = (len as f64).sqrt().round() as usize;
    if d * d == len && d > 0 {
        Ok(d)
    } else {
        Err(Error::ShapeMismatch { op: "side_of", detail: format!("{len} is not a perfect square") })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpKind {
    Emission,
    Absorption,
}

/// One term `rate · (L ρ R† − ½{R† L, ρ})`.
#[derive(Clone, Debug)]
pub struct JumpTerm {
    pub rate: f64,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
    pub kind: JumpKind,
    /// Site of `left`.
    pub left_site: usize,
    /// Site of `right`.
    pub right_site: usize,
}

impl JumpTerm {
    pub fn is_cross(&self) -> bool {
        self.left_site != self.right_site
    }
}

#[derive(Clone, Debug, Default)]
pub struct JumpTermSet {
    pub terms: Vec<JumpTerm>,
}

impl JumpTermSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &JumpTerm> {
        self.terms.iter()
    }

    /// Keeps only the diagonal (same-site) terms.
    pub fn without_cross_terms(&self) -> Self {
        Self { terms: self.terms.iter().filter(|t| !t.is_cross()).cloned().collect() }
    }
}

fn push_pair(
    terms: &mut Vec<JumpTerm>,
    n: usize,
    gamma: f64,
    occupation: f64,
    left_site: usize,
    right_site: usize,
) -> Result<()> {
    terms.push(JumpTerm {
        rate: gamma * (1.0 - occupation),
        left: embed(&sigma_minus(), left_site, n)?,
        right: embed(&sigma_minus(), right_site, n)?,
        kind: JumpKind::Emission,
        left_site,
        right_site,
    });
    terms.push(JumpTerm {
        rate: gamma * occupation,
        left: embed(&sigma_plus(), left_site, n)?,
        right: embed(&sigma_plus(), right_site, n)?,
        kind: JumpKind::Absorption,
        left_site,
        right_site,
    });
    Ok(())
}

/// Collective coupling to a shared reservoir: the full double sum over
/// `(i, j)`, with `left = σ_j^∓` and `right = σ_i^∓`.
pub fn collective_dissipators(cfg: &SystemConfig) -> Result<JumpTermSet> {
    if cfg.mode != CouplingMode::EquilibriumCollective {
        return Err(Error::WrongMode { expected: CouplingMode::EquilibriumCollective.name(), found: cfg.mode.name() });
    }
    cfg.validate()?;
    let n = cfg.n_qubits;
    let res = cfg.reservoirs.entries[0];
    let occupation = fermi_occupation(cfg.omega, res.mu, res.temperature)?;
    let mut terms = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            push_pair(&mut terms, n, cfg.gamma, occupation, j, i)?;
        }
    }
    Ok(JumpTermSet { terms })
}

/// One reservoir per qubit: `2N` same-site terms, qubit `i` using its own
/// occupation `n_i(ω)`.
pub fn individual_dissipators(cfg: &SystemConfig) -> Result<JumpTermSet> {
    if cfg.mode != CouplingMode::NonEquilibriumIndividual {
        return Err(Error::WrongMode {
            expected: CouplingMode::NonEquilibriumIndividual.name(),
            found: cfg.mode.name(),
        });
    }
    cfg.validate()?;
    let n = cfg.n_qubits;
    let mut terms = Vec::with_capacity(2 * n);
    for (site, res) in cfg.reservoirs.entries.iter().enumerate() {
        let occupation = fermi_occupation(cfg.omega, res.mu, res.temperature)?;
        push_pair(&mut terms, n, cfg.gamma, occupation, site, site)?;
    }
    Ok(JumpTermSet { terms })
}

pub fn dissipators(cfg: &SystemConfig) -> Result<JumpTermSet> {
    match cfg.mode {
        CouplingMode::EquilibriumCollective => collective_dissipators(cfg),
        CouplingMode::NonEquilibriumIndividual => individual_dissipators(cfg),
    }
}

/// The generator as a `4^N × 4^N` matrix.
#[derive(Clone, Debug)]
pub struct Superoperator {
    pub matrix: ComplexMatrix,
    pub dim_hilbert: usize,
    pub mode: CouplingMode,
}

impl Superoperator {
    pub fn build(cfg: &SystemConfig) -> Result<Self> {
        let h = hamiltonian(cfg)?;
        let terms = dissipators(cfg)?;
        Self::from_parts(&h, &terms, cfg.mode)
    }

    /// Assembles `−i(I⊗H − Hᵀ⊗I) + Σ r (conj(R)⊗L − ½ I⊗R†L − ½ (R†L)ᵀ⊗I)`.
    pub fn from_parts(h: &ComplexMatrix, terms: &JumpTermSet, mode: CouplingMode) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::ShapeMismatch { op: "Superoperator", detail: "Hamiltonian must be square".into() });
        }
        let d = h.rows();
        let big = d.checked_mul(d).filter(|&s| s <= DEFAULT_DIMENSION_CAP).ok_or(Error::DimensionOverflow {
            rows: d.saturating_mul(d),
            cols: d.saturating_mul(d),
            cap: DEFAULT_DIMENSION_CAP,
        })?;
        let id = ComplexMatrix::identity(d);
        let mut m = ComplexMatrix::zeros(big, big);
        add_scaled_kron(&mut m, -I, &id, h);
        add_scaled_kron(&mut m, I, &h.transpose(), &id);
        for t in terms.iter() {
            if t.rate < 0.0 {
                return Err(Error::InvalidConfig(format!("negative jump rate {}", t.rate)));
            }
            if t.rate == 0.0 {
                continue;
            }
            if t.left.rows() != d || t.right.rows() != d {
                return Err(Error::ShapeMismatch {
                    op: "Superoperator",
                    detail: "jump operator dimension differs from the Hamiltonian".into(),
                });
            }
            let rate = C64::new(t.rate, 0.0);
            let rdag_l = t.right.adjoint().matmul(&t.left);
            add_scaled_kron(&mut m, rate, &t.right.conj(), &t.left);
            add_scaled_kron(&mut m, rate * -0.5, &id, &rdag_l);
            add_scaled_kron(&mut m, rate * -0.5, &rdag_l.transpose(), &id);
        }
        Ok(Self { matrix: m, dim_hilbert: d, mode })
    }

    /// Side length of the superoperator matrix.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `D[ρ]` via the matrix: `devec(L · vec(ρ))`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_hilbert {
            return Err(Error::ShapeMismatch {
                op: "Superoperator::apply",
                detail: format!("state dimension {} vs generator {}", rho.rows(), self.dim_hilbert),
            });
        }
        devectorize(&self.matrix.matvec(&vectorize(rho)?), self.dim_hilbert)
    }

    /// Row vector `vec(I)† L`; zero for a trace-preserving generator.
    pub fn trace_row(&self) -> Vec<C64> {
        let d = self.dim_hilbert;
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..d {
            let row = self.matrix.row(k * (d + 1));
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// Writes the text dump: two `#` comment lines, a `rows cols nnz` line,
    /// then one `row col re im` record per nonzero (0-based, row-major).
    pub fn write_dump(&self, mut w: impl Write) -> Result<()> {
        let nz = self.matrix.nonzeros();
        writeln!(w, "# qbss superoperator dump, column-stacking vectorization")?;
        writeln!(w, "# mode={} hilbert_dim={}", self.mode, self.dim_hilbert)?;
        writeln!(w, "{} {} {}", self.dim(), self.dim(), nz.len())?;
        for (i, j, z) in nz {
            writeln!(w, "{i} {j} {:e} {:e}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// Reads a dump written by [`Superoperator::write_dump`].
pub fn read_dump(r: impl BufRead) -> Result<ComplexMatrix> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut m: Option<ComplexMatrix> = None;
    let mut seen = 0;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err("expected `rows cols nnz`".into()));
                }
                let nums: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse::<usize>().map_err(|e| parse_err(e.to_string())))
                    .collect::<Result<_>>()?;
                if nums[0] == 0 || nums[1] == 0 {
                    return Err(parse_err("dimensions must be positive".into()));
                }
                header = Some((nums[0], nums[1], nums[2]));
                m = Some(ComplexMatrix::zeros(nums[0], nums[1]));
            }
            Some((rows, cols, _)) => {
                if fields.len() != 4 {
                    return Err(parse_err("expected `row col re im`".into()));
                }
                let i: usize = fields[0].parse().map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?;
                let j: usize = fields[1].parse().map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?;
                let re: f64 = fields[2].parse().map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?;
                let im: f64 = fields[3].parse().map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?;
                if i >= rows || j >= cols {
                    return Err(parse_err(format!("index ({i}, {j}) outside {rows}x{cols}")));
                }
                if let Some(m) = m.as_mut() {
                    m[(i, j)] = C64::new(re, im);
                }
                seen += 1;
            }
        }
    }
    match (header, m) {
        (Some((_, _, nnz)), Some(m)) if nnz == seen => Ok(m),
        (Some((_, _, nnz)), Some(_)) => {
            Err(Error::Parse { line: 0, message: format!("header announces {nnz} entries, found {seen}") })
        }
        _ => Err(Error::Parse { line: 0, message: "missing header".into() }),
    }
}
