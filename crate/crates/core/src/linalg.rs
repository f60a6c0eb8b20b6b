//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] is a row-major dense matrix of `Complex64`. Kronecker
//! products, products and the structural helpers are implemented here;
//! factorizations (LU, SVD, Hermitian eigendecomposition) go through `faer`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest row or column count `kron` will produce by default (4^7, the
/// superoperator side length at seven qubits).
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 14;

/// Relative tolerance for structural checks (Hermiticity, orthonormality).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Relative residual bound accepted from [`solve_linear`].
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch {
                op: "ComplexMatrix::new",
                detail: format!("dimensions must be positive, got {rows}x{cols}"),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "ComplexMatrix::new",
                detail: format!("{} entries for a {rows}x{cols} matrix", data.len()),
            });
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::ShapeMismatch {
                op: "ComplexMatrix::new",
                detail: "entries must be finite".into(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "from_real: wrong entry count");
        Self { rows, cols, data: entries.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "max_abs_diff: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F / ‖A‖_F`, or the absolute deviation for a zero matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        let dev = dev.sqrt();
        let norm = self.frobenius_norm();
        if norm > 0.0 {
            dev / norm
        } else {
            dev
        }
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec: vector length mismatch");
        let mut out = vec![ZERO; self.rows];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        for (row, o) in self.data.chunks_exact(self.cols).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                if z != ZERO {
                    out.push((i, j, z));
                }
            }
        }
        out
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product `a ⊗ b`, capped at [`DEFAULT_DIMENSION_CAP`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, DEFAULT_DIMENSION_CAP)
}

pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => {
            let mut out = ComplexMatrix::zeros(r, c);
            add_scaled_kron(&mut out, ONE, a, b);
            Ok(out)
        }
        _ => Err(Error::DimensionOverflow {
            rows: rows.unwrap_or(usize::MAX),
            cols: cols.unwrap_or(usize::MAX),
            cap,
        }),
    }
}

/// `target += scale · (a ⊗ b)`, visiting only nonzero entries of both factors.
pub(crate) fn add_scaled_kron(target: &mut ComplexMatrix, scale: C64, a: &ComplexMatrix, b: &ComplexMatrix) {
    debug_assert_eq!(target.rows, a.rows * b.rows);
    debug_assert_eq!(target.cols, a.cols * b.cols);
    let b_nz = b.nonzeros();
    for (i, j, av) in a.nonzeros() {
        let s = scale * av;
        for &(k, l, bv) in &b_nz {
            target[(i * b.rows + k, j * b.cols + l)] += s * bv;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Real eigenvalues, non-decreasing.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj()).sum()
        })
    }
}

fn require_square(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { op, detail: format!("expected a square matrix, got {}x{}", a.rows, a.cols) })
    }
}

fn require_hermitian(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    require_square(a, op)?;
    let deviation = a.hermitian_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEig> {
    require_hermitian(a, "eig_hermitian")?;
    let evd = a
        .hermitian_part()
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    let vectors = ComplexMatrix::from_faer(evd.U());
    Ok(HermitianEig { values, vectors })
}

/// Eigenvalues only, non-decreasing.
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(a, "eigvals_hermitian")?;
    a.hermitian_part()
        .to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    match a.to_faer().singular_values() {
        Ok(v) => Ok(v),
        Err(_) => svd(a).map(|p| p.values),
    }
}

/// Spectral norm `‖A‖₂`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// The two smallest singular values plus the largest one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullGap {
    pub sigma_min: f64,
    /// Second-smallest singular value (infinite for a 1x1 matrix).
    pub sigma_next: f64,
    pub sigma_max: f64,
}

#[derive(Clone, Debug)]
pub struct NullVector {
    /// Unit 2-norm.
    pub vector: Vec<C64>,
    pub gap: NullGap,
}

/// Full SVD `A = U Σ V†` with singular values non-increasing.
pub(crate) struct SvdParts {
    pub values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// The iterative SVD occasionally stalls on particular inputs. Retrying on
/// `A†` (whose left vectors are the right vectors of `A`) and then on the
/// column-reversed matrix changes the iteration path while keeping the
/// decomposition exact.
pub(crate) fn svd(a: &ComplexMatrix) -> Result<SvdParts> {
    let values_of = |s: &faer::linalg::solvers::Svd<C64>| s.S().column_vector().iter().map(|z| z.re).collect();
    let first = match a.to_faer().svd() {
        Ok(s) => return Ok(SvdParts { values: values_of(&s), v: ComplexMatrix::from_faer(s.V()) }),
        Err(e) => e,
    };
    if let Ok(s) = a.adjoint().to_faer().svd() {
        return Ok(SvdParts { values: values_of(&s), v: ComplexMatrix::from_faer(s.U()) });
    }
    // A·P with P reversing the columns: V = P·V'
    let n = a.cols();
    let flipped = ComplexMatrix::from_fn(a.rows(), n, |i, j| a[(i, n - 1 - j)]);
    if let Ok(s) = flipped.to_faer().svd() {
        let vp = ComplexMatrix::from_faer(s.V());
        let v = ComplexMatrix::from_fn(n, vp.cols(), |i, j| vp[(n - 1 - i, j)]);
        return Ok(SvdParts { values: values_of(&s), v });
    }
    Err(Error::NoConvergence(format!("{first:?}")))
}

fn gap_from(values: &[f64]) -> NullGap {
    let n = values.len();
    NullGap {
        sigma_min: values[n - 1],
        sigma_next: if n >= 2 { values[n - 2] } else { f64::INFINITY },
        sigma_max: values[0],
    }
}

/// Unit vector spanning the kernel of `a`, detected by singular values.
///
/// A direction counts as null when its singular value is at most
/// `tol · ‖A‖_F`. Fails when there is no such direction or more than one.
pub fn null_vector(a: &ComplexMatrix, tol: f64) -> Result<NullVector> {
    require_square(a, "null_vector")?;
    let parts = svd(a)?;
    let gap = gap_from(&parts.values);
    let threshold = tol * a.frobenius_norm();
    if gap.sigma_min > threshold {
        return Err(Error::NoNullVector { sigma_min: gap.sigma_min, threshold });
    }
    if gap.sigma_next <= threshold {
        return Err(Error::DegenerateNullSpace { sigma_min: gap.sigma_min, sigma_next: gap.sigma_next });
    }
    let mut vector = parts.v.column(a.cols - 1);
    let norm = norm2(&vector);
    vector.iter_mut().for_each(|z| *z /= norm);
    Ok(NullVector { vector, gap })
}

/// Orthonormal basis of the numerical kernel: right singular vectors with
/// `σ ≤ rel_tol · σ_max`.
pub fn null_space_basis(a: &ComplexMatrix, rel_tol: f64) -> Result<(Vec<Vec<C64>>, NullGap)> {
    require_square(a, "null_space_basis")?;
    let parts = svd(a)?;
    let gap = gap_from(&parts.values);
    let threshold = rel_tol * gap.sigma_max;
    let basis = parts
        .values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= threshold)
        .map(|(k, _)| parts.v.column(k))
        .collect();
    Ok((basis, gap))
}

/// Partial-pivot LU factorization with solve and conditioning helpers.
pub struct LuSolver {
    lu: PartialPivLu<C64>,
    dim: usize,
    norm_fro: f64,
}

impl LuSolver {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        require_square(a, "LuSolver::new")?;
        Ok(Self { lu: a.to_faer().partial_piv_lu(), dim: a.rows, norm_fro: a.frobenius_norm() })
    }

    fn column(&self, b: &[C64]) -> Mat<C64> {
        assert_eq!(b.len(), self.dim, "LuSolver: right-hand side length mismatch");
        Mat::from_fn(self.dim, 1, |i, _| b[i])
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let x = self.lu.solve(self.column(b));
        (0..self.dim).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let x = self.lu.solve_adjoint(self.column(b));
        (0..self.dim).map(|i| x[(i, 0)]).collect()
    }

    /// Estimate of the smallest singular value by inverse iteration on
    /// `(A†A)⁻¹`. Returns 0 when the factors are numerically singular.
    pub fn sigma_min_estimate(&self, iterations: usize) -> f64 {
        let n = self.dim;
        let mut x: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(1.0 + (k % 7) as f64 * 0.1, k as f64 * 0.618_033_988_75))
            .collect();
        let norm = norm2(&x);
        x.iter_mut().for_each(|z| *z /= norm);
        let mut growth = 0.0;
        for _ in 0..iterations.max(1) {
            let y = self.solve(&x);
            let z = self.solve_adjoint(&y);
            let nz = norm2(&z);
            if !nz.is_finite() || z.iter().any(|c| !c.is_finite()) {
                return 0.0;
            }
            if nz == 0.0 {
                break;
            }
            let converged = (nz - growth).abs() <= 1e-6 * nz;
            growth = nz;
            x = z.into_iter().map(|c| c / nz).collect();
            if converged {
                break;
            }
        }
        if growth > 0.0 {
            1.0 / growth.sqrt()
        } else {
            0.0
        }
    }

    pub fn condition_estimate(&self) -> f64 {
        let s = self.sigma_min_estimate(8);
        if s > 0.0 {
            self.norm_fro / s
        } else {
            f64::INFINITY
        }
    }
}

/// Solves `A x = b` by LU with a residual check.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    require_square(a, "solve_linear")?;
    if b.len() != a.rows {
        return Err(Error::ShapeMismatch {
            op: "solve_linear",
            detail: format!("right-hand side has length {}, expected {}", b.len(), a.rows),
        });
    }
    let lu = LuSolver::new(a)?;
    let x = lu.solve(b);
    let ax = a.matvec(&x);
    let residual = norm2(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    let bound = SOLVE_RESIDUAL_TOL * (a.frobenius_norm() * norm2(&x) + norm2(b));
    if x.iter().any(|z| !z.is_finite()) || residual.is_nan() || residual > bound {
        return Err(Error::SingularSystem { condition_estimate: lu.condition_estimate() });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }

    fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), rows * cols)
            .prop_map(move |v| ComplexMatrix::from_fn(rows, cols, |i, j| c(v[i * cols + j].0, v[i * cols + j].1)))
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert_eq!(kron(&z, &i2).unwrap(), ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_raising_lowering_has_single_entry() {
        let k = kron(&sigma_plus(), &sigma_minus()).unwrap();
        assert_eq!(k.nonzeros(), vec![(1, 2, ONE)]);
    }

    #[test]
    fn kron_respects_cap() {
        let a = ComplexMatrix::identity(8);
        assert!(matches!(kron_with_cap(&a, &a, 32), Err(Error::DimensionOverflow { rows: 64, .. })));
    }

    #[test]
    fn eig_hermitian_examples() {
        let e = eig_hermitian(&ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        for (got, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let sx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = eig_hermitian(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
        // det([[1-λ, i], [-i, 1-λ]]) = (1-λ)² - 1 → λ ∈ {0, 2}
        let a = ComplexMatrix::new(2, 2, vec![ONE, I, -I, ONE]).unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert!(e.values[0].abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eig_hermitian_rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn null_vector_examples() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let nv = null_vector(&a, 1e-10).unwrap();
        assert!((nv.vector[0]).norm() < 1e-14 && (nv.vector[1].norm() - 1.0).abs() < 1e-14);
        assert_eq!(nv.gap.sigma_min, 0.0);
        assert!((nv.gap.sigma_next - 1.0).abs() < 1e-14);

        assert!(matches!(null_vector(&ComplexMatrix::identity(2), 1e-10), Err(Error::NoNullVector { .. })));
        assert!(matches!(
            null_vector(&ComplexMatrix::zeros(2, 2), 1e-10),
            Err(Error::DegenerateNullSpace { .. })
        ));
    }

    #[test]
    fn solve_linear_examples() {
        let x = solve_linear(&ComplexMatrix::identity(3), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let x = solve_linear(&ComplexMatrix::from_real_diag(&[2.0, 4.0]), &[c(2.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15 && (x[1] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_linear_reports_singular_system() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        match solve_linear(&a, &[ONE, ZERO]) {
            Err(Error::SingularSystem { condition_estimate }) => assert!(condition_estimate > 1e12),
            other => panic!("expected SingularSystem, got {other:?}"),
        }
    }

    #[test]
    fn sigma_min_estimate_matches_svd() {
        let a = ComplexMatrix::from_fn(6, 6, |i, j| c(((i * 5 + j * 3) % 7) as f64 - 3.0, (i as f64 - j as f64) * 0.2))
            .add_identity(4.0);
        let exact = *singular_values(&a).unwrap().last().unwrap();
        let est = LuSolver::new(&a).unwrap().sigma_min_estimate(50);
        assert!((est - exact).abs() <= 1e-6 * exact, "{est} vs {exact}");
    }

    impl ComplexMatrix {
        fn add_identity(mut self, s: f64) -> Self {
            for i in 0..self.rows {
                self[(i, i)] += s;
            }
            self
        }
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in matrix_strategy(2, 3), b in matrix_strategy(3, 2), cc in matrix_strategy(2, 2)) {
            let left = kron(&kron(&a, &b).unwrap(), &cc).unwrap();
            let right = kron(&a, &kron(&b, &cc).unwrap()).unwrap();
            // identical products of the same three factors, up to summation order
            prop_assert!(left.max_abs_diff(&right) <= 1e-14 * (1.0 + left.frobenius_norm()));
        }

        #[test]
        fn kron_is_bilinear(a in matrix_strategy(2, 2), b in matrix_strategy(3, 3), cc in matrix_strategy(3, 3)) {
            let lhs = kron(&a, &(&b + &cc)).unwrap();
            let rhs = &kron(&a, &b).unwrap() + &kron(&a, &cc).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
        }

        #[test]
        fn hermitian_reconstruction(m in matrix_strategy(5, 5)) {
            let h = m.hermitian_part();
            let e = eig_hermitian(&h).unwrap();
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-9 * h.frobenius_norm().max(1e-300));
            let gram = e.vectors.adjoint().matmul(&e.vectors);
            prop_assert!((&gram - &ComplexMatrix::identity(5)).frobenius_norm() <= 1e-10);
            for k in 0..5 {
                let v = e.vectors.column(k);
                let av = h.matvec(&v);
                let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - y * e.values[k]).collect();
                prop_assert!(norm2(&r) <= 1e-10 * h.frobenius_norm());
            }
        }

        #[test]
        fn null_vector_on_projected_matrix(m in matrix_strategy(5, 5), u in matrix_strategy(5, 1)) {
            // A = B·P with P = I − uu†/‖u‖² has u in its kernel.
            let u = u.column(0);
            let nu = norm2(&u);
            prop_assume!(nu > 0.5);
            let p = &ComplexMatrix::identity(5) - &ComplexMatrix::outer(&u, &u).scale_real(1.0 / (nu * nu));
            let b = m.add_identity(6.0);
            let a = b.matmul(&p);
            let tol = 1e-10;
            let nv = null_vector(&a, tol).unwrap();
            prop_assert!(norm2(&a.matvec(&nv.vector)) <= tol * a.frobenius_norm());
            prop_assert!((norm2(&nv.vector) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn random_system_residual(m in matrix_strategy(8, 8), bv in matrix_strategy(8, 1)) {
            let a = m.add_identity(8.0);
            let b = bv.column(0);
            let x = solve_linear(&a, &b).unwrap();
            let r: Vec<C64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            prop_assert!(norm2(&r) <= 1e-9 * (a.frobenius_norm() * norm2(&x) + norm2(&b)));
        }
    }
}
