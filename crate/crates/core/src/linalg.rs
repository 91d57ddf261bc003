//! Dense complex linear algebra over small tensor-product Hilbert spaces.
//!
//! Everything here is sized for composite systems of dimension ≤ 16, so the
//! representations are plain row-major vectors and the eigensolver is a
//! cyclic Jacobi iteration. All values are immutable after construction and
//! all operations are pure functions.

use num_complex::Complex64;
use thiserror::Error;

use crate::tolerance;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("entry count {found} does not match {rows}x{cols}")]
    BadEntryCount { rows: usize, cols: usize, found: usize },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
    #[error("Jacobi iteration did not converge (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { off_norm: f64 },
    #[error("empty factor list for Hilbert layout")]
    EmptyLayout,
    #[error("invalid factor selector {index} for layout with {factors} factors")]
    BadFactor { index: usize, factors: usize },
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major entries. Rejects NaN/Inf and shape mismatches.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<Complex64>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::BadEntryCount {
                rows,
                cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        Self::from_entries(
            rows,
            cols,
            entries.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        )
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.entries[i * n + i] = v;
        }
        m
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &Ket) -> Ket {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut amps = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                amps[i] += self.get(i, j) * v.amplitudes()[j];
            }
        }
        Ket { amplitudes: amps }
    }

    /// Kronecker product; the left factor is most significant in the
    /// composite index: `(i_a, i_b) -> i_a * dim(b) + i_b`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        out.entries[(ia * other.rows + ib) * cols + (ja * other.cols + jb)] =
                            a * other.get(ib, jb);
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest absolute deviation from Hermitian symmetry.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, LinalgError> {
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis vector `|index>` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Build and normalize in one step.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self, LinalgError> {
        let mut ket = Self::from_amplitudes(amplitudes)?;
        ket.normalize()?;
        Ok(ket)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<(), LinalgError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(LinalgError::ZeroNorm);
        }
        for c in &mut self.amplitudes {
            *c /= n;
        }
        Ok(())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner-product dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &Ket) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                out.set(i, j, self.amplitudes[i] * other.amplitudes[j].conj());
            }
        }
        out
    }

    /// Rank-1 projector `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    /// Tensor product; the left factor is most significant.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ket { amplitudes }
    }

    pub fn scale(&self, factor: Complex64) -> Ket {
        Ket {
            amplitudes: self.amplitudes.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Factor dimensions of a tensor-product space, in tensor order
/// (data first, then ancilla, then program). Composite indices are
/// big-endian: the first factor is most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLayout {
    factors: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self, LinalgError> {
        if factors.is_empty() || factors.iter().any(|&d| d == 0) {
            return Err(LinalgError::EmptyLayout);
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().product()
    }

    /// Composite index from per-factor indices.
    pub fn compose(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.factors.len());
        indices
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Per-factor indices from a composite index.
    pub fn decompose(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

/// Reduced operator on the selected factors; all other factors are traced
/// out. `keep` lists factor positions in strictly increasing order.
pub fn partial_trace(
    op: &ComplexMatrix,
    layout: &HilbertLayout,
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    if !op.is_square() {
        return Err(LinalgError::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    if op.rows() != layout.total_dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: layout.total_dim(),
            found: op.rows(),
        });
    }
    for w in keep.windows(2) {
        if w[0] >= w[1] {
            return Err(LinalgError::BadFactor {
                index: w[1],
                factors: layout.factors.len(),
            });
        }
    }
    if let Some(&bad) = keep.iter().find(|&&f| f >= layout.factors.len()) {
        return Err(LinalgError::BadFactor {
            index: bad,
            factors: layout.factors.len(),
        });
    }

    let traced: Vec<usize> = (0..layout.factors.len())
        .filter(|f| !keep.contains(f))
        .collect();
    let kept_layout = HilbertLayout::new(if keep.is_empty() {
        vec![1]
    } else {
        keep.iter().map(|&f| layout.factors[f]).collect()
    })
    .unwrap();
    let traced_dim: usize = traced.iter().map(|&f| layout.factors[f]).product();
    let kept_dim = kept_layout.total_dim();

    // Stride of each factor in the full composite index.
    let mut stride = vec![1usize; layout.factors.len()];
    for f in (0..layout.factors.len().saturating_sub(1)).rev() {
        stride[f] = stride[f + 1] * layout.factors[f + 1];
    }
    let traced_layout = HilbertLayout::new(if traced.is_empty() {
        vec![1]
    } else {
        traced.iter().map(|&f| layout.factors[f]).collect()
    })
    .unwrap();

    let offset = |reduced: usize, trace_idx: usize| -> usize {
        let kept_digits = kept_layout.decompose(reduced);
        let traced_digits = traced_layout.decompose(trace_idx);
        let mut full = 0;
        for (pos, &f) in keep.iter().enumerate() {
            full += kept_digits[pos] * stride[f];
        }
        for (pos, &f) in traced.iter().enumerate() {
            full += traced_digits[pos] * stride[f];
        }
        full
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        for c in 0..kept_dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                sum += op.get(offset(r, t), offset(c, t));
            }
            out.set(r, c, sum);
        }
    }
    Ok(out)
}

/// Real eigenvalues of a Hermitian matrix, ascending, computed by cyclic
/// Jacobi rotations iterated until the off-diagonal norm drops below `tol`.
pub fn hermitian_eigenvalues(op: &ComplexMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    if !op.is_square() {
        return Err(LinalgError::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let dev = op.hermitian_deviation();
    if dev > tol {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    let n = op.rows();
    if n == 1 {
        return Ok(vec![op.get(0, 0).re]);
    }

    let mut a = op.clone();
    // Symmetrize exactly so rounding in the input cannot bias the sweeps.
    for i in 0..n {
        a.set(i, i, Complex64::new(a.get(i, i).re, 0.0));
        for j in 0..i {
            let m = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, m);
            a.set(j, i, m.conj());
        }
    }

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    const MAX_SWEEPS: usize = 64;
    let mut converged = off_norm(&a) < tol;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    let new_kp = akp * c + akq * s * phase.conj();
                    let new_kq = akq * c - akp * s * phase;
                    a.set(k, p, new_kp);
                    a.set(k, q, new_kq);
                    a.set(p, k, new_kp.conj());
                    a.set(q, k, new_kq.conj());
                }
                let new_pp = app * c * c + 2.0 * r * s * c + aqq * s * s;
                let new_qq = app * s * s - 2.0 * r * s * c + aqq * c * c;
                a.set(p, p, Complex64::new(new_pp, 0.0));
                a.set(q, q, Complex64::new(new_qq, 0.0));
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
            }
        }
        converged = off_norm(&a) < tol;
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            off_norm: off_norm(&a),
        });
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// Result of a unitarity test: largest entry of `op† op - I` and whether it
/// stays within the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryCheck {
    pub deviation: f64,
    pub passed: bool,
}

pub fn check_unitary(op: &ComplexMatrix, tol: f64) -> Result<UnitaryCheck, LinalgError> {
    if !op.is_square() {
        return Err(LinalgError::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let product = op.dagger().matmul(op);
    let deviation = product.max_abs_diff(&ComplexMatrix::identity(op.rows()));
    Ok(UnitaryCheck {
        deviation,
        passed: deviation <= tol,
    })
}

/// Deviation of a ket family from being an orthonormal basis of its space:
/// the largest entry of the Gram matrix minus the identity. The family must
/// be complete (`len == dim`) to qualify as a measurement basis.
pub fn basis_deviation(kets: &[Ket]) -> Result<f64, LinalgError> {
    let Some(first) = kets.first() else {
        return Err(LinalgError::EmptyLayout);
    };
    let dim = first.dim();
    if kets.len() != dim {
        return Err(LinalgError::DimensionMismatch {
            expected: dim,
            found: kets.len(),
        });
    }
    let mut worst = 0.0f64;
    for (i, a) in kets.iter().enumerate() {
        if a.dim() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                found: a.dim(),
            });
        }
        for (j, b) in kets.iter().enumerate() {
            let g = a.inner(b);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

pub fn is_orthonormal_basis(kets: &[Ket], tol: f64) -> bool {
    matches!(basis_deviation(kets), Ok(dev) if dev <= tol)
}

/// Pauli matrices along the three fixed spatial axes.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static entries")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .expect("static entries")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static entries")
}

/// Default tolerance wrapper used by most call sites.
pub fn default_unitary_check(op: &ComplexMatrix) -> Result<UnitaryCheck, LinalgError> {
    check_unitary(op, tolerance::STRUCTURAL)
}
