//! Dense complex linear algebra and multi-qubit bookkeeping.
//!
//! Qubit index convention: index 0 is the leftmost tensor factor, i.e. the
//! most significant bit of a computational-basis index. For the switch the
//! register is ordered control, A, B, so `|c a b⟩` has index `4c + 2a + b`.
//!
//! Units are chosen with ħ = 1.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Builds a square matrix from row-major entries, inferring the dimension.
    pub fn from_entries(entries: &[C64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::NotSquare { len: entries.len() });
        }
        Self::from_row_major(dim, entries)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Wraps an nalgebra matrix. Panics if it is not square.
    pub fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        assert!(inner.is_square() && inner.nrows() > 0, "matrix must be square");
        Self { inner }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { diag[r] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |r, c| {
            if r == c {
                C64::new(diag[r], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &Ket, bra: &Ket) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        Ok(Self {
            inner: &ket.inner * bra.inner.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn entries_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| self.inner[(r, c)])
            .collect()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            inner: self.inner.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`. Infinite on a shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A − A†|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// `A B − B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        Ket {
            inner: &self.inner * &ket.inner,
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        writeln!(f, "ComplexMatrix({n}x{n}) [")?;
        for r in 0..n {
            write!(f, "  ")?;
            for c in 0..n {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix product dimension mismatch");
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix sum dimension mismatch");
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix difference dimension mismatch");
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// Column state vector.
#[derive(Clone, PartialEq)]
pub struct Ket {
    inner: DVector<C64>,
}

impl Ket {
    pub fn new(amplitudes: &[C64]) -> Self {
        assert!(!amplitudes.is_empty(), "ket must have at least one amplitude");
        Self {
            inner: DVector::from_column_slice(amplitudes),
        }
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        let v: Vec<C64> = amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(&v)
    }

    /// Computational basis vector `|index⟩` in a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut inner = DVector::from_element(dim, ZERO);
        inner[index] = ONE;
        Self { inner }
    }

    /// Two-qubit basis ket from a label like `"01"` (qubit 0 first).
    pub fn from_bits(bits: &str) -> Result<Self> {
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Precondition(format!(
                "basis label {bits:?} must be a nonempty string of 0/1"
            )));
        }
        let index = usize::from_str_radix(bits, 2).expect("validated binary label");
        Ok(Self::basis(1 << bits.len(), index))
    }

    pub fn zero() -> Self {
        Self::basis(2, 0)
    }

    pub fn one() -> Self {
        Self::basis(2, 1)
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self::from_real(&[std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2])
    }

    /// `(|0⟩ − |1⟩)/√2`.
    pub fn minus() -> Self {
        Self::from_real(&[std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2])
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.inner[index]
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        self.inner.iter().copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner.norm_squared()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.inner.dotc(&other.inner)
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        Ket {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    pub fn as_nalgebra(&self) -> &DVector<C64> {
        &self.inner
    }

    pub fn from_nalgebra(inner: DVector<C64>) -> Self {
        Self { inner }
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.inner.iter().map(|z| (z.re, z.im)))
            .finish()
    }
}

/// Pauli matrices and the 2×2 identity.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    /// `σ_x = |0⟩⟨1| + |1⟩⟨0|`.
    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        let o = C64::new(0.0, 0.0);
        ComplexMatrix::from_row_major(2, &[o, -i, i, o]).expect("2x2")
    }

    /// `σ_z = |0⟩⟨0| − |1⟩⟨1|`.
    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }
}

/// Tensor product with `a`'s indices major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

/// Tensor product of a sequence of matrices, leftmost factor first.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("kron_all needs at least one factor").clone();
    iter.fold(first, |acc, m| kron(&acc, m))
}

/// Rank-one projector `|v⟩⟨v|`; `v` must be normalized.
pub fn projector(v: &Ket) -> Result<ComplexMatrix> {
    let norm = v.norm();
    if (norm - 1.0).abs() > tolerance::KET_NORM {
        return Err(Error::NotNormalized { norm });
    }
    ComplexMatrix::outer(v, v)
}

/// Eigendecomposition `H = U diag(λ) U†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianSpectrum {
    /// Diagonalizes `h`, rejecting inputs whose Hermiticity deviation exceeds
    /// [`tolerance::HERMITIAN_INPUT`].
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let deviation = h.hermiticity_deviation();
        if deviation > tolerance::HERMITIAN_INPUT {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = SymmetricEigen::try_new(h.hermitian_part().inner, f64::EPSILON, 0)
            .ok_or(Error::EigenFailure)?;
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    /// Eigenvalues in the solver's order (paired with [`Self::eigenvectors`] columns).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> ComplexMatrix {
        ComplexMatrix::from_nalgebra(self.eigenvectors.clone())
    }

    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `U f(λ) U†` for a scalar function applied to the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (col, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for row in 0..n {
                scaled[(row, col)] *= w;
            }
        }
        ComplexMatrix {
            inner: scaled * self.eigenvectors.adjoint(),
        }
    }

    /// `exp(−i·scale·H)`.
    pub fn exp_minus_i(&self, scale: f64) -> ComplexMatrix {
        self.map(|lambda| C64::from_polar(1.0, -scale * lambda))
    }
}

/// `exp(−i·scale·h)` for Hermitian `h`, computed from its spectral decomposition.
pub fn hermitian_expm(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix> {
    Ok(HermitianSpectrum::new(h)?.exp_minus_i(scale))
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Multi-qubit density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    qubit_count: usize,
    trace_normalized: bool,
}

impl DensityMatrix {
    /// Validates `matrix` as a state on `log2(dim)` qubits.
    ///
    /// With `trace_normalized = false` the trace may lie anywhere in
    /// `[0, 1]`, which is how post-selected branches are carried before
    /// renormalization.
    pub fn new(matrix: ComplexMatrix, trace_normalized: bool) -> Result<Self> {
        let qubit_count = qubits_for_dim(matrix.dim())?;
        let deviation = matrix.hermiticity_deviation();
        if deviation > tolerance::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        if tr.im.abs() > tolerance::TRACE {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace has imaginary part {:e}",
                tr.im
            )));
        }
        if trace_normalized {
            if (tr.re - 1.0).abs() > tolerance::TRACE {
                return Err(Error::InvalidDensityMatrix(format!(
                    "trace {} differs from 1",
                    tr.re
                )));
            }
        } else if tr.re < -tolerance::TRACE || tr.re > 1.0 + tolerance::TRACE {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} outside [0, 1]",
                tr.re
            )));
        }
        let min_eig = HermitianSpectrum::new(&matrix)?
            .sorted_eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -tolerance::PSD_SLACK {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self {
            matrix,
            qubit_count,
            trace_normalized,
        })
    }

    /// Like [`Self::new`] but first replaces `matrix` with its Hermitian part,
    /// removing rounding asymmetry left by products such as `VρV†`.
    pub fn from_computed(matrix: ComplexMatrix, trace_normalized: bool) -> Result<Self> {
        Self::new(matrix.hermitian_part(), trace_normalized)
    }

    /// Pure state `|ψ⟩⟨ψ|`.
    pub fn from_ket(ket: &Ket) -> Result<Self> {
        Self::new(projector(ket)?, true)
    }

    /// `|index⟩⟨index|` on `qubit_count` qubits.
    pub fn basis(qubit_count: usize, index: usize) -> Self {
        Self::from_ket(&Ket::basis(1 << qubit_count, index)).expect("basis state is valid")
    }

    /// Two-qubit computational state from a label like `"00"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        Self::from_ket(&Ket::from_bits(bits)?)
    }

    pub fn maximally_mixed(qubit_count: usize) -> Self {
        let dim = 1 << qubit_count;
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64), true)
            .expect("maximally mixed state is valid")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn is_trace_normalized(&self) -> bool {
        self.trace_normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        HermitianSpectrum::new(&self.matrix)
            .map(|s| s.sorted_eigenvalues())
            .expect("density matrix is Hermitian")
    }

    /// `ρ / Tr ρ`.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= tolerance::EMPTY_BRANCH {
            return Err(Error::EmptyBranch {
                probability: tr,
                threshold: tolerance::EMPTY_BRANCH,
            });
        }
        Self::from_computed(self.matrix.scale_real(1.0 / tr), true)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Self::from_computed(
            kron(&self.matrix, &other.matrix),
            self.trace_normalized && other.trace_normalized,
        )
    }

    /// `U ρ U†` for unitary `u`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        Self::from_computed(self.matrix.conjugate_by(u), self.trace_normalized)
    }
}

fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// Reduced state on the qubits in `keep`, tracing out the rest.
///
/// `keep` must be a nonempty proper subset of the qubit indices; the kept
/// qubits stay in ascending order in the result.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.qubit_count();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.iter().any(|&q| q >= n) || kept.len() != keep.len()
    {
        return Err(Error::InvalidKeepSet {
            keep: keep.to_vec(),
            qubit_count: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let out_dim = 1 << k;
    let env_dim = 1 << traced.len();

    // Full index from (kept bits, traced bits).
    let compose = |kept_bits: usize, env_bits: usize| -> usize {
        let mut full = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            full |= bit(kept_bits, pos, k) << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            full |= bit(env_bits, pos, traced.len()) << (n - 1 - q);
        }
        full
    };

    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(out_dim, |r, c| {
        (0..env_dim)
            .map(|e| m.get(compose(r, e), compose(c, e)))
            .sum()
    });
    DensityMatrix::from_computed(out, rho.is_trace_normalized())
}
