//! Two-qubit entanglement: Wootters concurrence and Bell-state fidelity.
//!
//! The concurrence is `C(ρ) = max(√λ₁ − √λ₂ − √λ₃ − √λ₄, 0)` where the `λᵢ`
//! are the eigenvalues, in decreasing order, of
//!
//! ```text
//! ρ⋆ = ρ (σ_y ⊗ σ_y) ρ̄ (σ_y ⊗ σ_y)
//! ```
//!
//! with `ρ̄` the entrywise complex conjugate. The conjugation matters: without
//! it `(|01⟩ + |10⟩)/√2` would not come out maximally entangled.
//!
//! [`concurrence`] obtains `√λᵢ` as the singular values of
//! `τ = Vᵀ (σ_y ⊗ σ_y) V`, where the columns of `V` are the eigenvectors of `ρ`
//! scaled by the square roots of their eigenvalues. This gives the same
//! numbers as diagonalizing `ρ⋆` but keeps rounding noise at the `1e-16`
//! level in `√λ` rather than `1e-8`. [`wootters_spectrum`] diagonalizes `ρ⋆`
//! directly with a general eigensolver and serves as a cross-check.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Schur, SVD};

use crate::error::{Error, Result};
use crate::matquant::{kron, pauli, ComplexMatrix, DensityMatrix, HermitianSpectrum, Ket, C64};
use crate::tolerance;

/// Concurrence together with the spectrum it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Eigenvalues of `ρ⋆`, non-negative, in decreasing order.
    pub lambdas: [f64; 4],
}

impl ConcurrenceResult {
    pub fn from_lambdas(mut lambdas: [f64; 4]) -> Self {
        for l in &mut lambdas {
            *l = l.max(0.0);
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let r = lambdas.map(f64::sqrt);
        Self {
            value: (r[0] - r[1] - r[2] - r[3]).max(0.0),
            lambdas,
        }
    }
}

fn check_two_qubit_normalized(rho: &DensityMatrix) -> Result<()> {
    if rho.qubit_count() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > tolerance::TRACE {
        return Err(Error::InvalidDensityMatrix(format!(
            "concurrence needs a normalized state, trace is {tr}"
        )));
    }
    Ok(())
}

fn spin_flip() -> ComplexMatrix {
    kron(&pauli::y(), &pauli::y())
}

pub fn concurrence(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    check_two_qubit_normalized(rho)?;
    let spectrum = HermitianSpectrum::new(rho.matrix())?;
    let mut v = spectrum.eigenvectors().as_nalgebra().clone();
    for (col, &p) in spectrum.eigenvalues().iter().enumerate() {
        let w = C64::new(p.max(0.0).sqrt(), 0.0);
        for row in 0..4 {
            v[(row, col)] *= w;
        }
    }
    let tau = v.transpose() * spin_flip().as_nalgebra() * &v;
    let sv = SVD::try_new(tau, false, false, f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?
        .singular_values;
    Ok(ConcurrenceResult::from_lambdas([
        sv[0] * sv[0],
        sv[1] * sv[1],
        sv[2] * sv[2],
        sv[3] * sv[3],
    ]))
}

/// The operator `ρ⋆ = ρ (σ_y ⊗ σ_y) ρ̄ (σ_y ⊗ σ_y)`.
pub fn wootters_operator(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_two_qubit_normalized(rho)?;
    let yy = spin_flip();
    let m = rho.matrix();
    Ok(&(&(m * &yy) * &m.conj()) * &yy)
}

/// Eigenvalues of `ρ⋆` from a general (non-Hermitian) eigensolver, in
/// decreasing order, with imaginary parts up to
/// [`tolerance::SPECTRUM_IMAG`] discarded and small negatives floored at 0.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let op = wootters_operator(rho)?;
    let schur = Schur::try_new(op.as_nalgebra().clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let eig = schur.eigenvalues().ok_or(Error::EigenFailure)?;
    let mut out = [0.0; 4];
    for (slot, z) in out.iter_mut().zip(eig.iter()) {
        if z.im.abs() > tolerance::SPECTRUM_IMAG {
            return Err(Error::EigenFailure);
        }
        *slot = z.re;
    }
    Ok(ConcurrenceResult::from_lambdas(out).lambdas)
}

/// The four canonical Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus,
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|01⟩ − |10⟩)/√2`
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn ket(self) -> Ket {
        let h = FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => Ket::from_real(&[h, 0.0, 0.0, h]),
            BellState::PhiMinus => Ket::from_real(&[h, 0.0, 0.0, -h]),
            BellState::PsiPlus => Ket::from_real(&[0.0, h, h, 0.0]),
            BellState::PsiMinus => Ket::from_real(&[0.0, h, -h, 0.0]),
        }
    }
}

/// `(|00⟩ + sign·e^{iφ}|11⟩)/√2`.
pub fn phased_phi(sign: f64, phi: f64) -> Ket {
    let h = FRAC_1_SQRT_2;
    Ket::new(&[
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(sign * h, phi),
    ])
}

/// `⟨target|ρ|target⟩`.
pub fn bell_fidelity(rho: &DensityMatrix, target: &Ket) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    if (target.norm() - 1.0).abs() > tolerance::KET_NORM {
        return Err(Error::NotNormalized { norm: target.norm() });
    }
    Ok(target.inner(&rho.matrix().apply(target)).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(k: &Ket) -> DensityMatrix {
        DensityMatrix::from_ket(k).unwrap()
    }

    #[test]
    fn triplet_is_maximally_entangled() {
        let c = concurrence(&pure(&BellState::PsiPlus.ket())).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        let c = concurrence(&DensityMatrix::from_bits("00").unwrap()).unwrap();
        assert!(c.value.abs() < 1e-12);
    }

    #[test]
    fn werner_state_matches_high_precision_oracle() {
        // Reference from a 50-digit diagonalization of ρ⋆:
        // λ = (0.390625, 0.015625, 0.015625, 0.015625), C = 0.25.
        let singlet = pure(&BellState::PsiMinus.ket());
        let mixed = DensityMatrix::maximally_mixed(2);
        let rho = DensityMatrix::new(
            &singlet.matrix().scale_real(0.5) + &mixed.matrix().scale_real(0.5),
            true,
        )
        .unwrap();
        let c = concurrence(&rho).unwrap();
        assert!((c.value - 0.25).abs() < 1e-14);
        let expected = [0.390625, 0.015625, 0.015625, 0.015625];
        for (got, want) in c.lambdas.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14);
        }
        let general = wootters_spectrum(&rho).unwrap();
        for (got, want) in general.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let singlet = pure(&BellState::PsiMinus.ket());
        assert!((bell_fidelity(&singlet, &BellState::PsiMinus.ket()).unwrap() - 1.0).abs() < 1e-15);
        assert!(bell_fidelity(&singlet, &BellState::PsiPlus.ket()).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        for b in BellState::ALL {
            assert!((bell_fidelity(&mixed, &b.ket()).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_wrong_inputs() {
        let one_qubit = DensityMatrix::maximally_mixed(1);
        assert!(concurrence(&one_qubit).is_err());
        assert!(bell_fidelity(&one_qubit, &BellState::PhiPlus.ket()).is_err());
        let sub = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.2, 0.0, 0.0, 0.0]), false)
            .unwrap();
        assert!(concurrence(&sub).is_err());
    }
}
