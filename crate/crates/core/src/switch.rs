//! The quantum switch: two channels applied in a coherent superposition of
//! both orders, with the order selected by a control qubit.
//!
//! For Kraus sets `{Kᵐᵢ}` and `{Kⁿⱼ}` evaluated at half the total duration,
//!
//! ```text
//! V_ij(t) = |1⟩⟨1| ⊗ Kᵐᵢ(t/2) Kⁿⱼ(t/2)  +  |0⟩⟨0| ⊗ Kⁿⱼ(t/2) Kᵐᵢ(t/2)
//! ```
//!
//! so control `|0⟩` runs 𝒩 first and then ℳ, and control `|1⟩` the
//! reverse. The control is always tensor factor 0.

use std::fmt;

use crate::error::{Error, Result};
use crate::matquant::{kron, partial_trace, projector, ComplexMatrix, DensityMatrix, HermitianSpectrum, Ket};
use crate::tolerance;

/// A channel in Kraus form, `ρ ↦ Σ Kᵢ ρ Kᵢ†`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl QuantumChannel {
    /// Validates that every operator has the same dimension and that
    /// `Σ Kᵢ†Kᵢ = I` within [`tolerance::EQ`].
    pub fn new(label: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyChannel)?;
        let dim = first.dim();
        if let Some(bad) = kraus.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let residual = completeness_residual(&kraus);
        if residual > tolerance::EQ {
            return Err(Error::IncompleteChannel { residual });
        }
        Ok(Self {
            kraus,
            label: label.into(),
        })
    }

    pub fn unitary(label: impl Into<String>, u: ComplexMatrix) -> Result<Self> {
        Self::new(label, vec![u])
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
            label: "identity".into(),
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        let out = self
            .kraus
            .iter()
            .map(|k| rho.matrix().conjugate_by(k))
            .reduce(|acc, m| &acc + &m)
            .expect("channel has at least one Kraus operator");
        DensityMatrix::from_computed(out, rho.is_trace_normalized())
    }
}

/// `‖Σ Kᵢ†Kᵢ − I‖_max`; infinite for an empty set.
pub fn completeness_residual(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let sum = kraus
        .iter()
        .map(|k| &k.adjoint() * k)
        .reduce(|acc, m| &acc + &m)
        .expect("nonempty");
    sum.max_abs_diff(&ComplexMatrix::identity(first.dim()))
}

/// A channel whose Kraus operators depend on an evolution time.
pub trait ChannelFamily {
    fn dim(&self) -> usize;

    fn at(&self, duration: f64) -> Result<QuantumChannel>;
}

/// A fixed channel is its own value at every duration.
impl ChannelFamily for QuantumChannel {
    fn dim(&self) -> usize {
        QuantumChannel::dim(self)
    }

    fn at(&self, _duration: f64) -> Result<QuantumChannel> {
        Ok(self.clone())
    }
}

/// Closed evolution `K(t) = exp(−i H t)` under a time-independent generator.
#[derive(Clone, Debug)]
pub struct UnitaryEvolution {
    label: String,
    spectrum: HermitianSpectrum,
}

impl UnitaryEvolution {
    pub fn new(label: impl Into<String>, generator: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            spectrum: HermitianSpectrum::new(generator)?,
        })
    }

    pub fn kraus_at(&self, duration: f64) -> ComplexMatrix {
        self.spectrum.exp_minus_i(duration)
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }
}

impl ChannelFamily for UnitaryEvolution {
    fn dim(&self) -> usize {
        self.spectrum.eigenvalues().len()
    }

    fn at(&self, duration: f64) -> Result<QuantumChannel> {
        QuantumChannel::unitary(self.label.clone(), self.kraus_at(duration))
    }
}

/// Switch Kraus set for total duration `t`: both families are evaluated at
/// `t/2`. The result is ordered with ℳ's index major.
pub fn build_switch_kraus(
    m: &impl ChannelFamily,
    n: &impl ChannelFamily,
    t: f64,
) -> Result<Vec<ComplexMatrix>> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    switch_kraus(&m.at(t / 2.0)?, &n.at(t / 2.0)?)
}

/// Switch Kraus set for channels already evaluated at their per-slot duration.
pub fn switch_kraus(m: &QuantumChannel, n: &QuantumChannel) -> Result<Vec<ComplexMatrix>> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: n.dim(),
        });
    }
    let p0 = projector(&Ket::zero())?;
    let p1 = projector(&Ket::one())?;
    let mut out = Vec::with_capacity(m.kraus().len() * n.kraus().len());
    for km in m.kraus() {
        for kn in n.kraus() {
            let m_after_n = km * kn;
            let n_after_m = kn * km;
            out.push(&kron(&p1, &m_after_n) + &kron(&p0, &n_after_m));
        }
    }
    Ok(out)
}

/// `Σ V (ρ_C ⊗ ρ_target) V†` over the switch Kraus set.
pub fn apply_switch(
    rho_c: &DensityMatrix,
    rho_target: &DensityMatrix,
    v_set: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    if rho_c.qubit_count() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_c.dim(),
        });
    }
    let joint_dim = 2 * rho_target.dim();
    if let Some(bad) = v_set.iter().find(|v| v.dim() != joint_dim) {
        return Err(Error::DimensionMismatch {
            expected: joint_dim,
            found: bad.dim(),
        });
    }
    let residual = completeness_residual(v_set);
    if residual > tolerance::COMPLETENESS {
        return Err(Error::IncompleteChannel { residual });
    }
    let rho = kron(rho_c.matrix(), rho_target.matrix());
    let out = v_set
        .iter()
        .map(|v| rho.conjugate_by(v))
        .reduce(|acc, m| &acc + &m)
        .expect("nonempty Kraus set");
    DensityMatrix::from_computed(out, rho_c.is_trace_normalized() && rho_target.is_trace_normalized())
}

/// Outcome of the control measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Precondition(format!("unknown sign {other:?}"))),
        }
    }
}

/// Orthonormal basis for the control measurement, one ket per [`Sign`].
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    plus: Ket,
    minus: Ket,
}

impl MeasurementBasis {
    pub fn new(plus: Ket, minus: Ket) -> Result<Self> {
        for k in [&plus, &minus] {
            if k.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: k.dim(),
                });
            }
            if (k.norm() - 1.0).abs() > tolerance::KET_NORM {
                return Err(Error::NotNormalized { norm: k.norm() });
            }
        }
        if plus.inner(&minus).norm() > tolerance::EQ {
            return Err(Error::Precondition("measurement kets are not orthogonal".into()));
        }
        Ok(Self { plus, minus })
    }

    pub fn ket(&self, sign: Sign) -> &Ket {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

impl Default for MeasurementBasis {
    /// `{|+⟩, |−⟩}`.
    fn default() -> Self {
        Self {
            plus: Ket::plus(),
            minus: Ket::minus(),
        }
    }
}

/// A post-selected, renormalized target state.
#[derive(Clone, Debug)]
pub struct SwitchOutcome {
    pub sign: Sign,
    pub probability: f64,
    pub reduced_state: DensityMatrix,
}

/// Unnormalized target branch `Tr_C[(|s⟩⟨s| ⊗ I) ρ (|s⟩⟨s| ⊗ I)]`; its trace
/// is the outcome probability.
pub fn branch(rho_cab: &DensityMatrix, basis: &MeasurementBasis, sign: Sign) -> Result<DensityMatrix> {
    let n = rho_cab.qubit_count();
    if n < 2 {
        return Err(Error::Precondition(
            "post-selection needs a control qubit and at least one target qubit".into(),
        ));
    }
    let p = kron(
        &projector(basis.ket(sign))?,
        &ComplexMatrix::identity(rho_cab.dim() / 2),
    );
    let projected = &(&p * rho_cab.matrix()) * &p;
    let projected = DensityMatrix::from_computed(projected, false)?;
    let keep: Vec<usize> = (1..n).collect();
    partial_trace(&projected, &keep)
}

/// Measures the control in `{|+⟩, |−⟩}` and keeps the `sign` branch.
pub fn postselect(rho_cab: &DensityMatrix, sign: Sign) -> Result<SwitchOutcome> {
    postselect_in(rho_cab, &MeasurementBasis::default(), sign)
}

pub fn postselect_in(
    rho_cab: &DensityMatrix,
    basis: &MeasurementBasis,
    sign: Sign,
) -> Result<SwitchOutcome> {
    let unnormalized = branch(rho_cab, basis, sign)?;
    let probability = unnormalized.trace();
    if probability < tolerance::EMPTY_BRANCH {
        return Err(Error::EmptyBranch {
            probability,
            threshold: tolerance::EMPTY_BRANCH,
        });
    }
    Ok(SwitchOutcome {
        sign,
        probability,
        reduced_state: unnormalized.normalized()?,
    })
}
