//! Numerical tolerances shared by every module and test.
//!
//! All comparisons are absolute.

/// Default equality tolerance for derived matrix identities.
pub const EQ: f64 = 1e-10;

/// Entrywise `A = A†` tolerance for stored Hermitian matrices and density matrices.
pub const HERMITIAN: f64 = 1e-12;

/// Hermiticity slack accepted on generator input to the matrix exponential.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// Lowest eigenvalue a density matrix may have.
pub const PSD_SLACK: f64 = 1e-10;

/// Trace slack for normalized (and sub-normalized) states.
pub const TRACE: f64 = 1e-10;

/// `‖A†A − I‖_max` bound for unitaries.
pub const UNITARY: f64 = 1e-10;

/// Norm slack for kets fed to [`crate::matquant::projector`].
pub const KET_NORM: f64 = 1e-12;

/// Completeness residual above which a Kraus set is rejected by the switch.
pub const COMPLETENESS: f64 = 1e-8;

/// Post-selection probability below which a branch counts as empty.
pub const EMPTY_BRANCH: f64 = 1e-12;

/// Tolerance for the structural checks on the post-selected state.
pub const STRUCTURE: f64 = 1e-8;

/// Minimum branch probability for the maximal-entanglement checks.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-6;

/// Imaginary part allowed on the spectrum of the Wootters operator.
pub const SPECTRUM_IMAG: f64 = 1e-9;

/// Time resolution of the golden-section refinement.
pub const TIME_REFINEMENT: f64 = 1e-9;
