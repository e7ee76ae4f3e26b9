//! Density-matrix simulation of entanglement generation through a quantum
//! switch.
//!
//! Two qubits that never interact are each driven locally by one of two
//! processes, ℳ (a σ_x drive on qubit A) and 𝒩 (a σ_x drive on qubit B). A
//! control qubit prepared in `|+⟩` places the two processes in a superposition
//! of both orders. Measuring the control in `{|+⟩, |−⟩}` and keeping the `−`
//! outcome leaves A and B in an entangled state, maximally entangled whenever
//! the drive strengths satisfy `R² = 1`.
//!
//! Modules, bottom-up:
//!
//! - [`matquant`]: complex matrices, kets, density matrices, tensor products,
//!   partial traces and spectral matrix exponentials.
//! - [`switch`]: Kraus channels, the switch construction and post-selection.
//! - [`protocol`]: the concrete Hamiltonians and drives, closed-form success
//!   probability, and the structural checks on the post-selected state.
//! - [`entanglement`]: Wootters concurrence and Bell-state fidelity.
//! - [`sweep`]: the `(R, K)` grid experiment and its CSV output.
//!
//! ```
//! use qswitch::matquant::DensityMatrix;
//! use qswitch::protocol::{run_protocol, ProtocolParams};
//! use qswitch::entanglement::concurrence;
//! use qswitch::switch::Sign;
//!
//! let params = ProtocolParams::demo(); // ω_z = 1/2, χ = 1, t = 2
//! let initial = DensityMatrix::from_bits("00")?;
//! let outcome = run_protocol(&params, &initial, Sign::Minus)?;
//! assert!((concurrence(&outcome.reduced_state)?.value - 1.0).abs() < 1e-8);
//! # Ok::<(), qswitch::Error>(())
//! ```

pub mod entanglement;
pub mod error;
pub mod matquant;
pub mod protocol;
pub mod sweep;
pub mod switch;
pub mod tolerance;

pub use error::{Error, Result};

// Compile and run the guide's code samples as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/switch.md")]
    mod switch {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/sweep.md")]
    mod sweep {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
