//! How large is a quantum superposition, measured by what a coarse pointer can learn?
//!
//! A state is spread over eigenvalues `a_ℓ` of an observable `A` with weights `p_ℓ`. A pointer
//! of width `Δ` reads `A`; its mutual information `I_Δ(A:ℓ)` with the branch label falls as
//! `Δ` grows. The size `MIC_b` is the largest width that still yields `b` bits.
//!
//! - [`mutual_info`]: `I_Δ` for square and Gaussian pointers, and `MIC_b`.
//! - [`peaks`]: closed forms for equally weighted, equally spaced peaks.
//! - [`roof`]: convex-roof extensions to mixed states, the analytic qubit roof, Fisher-information bounds.
//! - [`discord`]: `C_Δ = S(Φ^Δ ρ) − S(ρ)`, its mutual-information form and weak-pointer limit.
//! - [`fragility`]: decay of micro–macro entanglement when an environment reads `A`.
//! - [`pointers`]: pointer models and the partial dephasing channel `Φ^Δ`.
//! - [`cli`]: the `macromic` command-line front end.
//!
//! ```
//! use macromic::{mic, BranchEnsemble, ObservableSpectrum, PointerKind};
//!
//! let two_peaks = BranchEnsemble::uniform(ObservableSpectrum::new(vec![0.0, 1.0])?);
//! let size = mic(&two_peaks, PointerKind::Square, 0.5)?;
//! assert!((size.delta - 2.0).abs() < 1e-8);
//! # Ok::<(), macromic::MacromicError>(())
//! ```

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod discord;
pub mod error;
pub mod fragility;
pub mod io;
pub mod linalg;
pub mod mutual_info;
pub mod peaks;
pub mod pointers;
pub mod quadrature;
pub mod roof;
pub mod sampling;
pub mod spectra;
pub mod threshold;
pub mod verify;

pub use error::{MacromicError, Result};
pub use mutual_info::{mic, mutual_information, variance_upper_bound, MiMethod, MiResult};
pub use pointers::{DephasingChannel, PointerKind, PointerModel};
pub use spectra::{
    dephase_fully, shannon_entropy, superposition_state, von_neumann_entropy, BranchEnsemble, DensityMatrix,
    MicroMacroState, ObservableSpectrum, PureState,
};
pub use threshold::MicEstimate;
