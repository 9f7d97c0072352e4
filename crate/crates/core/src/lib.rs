//! Exact and asymptotic computation engine for the six-vertex model with
//! domain wall boundary conditions, in the disordered phase.
//!
//! The partition function is computed exactly at finite N through the
//! Izergin determinant formula (a Hankel determinant of derivatives of
//! the weight symbol), cross-checked against brute-force enumeration of
//! alternating sign matrices, and compared with the closed-form large-N
//! asymptotics: recurrence-coefficient expansions, free energy, and the
//! power-law exponent of `Z_N ~ C N^kappa e^{N^2 f}`.

pub mod asm_exact;
pub mod asymptotics;
pub mod enumerate;
pub mod equilibrium;
pub mod error;
pub mod hankel;
pub mod jet;
pub mod params;
pub mod quad;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use params::{make_params, make_params_f64, Angle, ModelParams, VertexWeights};
pub use scalar::{Big, Scalar};

/// Double-precision alias used by the fast (non-certified) paths.
pub type Real = f64;
