//! Transport of a spinful matter wave through a strong localized
//! spin-orbit-coupled condensate on a one-dimensional lattice.
//!
//! The library covers the full pipeline:
//!
//! - [`spinor`]: exact complex 2-vector / 2x2 algebra (Pauli matrices, the
//!   per-hop spin rotation, spin expectation vectors);
//! - [`modes`]: the four degenerate transmission branches and the localized
//!   condensate mode with its eigenenergy, decay, and spin textures;
//! - [`scattering`]: closed-form scattering amplitudes with pole-safe
//!   evaluation and flux diagnostics;
//! - [`criticals`]: transparency / blockade / isolation / conversion operating
//!   points and `(g, lambda)` feasibility maps;
//! - [`oracle`]: an independent 12x12 real-linear solver of the coupled
//!   linearized equations, used to validate every closed-form amplitude;
//! - [`simulator`]: nonlinear time-domain wavepacket runs with spin-resolved
//!   population measurement;
//! - [`presets`]: the canonical published parameter sets as ready-to-run jobs.

pub mod criticals;
pub mod error;
pub mod modes;
pub mod oracle;
pub mod presets;
pub mod scattering;
pub mod simulator;
pub mod spinor;

pub use error::{Error, Result};
pub use modes::{
    spin_basis, transmission_mode, transmission_spin_texture, Branch, LocalizedMode,
    SpinBasisAngles, SystemParams, TransmissionMode,
};
pub use scattering::{flux_residual, mu_of_omega, s_matrix, SMatrix, XYIntermediates};
pub use spinor::{pauli, rotation_matrix, spin_expectation, Axis, Mat2, SpinVector, Spinor};
