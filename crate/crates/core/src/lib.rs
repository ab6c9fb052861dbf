//! Weak-field photon statistics for a single atom with quantized axial motion
//! in a driven optical cavity.
//!
//! The atom sits at the bottom of a harmonic lattice well located at a cavity
//! antinode. Each bound vibronic level `l` of the combined lattice/coupling
//! potential couples only to itself, so at lowest order in the drive every
//! level behaves as a Jaynes-Cummings system whose dressed splitting grows
//! linearly with `l`. This crate evaluates, in closed form,
//!
//! - the steady-state dressed amplitudes up to two excitations,
//! - the state conditioned on a transmitted or fluorescent photon detection,
//! - the conditioned one-excitation evolution,
//! - `g2(tau)` and `h_theta(tau)` for both detection channels,
//!
//! and checks them against a brute-force integrator of the bare-basis
//! non-Hermitian amplitude equations ([`oracle`]). [`nonclassicality`]
//! classifies a correlation curve against the classical-field inequalities.
//!
//! All rates are in units of the atomic linewidth `gamma`, times in `1/gamma`.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod conditioning;
pub mod correlators;
mod error;
pub mod nonclassicality;
pub mod oracle;
pub mod propagator;
pub mod states;
pub mod steady_state;

pub use num_complex::Complex64 as C64;

pub use basis::{BareAmplitudes, DressedAmplitudes, Manifold, Sign, SystemParams};
pub use conditioning::{Channel, ConditionedState};
pub use correlators::{CorrelationSeries, Correlator, CorrelatorOptions, Kind, TauGrid};
pub use error::{Error, Result};
pub use nonclassicality::{ViolationKind, ViolationReport};
pub use oracle::IntegrationConfig;
pub use states::{MotionalState, StateSpec};
pub use steady_state::SteadyState;
