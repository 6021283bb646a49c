//! Finite block-length bounds for simultaneous information and energy
//! transmission (SIET) over the discrete-time complex AWGN channel with a
//! finite, layered set of channel input symbols.
//!
//! The crate evaluates both sides of the four-way trade-off between
//! information rate `R`, energy rate `B`, decoding-error probability (DEP,
//! `epsilon`) and energy-outage probability (EOP, `delta`):
//!
//! * [`impossibility`] — bounds no code over a given constellation can beat:
//!   a pairwise-distance DEP lower bound, exact and entropy-form rate upper
//!   bounds for constant-composition codes, and the outage step rule capping
//!   the energy rate.
//! * [`achievability`] — what the constructed layered-constellation code
//!   family attains with circular decoding sets: exact DEP, per-layer symbol
//!   caps, rate and energy-rate values, and the probability vectors that
//!   maximize rate or energy.
//! * [`sim`] — a seedable Monte Carlo channel simulator whose minimum-distance
//!   and circular-region decoders serve as empirical oracles for the closed
//!   forms.
//!
//! Supporting modules: [`numerics`] (log-domain combinatorics, Gaussian
//! tail), [`constellation`] (layered symbol geometry), [`code`]
//! (constant-composition codebooks and types), [`energy`] (nonlinear
//! harvester model and outage profiles).
//!
//! Amplitudes and energies are unit-agnostic; callers pick the scale.

pub mod achievability;
pub mod code;
pub mod constellation;
pub mod energy;
mod error;
pub mod impossibility;
pub mod numerics;
pub mod sim;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
