//! Simulation toolkit for a pair of identical two-level emitters coupled to
//! the two directions of a waveguide, with a propagation phase between them.
//!
//! The library carries three layers:
//!
//! * closed-form layer: decay rates, the no-click propagator, single- and
//!   two-photon emission amplitudes, directionality and bunching ratios,
//!   N00N-state projections ([`params`], [`ops`], [`expsum`], [`one_photon`],
//!   [`two_photon`]);
//! * a time-bin collision simulator that reproduces the closed forms at
//!   first order in the bin width ([`collision`]);
//! * a click-trajectory Monte Carlo for heralding protocols ([`trajectory`]).
//!
//! Basis order for the qubit pair is fixed everywhere: `ee, eg, ge, gg`,
//! with the first letter naming qubit 1. Internally `gamma = 1` is assumed
//! nowhere; all formulas carry `gamma` explicitly, but the CLI defaults it
//! to 1 so times are in units of `1/gamma`.
//!
//! Run `cargo run --example <name>` for worked demonstrations of each
//! capability; the `wqed` binary exposes the same operations as subcommands.

pub mod collision;
pub mod config;
pub mod error;
pub mod expsum;
pub mod one_photon;
pub mod ops;
pub mod params;
pub mod report;
pub mod states;
pub mod sweep;
pub mod trajectory;
pub mod two_photon;

pub use error::Error;
pub use expsum::ExpSum;
pub use ops::Operator4;
pub use params::{ConditionClass, Rates, SystemParams};
pub use states::QubitVector;

/// Shorthand used throughout; matches the convention of the numeric stack.
pub type C64 = num_complex::Complex64;
