//! Lower bounds on distillable entanglement from two-basis measurement
//! statistics.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: labeled-basis complex linear algebra (states, density
//!   operators, partial traces, entropies, eigensolves, time evolution and
//!   bosonic Fock-basis enumeration).
//! - [`measure`]: measurement bases, joint outcome distributions, classical
//!   conditional entropies and basis overlaps.
//! - [`bounds`]: complementarity factors and the assembled [`BoundReport`].
//! - [`lattice`]: two distinguishable particles on an open chain.
//! - [`spin1`]: the split collective spin-1 ensemble.
//! - [`optimize`]: derivative-free maximisation of detected bounds.
//! - [`random`]: seeded random states, unitaries and bases.
//!
//! All entropies are in bits unless converted explicitly with
//! [`qcore::LogBase`].

pub mod bounds;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod optimize;
pub mod qcore;
pub mod random;
pub mod spin1;

pub use bounds::BoundReport;
pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = nalgebra::Complex<f64>;
