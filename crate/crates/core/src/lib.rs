//! Quasi-exactly solvable bound states of singular inverse-power radial
//! potentials, built by solving Bethe ansatz equations and checked against
//! independent oracles.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bethe;
pub mod document;
pub mod error;
pub mod families;
pub mod oracle;
pub mod poly;
pub mod wavefunction;

pub use error::{QesError, Result};
