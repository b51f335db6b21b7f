//! Machinery for mean-square sums of symmetric-power Hecke eigenvalues
//! weighted by six-square representation counts.
//!
//! The crate builds, exactly where exactness is possible and with a
//! documented tolerance ladder where it is not:
//!
//! - [`modform`]: exact tau(n) tables for the discriminant form and their
//!   normalized eigenvalues;
//! - [`sympow`]: symmetric-power coefficient tables from Satake angles;
//! - [`lattice`]: six-square representation counts r6(n) and the divisor
//!   weights l(n), v(n), with a lattice-enumeration oracle;
//! - [`dirichlet`]: finite Dirichlet-coefficient algebra (convolution,
//!   division, weight shift) and the F = G.H factorization checks;
//! - [`lvalues`]: numerical L-values and the constant c(j);
//! - [`asymptotics`]: compensated large-scale accumulation of the weighted
//!   sums and convergence diagnostics.

pub mod asymptotics;
pub mod config;
pub mod dirichlet;
pub mod error;
pub mod lattice;
pub mod lvalues;
pub mod modform;
pub mod sieve;
pub mod summation;
pub mod sympow;

pub use config::{Limits, Tolerances};
pub use error::{Error, Result};
