//! Cyclotron dynamics of relativistic Dirac wave packets in a uniform magnetic field.
//!
//! Everything here is built on the Landau eigenbasis of the 2+1 Dirac Hamiltonian
//! (`p_z = 0`). Packets are finite superpositions of eigenmodes, so every field and
//! expectation value is a truncated series. Two routes exist for each quantity:
//! the grouped closed forms in [`fields`] and [`observables`], and the ungrouped
//! mode sum plus grid quadrature in [`oracle`]. The two are cross-checked in the
//! test suite and by `dirac-cyclotron validate`.
//!
//! Unit convention used throughout:
//!
//! | quantity | unit |
//! |----------|------|
//! | length   | magnetic length `a` |
//! | time     | `λ/c` (so `τ = ct/λ`) |
//! | energy   | `mc²` |
//! | velocity | `c` |
//! | spin     | `ħ/2` |

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cli;
pub mod error;
pub mod exec;
pub mod fields;
pub mod grid;
pub mod observables;
pub mod oracle;
pub mod spectral;
pub mod spectrum;
pub mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
