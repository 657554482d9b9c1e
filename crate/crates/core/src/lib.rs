//! Time-optimal state transfer for two-level quantum systems.
//!
//! Under a fixed eigenvalue gap `ω`, Hermitian Hamiltonians need a finite
//! time to move `(1, 0)` to a target state, while PT-symmetric Hamiltonians
//! with unbroken symmetry can do it in an arbitrarily short time. The crate
//! provides closed forms for both, independent numerical oracles for every
//! closed form, and the verification suites run by the `ptbrach` CLI.

// `!(x < tol)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brachsolver;
pub mod error;
pub mod hermitian;
pub mod linalg2;
pub mod ptcore;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
