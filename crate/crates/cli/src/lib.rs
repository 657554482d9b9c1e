//! Argument types, commands and report formats behind the `ptbrach` binary.

// `!(x < tol)` is deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod report;

pub use args::{Cli, Command};
pub use commands::run;
pub use report::{Format, Status};
