// `!(x > 0.0)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arnoldi;
pub mod cli;
pub mod cache;
pub mod config;
pub mod contour;
pub mod error;
pub mod linalg;
pub mod lu;
pub mod mtx;
pub mod pencil;
pub mod projector;
pub mod region;
pub mod report;
pub mod search;
pub mod sparse;
pub mod synthetic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
