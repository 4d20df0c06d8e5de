//! Numerical toolkit for a second-order weighted Caffarelli–Kohn–Nirenberg inequality.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod config;
mod dd;
pub mod emden_fowler;
pub mod error;
pub mod extremal;
pub mod identities;
pub mod linalg;
pub mod params;
pub mod profile;
pub mod quadrature;
pub mod scan;
pub mod specfun;
pub mod spectral;
pub mod variation;
pub mod verify;

pub use error::{Error, ParamViolation, Result};
pub use params::{Derived, Params, RegionClass};
