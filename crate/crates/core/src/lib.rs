//! Totally umbilical surfaces invariant under one-parameter isometry
//! groups of the warped products `M(k)_f x I`.

pub mod discrepancy;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod geometry;
pub mod ode;
pub mod profile;
pub mod surface;
pub mod warp;

pub use error::{Error, Result};
