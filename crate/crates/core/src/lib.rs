//! Exact algorithms for bilinear maps, finite-dimensional rings over fields and Z,
//! and nilpotent Lie rings with their Mal'cev groups.

pub mod abelian;
pub mod artinian;
pub mod bilinear;
pub mod error;
pub mod finite;
pub mod kernel;
pub mod malcev;
pub mod rings;
pub mod scalars;

pub use error::{Error, Result};
