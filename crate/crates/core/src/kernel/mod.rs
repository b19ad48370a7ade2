//! Exact arithmetic: coefficient domains, polynomials, factorization, and linear algebra
//! over fields and over Z.

pub mod domain;
pub mod factor;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod snf;

pub use domain::{Domain, ExtensionField, Rational, Scalar};
pub use factor::{is_irreducible, poly_factor, squarefree_decomposition};
pub use linalg::{Echelon, Subspace};
pub use matrix::{vec_ops, Matrix, Vector};
pub use poly::Poly;
