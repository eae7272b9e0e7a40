//! Numerics for weighted Dirichlet integrals on the unit disk and the
//! de Branges–Rovnyak spaces attached to them.
//!
//! Holomorphic data is carried by truncated Taylor polynomials and rational
//! functions ([`series`]). Area integrals use a graded polar Gauss–Legendre
//! rule ([`quadrature`]); weights are described by their representing measures
//! ([`weights`]). The [`dirichlet`] and [`debranges`] modules compute the two
//! norms that are compared by the verification suites in [`verify`].

pub mod debranges;
pub mod dirichlet;
mod error;
pub mod quadrature;
pub mod series;
pub mod trace;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
