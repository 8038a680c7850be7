//! Calderón projectors, boundary-data spaces and Dirichlet-to-Neumann symbols for elliptic
//! model operators on fibred-cusp geometries.
//!
//! Three levels are covered: the interior principal symbol ([`symbol`]), the normal family on
//! the boundary fibre ([`normal`]) and a fully discrete finite-difference realization
//! ([`discrete`]). [`extension`] holds the finite-dimensional algebra of augmentation,
//! modification and invertible extension that the other levels rely on.
//!
//! The numerical code is generic over the real scalar ([`Real`], implemented for `f32` and
//! `f64`); the aliases below fix double precision for the common case.

pub mod config;
pub mod discrete;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod model;
pub mod normal;
pub mod oracle;
pub mod scalar;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type CMat64 = linalg::CMatrix<f64>;
pub type Projector64 = linalg::Projector<f64>;
pub type Subspace64 = linalg::SubspaceBasis<f64>;
pub type PolyMatrixSymbol64 = symbol::PolyMatrixSymbol<f64>;
pub type ModelOperator64 = model::ModelOperator<f64>;
