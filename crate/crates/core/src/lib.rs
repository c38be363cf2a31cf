//! Spectral fractional Laplacian with mixed Dirichlet-Neumann boundary conditions
//! on axis-aligned boxes, and the variational machinery built on it.

pub mod error;
pub mod extension;
pub mod functionals;
pub mod instanton;
pub mod nehari;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{EigenBasis, FractionalParams, MixedRectangleDomain, SpectralField};
