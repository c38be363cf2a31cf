//! Mixed Dirichlet-Neumann rectangles, their closed-form Laplacian eigenbases,
//! and the spectral fractional power.

mod basis;
mod domain;
mod field;
mod params;
pub mod tensor;

pub use basis::{EigenBasis, ORTHONORMALITY_TOL};
pub use domain::{AxisKind, BoundaryKind, Face, MixedRectangleDomain, Side};
pub use field::{
    analyze, apply_fractional, build_basis, first_fractional_eigenvalue, grid_integral, grid_lp_norm, hs_norm,
    hs_norm_sq, lp_norm, synthesize, SpectralField,
};
pub(crate) use field::weighted_sum_sq;
pub use params::{critical_exponent, ks_constant, sobolev_constant, FractionalParams};
