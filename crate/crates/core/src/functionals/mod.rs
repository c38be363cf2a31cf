//! Problem parameters, the weight, the energy and its gradient, and the Sobolev
//! constants that fix the compactness threshold.

mod energy;
mod params;
mod sobolev;
pub mod weight;

pub use energy::{energy, gradient, Functional, Gradient, Integrals, ResolutionCheck, RESOLUTION_TOL};
pub use params::{flatness_regime, required_alpha, AlphaRequirement, FlatnessRegime, ProblemParams};
pub use sobolev::{
    c_star_from, default_seeds, estimate_sigma_d_constant, rayleigh_quotient, threshold_c_star, SeedRun,
    SobolevOptions, SobolevRegime, ThresholdReport, REGIME_TOL,
};
pub use weight::{WeightModel, WeightPeak};

pub use crate::spectral::{critical_exponent, sobolev_constant};
