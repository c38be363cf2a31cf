//! Core objects built from a validated configuration.

use mixfrac_core::functionals::{ProblemParams, WeightModel, WeightPeak};
use mixfrac_core::instanton::TruncatedInstanton;
use mixfrac_core::spectral::{EigenBasis, FractionalParams, MixedRectangleDomain};
use mixfrac_core::Result;

use crate::config::RunConfig;

pub fn frac(c: &RunConfig) -> Result<FractionalParams> {
    FractionalParams::new(c.problem.s[0], c.problem.dims[0] as usize)
}

pub fn domain(c: &RunConfig) -> Result<MixedRectangleDomain> {
    MixedRectangleDomain::new(c.domain.lengths.clone(), &c.domain.dirichlet)
}

pub fn problem(c: &RunConfig, lambda: f64) -> Result<ProblemParams> {
    ProblemParams::new(lambda, c.problem.q.unwrap_or(1.0), frac(c)?)
}

pub fn weight(c: &RunConfig, d: &MixedRectangleDomain) -> Result<WeightModel> {
    let w = &c.weight;
    if w.centers.is_empty() {
        return WeightModel::constant(w.q_max);
    }
    let peaks = w
        .centers
        .iter()
        .map(|x| WeightPeak { center: x.clone(), coeff: w.coeff.unwrap_or(1.0), gamma: w.gamma.unwrap_or(1.0) })
        .collect();
    WeightModel::new(d, w.q_max, w.background.unwrap_or(1.0), peaks, w.alpha.unwrap_or(1.0))
}

/// Basis with `modes` per axis; the configured quadrature count applies to single-level runs.
pub fn basis(c: &RunConfig, d: &MixedRectangleDomain, modes: usize) -> Result<EigenBasis> {
    let q = match c.solver.quad_points {
        Some(q) if c.solver.levels.is_empty() => q as usize,
        _ => EigenBasis::recommended_quad_points(modes),
    };
    EigenBasis::new(d, modes, q)
}

/// Mesh levels of a run: `levels` when given, else the single `modes`.
pub fn levels(c: &RunConfig) -> Vec<usize> {
    if c.solver.levels.is_empty() {
        vec![c.solver.modes as usize]
    } else {
        c.solver.levels.iter().map(|m| *m as usize).collect()
    }
}

/// Instanton center: configured, else the first weight maximum, else the Neumann face
/// midpoint farthest from the Dirichlet part.
pub fn instanton_center(c: &RunConfig, d: &MixedRectangleDomain) -> Vec<f64> {
    if let Some(x) = &c.instanton.center {
        return x.clone();
    }
    if let Some(x) = c.weight.centers.first() {
        return x.clone();
    }
    d.neumann_faces()
        .into_iter()
        .map(|f| d.face_midpoint(f))
        .fold((f64::NEG_INFINITY, Vec::new()), |best, x| {
            let r = d.distance_to_dirichlet(&x);
            if r > best.0 {
                (r, x)
            } else {
                best
            }
        })
        .1
}

pub fn rho(c: &RunConfig, d: &MixedRectangleDomain, center: &[f64]) -> f64 {
    c.instanton.rho.unwrap_or_else(|| TruncatedInstanton::default_rho(d, center))
}

/// eps = rho 2^{-k} for the configured exponents.
pub fn eps_sweep(c: &RunConfig, rho: f64) -> Vec<f64> {
    c.instanton.eps_exponents.iter().map(|k| rho * 0.5f64.powi(*k as i32)).collect()
}
