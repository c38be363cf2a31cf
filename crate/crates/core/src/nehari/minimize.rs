use super::project::{barycenter_from_grid, nehari_project};
use crate::error::{Error, Result};
use crate::functionals::weight::dist;
use crate::functionals::Functional;
use crate::spectral::{analyze, synthesize, SpectralField};

/// Gradient norm at which a run counts as converged.
pub const GRAD_TOL: f64 = 1e-8;
/// Smallest grid value a positive solution may show.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    NotConverged,
    BasinEscape,
}

impl SolveStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::NotConverged => "not_converged",
            SolveStatus::BasinEscape => "basin_escape",
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    /// ||u||^2_{H^s}
    pub hs_sq: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub field: SpectralField,
    pub energy: f64,
    pub grad_norm: f64,
    pub barycenter: Vec<f64>,
    pub basin_index: usize,
    pub positivity_min: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub history: Vec<IterRecord>,
}

impl SolutionRecord {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub budget: usize,
    pub grad_tol: f64,
    /// Basin radius; defaults to the weight's r_0.
    pub r0: Option<f64>,
    /// Polak-Ribiere conjugate directions instead of plain steepest descent.
    pub conjugate: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { budget: 4000, grad_tol: GRAD_TOL, r0: None, conjugate: true }
    }
}

/// Replaces u by the analysis of |u| when the grid dips below -POSITIVITY_TOL.
fn make_nonnegative(u: SpectralField, f: &Functional) -> Result<SpectralField> {
    let v = synthesize(&u, f.basis)?;
    if v.iter().any(|x| *x < -POSITIVITY_TOL) {
        let a: Vec<f64> = v.into_iter().map(f64::abs).collect();
        return analyze(&a, f.basis);
    }
    Ok(u)
}

struct State {
    u: SpectralField,
    values: Vec<f64>,
    energy: f64,
    hs_sq: f64,
}

fn state_from(u: SpectralField, f: &Functional) -> Result<State> {
    let u = make_nonnegative(u, f)?;
    let np = nehari_project(&u, f)?;
    let values = synthesize(&np.field, f.basis)?;
    let i = f.integrals_from_grid(&np.field, &values);
    Ok(State { u: np.field, values, energy: f.energy_from_integrals(&i), hs_sq: i.hs_sq })
}

/// Basin center and radius for `basin`; None for a constant weight.
pub(crate) fn basin_of(f: &Functional, basin: usize, r0: Option<f64>) -> Result<Option<(Vec<f64>, f64)>> {
    if f.weight.is_constant() {
        if basin != 0 {
            return Err(Error::InvalidParameter("a constant weight has a single basin 0".into()));
        }
        return Ok(None);
    }
    let centers = f.weight.maxima();
    let c = centers
        .get(basin)
        .ok_or_else(|| Error::InvalidParameter(format!("basin {basin} out of range ({} maxima)", centers.len())))?;
    Ok(Some((c.clone(), r0.unwrap_or_else(|| f.weight.default_r0()))))
}

/// Preconditioned descent of J on the Nehari manifold, re-projecting after every step and
/// replacing u by |u| whenever the grid shows a sign change beyond `POSITIVITY_TOL`.
pub fn minimize_on_nehari(seed: &SpectralField, basin: usize, f: &Functional, opts: &MinimizeOptions) -> Result<SolutionRecord> {
    if seed.len() != f.basis.len() {
        return Err(Error::ShapeMismatch { expected: f.basis.len(), got: seed.len() });
    }
    let frac = f.params.frac;
    let target = basin_of(f, basin, opts.r0)?;
    let mut st = state_from(seed.clone(), f)?;
    if let Some((c, r0)) = &target {
        let b = barycenter_from_grid(&st.values, &frac, f.basis);
        if dist(&b, c) >= *r0 {
            return Err(Error::InvalidParameter(format!(
                "seed barycenter {b:?} is not within r0 = {r0} of maximum {basin} at {c:?}"
            )));
        }
    }
    let mut history = Vec::new();
    let mut status = SolveStatus::NotConverged;
    let mut prev: Option<(SpectralField, SpectralField, f64)> = None; // (pre, direction, dual.pre)
    let mut tau = 1.0;
    let mut grad = f.gradient_from_grid(&st.u, &st.values)?;
    let mut it = 0;
    loop {
        let gn2 = grad.dual.dot(&grad.preconditioned);
        let gn = gn2.max(0.0).sqrt();
        history.push(IterRecord { iter: it, energy: st.energy, grad_norm: gn, hs_sq: st.hs_sq, step: tau });
        if gn < opts.grad_tol {
            status = SolveStatus::Converged;
            break;
        }
        if it >= opts.budget {
            break;
        }
        it += 1;
        let steepest = grad.preconditioned.scaled(-1.0);
        let mut dir = steepest.clone();
        if opts.conjugate {
            if let Some((pre_old, d_old, g2_old)) = &prev {
                let y = grad.preconditioned.axpy(-1.0, pre_old);
                let beta = (grad.dual.dot(&y) / g2_old).max(0.0);
                let cand = steepest.axpy(beta, d_old);
                if grad.dual.dot(&cand) < -1e-3 * gn2 {
                    dir = cand;
                }
            }
        }
        let slope = grad.dual.dot(&dir);
        // Below this predicted decrease the energy comparison is roundoff; compare gradients instead.
        let noise = 1e3 * f64::EPSILON * st.energy.abs();
        let resolvable = -slope > noise;
        let slack = 8.0 * f64::EPSILON * st.energy.abs();
        let mut t = (2.0 * tau).min(1.0);
        let mut accepted = None;
        while t > 1e-14 {
            let trial = state_from(st.u.axpy(t, &dir), f)?;
            if resolvable {
                if trial.energy <= st.energy + 1e-4 * t * slope + slack {
                    accepted = Some((trial, None));
                    break;
                }
            } else {
                let g = f.gradient_from_grid(&trial.u, &trial.values)?;
                if trial.energy <= st.energy + noise && g.norm() < gn {
                    accepted = Some((trial, Some(g)));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, next_grad)) = accepted else {
            if prev.take().is_some() {
                // restart from steepest descent before giving up
                it -= 1;
                history.pop();
                continue;
            }
            break;
        };
        tau = t;
        prev = Some((grad.preconditioned.clone(), dir, gn2));
        st = next;
        grad = match next_grad {
            Some(g) => g,
            None => f.gradient_from_grid(&st.u, &st.values)?,
        };
        if let Some((c, r0)) = &target {
            let b = barycenter_from_grid(&st.values, &frac, f.basis);
            if dist(&b, c) >= *r0 {
                status = SolveStatus::BasinEscape;
                let gn = grad.norm();
                history.push(IterRecord { iter: it, energy: st.energy, grad_norm: gn, hs_sq: st.hs_sq, step: tau });
                break;
            }
        }
    }
    let last = *history.last().expect("history holds the seed");
    Ok(SolutionRecord {
        barycenter: barycenter_from_grid(&st.values, &frac, f.basis),
        positivity_min: st.values.iter().cloned().fold(f64::INFINITY, f64::min),
        energy: st.energy,
        grad_norm: last.grad_norm,
        field: st.u,
        basin_index: basin,
        status,
        iterations: it,
        history,
    })
}
