use rayon::prelude::*;

use super::weight::WeightModel;
use crate::error::{Error, Result};
use crate::instanton::TruncatedInstanton;
use crate::spectral::{analyze, synthesize, BoundaryKind, EigenBasis, Face, FractionalParams, Side, SpectralField};

/// Relative slack below the half-space value before the mixed constant counts as smaller.
pub const REGIME_TOL: f64 = 0.02;

/// Whether the mixed Sobolev constant equals its half-space value or falls below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SobolevRegime {
    Equal,
    Below,
}

impl SobolevRegime {
    pub fn label(&self) -> &'static str {
        match self {
            SobolevRegime::Equal => "equal",
            SobolevRegime::Below => "below",
        }
    }
}

/// Outcome of one Rayleigh-quotient descent.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub label: String,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub minimizer: SpectralField,
}

#[derive(Debug, Clone)]
pub struct ThresholdReport {
    /// Best Rayleigh quotient found: the estimate of S(Sigma_D).
    pub s_sigma_d: f64,
    pub s_sn: f64,
    /// 2^{-2s/N} S(s,N)
    pub half_space: f64,
    pub regime: SobolevRegime,
    /// Threshold for Q_M = 1.
    pub c_star: f64,
    pub best_seed: usize,
    /// True when the best run hit its iteration budget.
    pub stale: bool,
    pub runs: Vec<SeedRun>,
    pub frac: FractionalParams,
}

impl ThresholdReport {
    pub fn minimizer(&self) -> &SpectralField {
        &self.runs[self.best_seed].minimizer
    }

    /// Value of S(Sigma_D) entering the threshold: exact half-space value under C_=.
    pub fn effective_constant(&self) -> f64 {
        match self.regime {
            SobolevRegime::Equal => self.half_space,
            SobolevRegime::Below => self.s_sigma_d,
        }
    }
}

/// (s/N) S^{N/2s} / Q_M^{(N-2s)/2s} with S the effective mixed constant.
pub fn threshold_c_star(report: &ThresholdReport, q: &WeightModel) -> f64 {
    c_star_from(report.effective_constant(), &report.frac, q.q_max)
}

pub fn c_star_from(s_sigma_d: f64, frac: &FractionalParams, q_max: f64) -> f64 {
    let n = frac.dim as f64;
    let s = frac.s;
    (s / n) * s_sigma_d.powf(n / (2.0 * s)) / q_max.powf((n - 2.0 * s) / (2.0 * s))
}

/// Options for the multi-start Rayleigh minimization.
#[derive(Debug, Clone)]
pub struct SobolevOptions {
    pub restarts: usize,
    pub budget: usize,
    pub tol: f64,
    pub extra_seeds: Vec<SpectralField>,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self { restarts: usize::MAX, budget: 400, tol: 1e-8, extra_seeds: Vec::new() }
    }
}

/// Labeled default seeds: the lowest mode, instanton traces at Neumann face midpoints,
/// and instanton traces at box vertices where only Neumann faces meet.
pub fn default_seeds(basis: &EigenBasis, frac: &FractionalParams) -> Vec<(String, SpectralField)> {
    let d = basis.domain();
    let mut seeds = vec![("mode1".to_string(), SpectralField::unit(basis.len(), 0))];
    let mut centers: Vec<(String, Vec<f64>)> = d
        .neumann_faces()
        .into_iter()
        .map(|f| (format!("face{}{}", f.axis, side_tag(f.side)), d.face_midpoint(f)))
        .collect();
    for v in 0..(1usize << d.dim()) {
        let corner: Vec<f64> = (0..d.dim()).map(|a| if v >> a & 1 == 1 { d.lengths()[a] } else { 0.0 }).collect();
        let all_neumann = (0..d.dim()).all(|a| {
            let f = if v >> a & 1 == 1 { Face::high(a) } else { Face::low(a) };
            d.kind_of(f) == BoundaryKind::Neumann
        });
        if all_neumann {
            centers.push((format!("corner{v}"), corner));
        }
    }
    for (label, c) in centers {
        let rho = TruncatedInstanton::default_rho(d, &c);
        let eps = rho / 8.0;
        if let Ok(inst) = TruncatedInstanton::new(d, &c, eps, rho, frac) {
            if let Ok(f) = inst.project(basis) {
                seeds.push((label, f));
            }
        }
    }
    seeds
}

fn side_tag(s: Side) -> &'static str {
    match s {
        Side::Low => "lo",
        Side::High => "hi",
    }
}

/// Rayleigh quotient ||u||^2_{H^s} / ||u||^2_{L^{2*}} on the basis grid.
pub fn rayleigh_quotient(u: &SpectralField, frac: &FractionalParams, basis: &EigenBasis) -> Result<f64> {
    let ctx = Rayleigh::new(basis, frac);
    let v = synthesize(u, basis)?;
    Ok(ctx.eval(u, &v).0)
}

struct Rayleigh<'a> {
    basis: &'a EigenBasis,
    ls: Vec<f64>,
    p: f64,
}

impl<'a> Rayleigh<'a> {
    fn new(basis: &'a EigenBasis, frac: &FractionalParams) -> Self {
        Self { basis, ls: basis.eigenvalues().iter().map(|l| l.powf(frac.s)).collect(), p: frac.crit_exp }
    }

    /// (R, A, B) with A = ||u||^2, B = int |u|^p.
    fn eval(&self, u: &SpectralField, values: &[f64]) -> (f64, f64, f64) {
        let a: f64 = u.coeffs.iter().zip(&self.ls).map(|(c, l)| c * c * l).sum();
        let b: f64 = values.iter().zip(self.basis.grid_weights()).map(|(v, w)| w * v.abs().powf(self.p)).sum();
        (a / b.powf(2.0 / self.p), a, b)
    }

    fn descend(&self, label: String, seed: &SpectralField, budget: usize, tol: f64) -> Result<SeedRun> {
        if seed.is_zero() {
            return Err(Error::ZeroField(format!("seed {label}")));
        }
        let mut u = seed.clone();
        let mut vals = synthesize(&u, self.basis)?;
        let (_, _, b0) = self.eval(&u, &vals);
        let sc = b0.powf(-1.0 / self.p);
        u = u.scaled(sc);
        vals.iter_mut().for_each(|v| *v *= sc);
        let (mut r, mut a, mut b) = self.eval(&u, &vals);
        let mut converged = false;
        let mut it = 0;
        let mut tau: f64 = 1.0;
        // previous (gradient, direction, |gradient|^2) for Polak-Ribiere directions
        let mut prev: Option<(Vec<f64>, SpectralField, f64)> = None;
        while it < budget {
            it += 1;
            let nl: Vec<f64> = vals.iter().map(|v| v.signum() * v.abs().powf(self.p - 1.0)).collect();
            let bj = analyze(&nl, self.basis)?;
            let ratio = a / b;
            // steepest direction in the H^s metric (up to a positive factor)
            let g: Vec<f64> =
                u.coeffs.iter().zip(&bj.coeffs).zip(&self.ls).map(|((c, g), l)| ratio * g / l - c).collect();
            let gn2: f64 = g.iter().zip(&self.ls).map(|(x, l)| x * x * l).sum();
            if (gn2 / a).sqrt() < tol {
                converged = true;
                break;
            }
            let mut d = SpectralField { coeffs: g.clone() };
            if let Some((g_old, d_old, g2_old)) = &prev {
                let num: f64 = g.iter().zip(g_old).zip(&self.ls).map(|((x, y), l)| x * (x - y) * l).sum();
                let beta = (num / g2_old).max(0.0);
                let cand = d.axpy(beta, d_old);
                let along: f64 = cand.coeffs.iter().zip(&g).zip(&self.ls).map(|((x, y), l)| x * y * l).sum();
                if along > 1e-3 * gn2 {
                    d = cand;
                }
            }
            let along: f64 = d.coeffs.iter().zip(&g).zip(&self.ls).map(|((x, y), l)| x * y * l).sum();
            let slope = 2.0 * along / b.powf(2.0 / self.p);
            let mut t = (2.0 * tau).min(1.0);
            let mut accepted = false;
            while t > 1e-12 {
                let trial = u.axpy(t, &d);
                let tv = synthesize(&trial, self.basis)?;
                let (tr, _, tb) = self.eval(&trial, &tv);
                if tr <= r - 1e-4 * t * slope {
                    let sc = tb.powf(-1.0 / self.p);
                    u = trial.scaled(sc);
                    vals = tv.into_iter().map(|v| v * sc).collect();
                    let e = self.eval(&u, &vals);
                    r = e.0;
                    a = e.1;
                    b = e.2;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                if prev.take().is_some() {
                    continue;
                }
                // No descent possible at working precision: stationary.
                converged = true;
                break;
            }
            tau = t;
            prev = Some((g, d, gn2));
        }
        Ok(SeedRun { label, value: r, iterations: it, converged, minimizer: u })
    }
}

/// Multi-start minimization of the Rayleigh quotient; restarts run in parallel and the
/// best run wins (ties go to the lower seed index).
pub fn estimate_sigma_d_constant(basis: &EigenBasis, frac: &FractionalParams, opts: &SobolevOptions) -> Result<ThresholdReport> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    if basis.dim() != frac.dim {
        return Err(Error::InvalidParameter("basis dimension differs from N".into()));
    }
    let mut seeds = default_seeds(basis, frac);
    seeds.truncate(opts.restarts);
    for (i, s) in opts.extra_seeds.iter().enumerate() {
        if s.len() != basis.len() {
            return Err(Error::ShapeMismatch { expected: basis.len(), got: s.len() });
        }
        seeds.push((format!("extra{i}"), s.clone()));
    }
    let ctx = Rayleigh::new(basis, frac);
    let runs: Vec<SeedRun> = seeds
        .into_par_iter()
        .map(|(label, seed)| ctx.descend(label, &seed, opts.budget, opts.tol))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    let half = frac.half_space_constant();
    let est = runs[best].value;
    let regime = if est < half * (1.0 - REGIME_TOL) { SobolevRegime::Below } else { SobolevRegime::Equal };
    let s_eff = if regime == SobolevRegime::Equal { half } else { est };
    Ok(ThresholdReport {
        s_sigma_d: est,
        s_sn: frac.sobolev_sn,
        half_space: half,
        regime,
        c_star: c_star_from(s_eff, frac, 1.0),
        best_seed: best,
        stale: !runs[best].converged,
        runs,
        frac: *frac,
    })
}
