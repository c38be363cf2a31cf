use rayon::prelude::*;

use super::trace::TruncatedInstanton;
use crate::error::{Error, Result};
use crate::functionals::{c_star_from, Functional, ProblemParams, WeightModel};
use crate::spectral::{first_fractional_eigenvalue, EigenBasis, FractionalParams, SpectralField};

/// Root tolerance on g at the maximizer, relative to max(1, ||z||^2).
pub const ROOT_TOL: f64 = 1e-10;

/// The three numbers a fibering map depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceQuantities {
    /// ||z||^2_{H^s}
    pub hs_sq: f64,
    /// int Q z^{2*}
    pub critical: f64,
    /// int |z|^{q+1}
    pub subcritical: f64,
}

impl TraceQuantities {
    /// Continuum quantities of a truncated instanton: exact H^s norm and adapted quadrature.
    pub fn of_instanton(inst: &TruncatedInstanton, pp: &ProblemParams, q: &WeightModel, basis: &EigenBasis) -> Result<Self> {
        check_dims(inst, pp, basis)?;
        let d = basis.domain();
        Ok(Self {
            hs_sq: inst.hs_norm_sq(basis)?,
            critical: inst.weighted_lp_integral(pp.frac.crit_exp, q, d),
            subcritical: inst.lp_integral(pp.q + 1.0, d),
        })
    }

    /// Galerkin quantities of a field on the basis grid.
    pub fn of_field(u: &SpectralField, f: &Functional) -> Result<Self> {
        let i = f.integrals(u)?;
        Ok(Self { hs_sq: i.hs_sq, critical: i.critical, subcritical: i.subcritical })
    }

    /// g(t) = A - t^{2*-2} B - lambda t^{q-1} C.
    pub fn g(&self, t: f64, pp: &ProblemParams) -> f64 {
        self.hs_sq - t.powf(pp.frac.crit_exp - 2.0) * self.critical - pp.lambda * t.powf(pp.q - 1.0) * self.subcritical
    }

    fn g_prime(&self, t: f64, pp: &ProblemParams) -> f64 {
        let p = pp.frac.crit_exp;
        -(p - 2.0) * t.powf(p - 3.0) * self.critical - pp.lambda * (pp.q - 1.0) * t.powf(pp.q - 2.0) * self.subcritical
    }

    /// phi(t) = t^2 A/2 - t^{2*} B/2* - lambda t^{q+1} C/(q+1).
    pub fn phi(&self, t: f64, pp: &ProblemParams) -> f64 {
        let p = pp.frac.crit_exp;
        let q1 = pp.q + 1.0;
        0.5 * t * t * self.hs_sq - t.powf(p) * self.critical / p - pp.lambda * t.powf(q1) * self.subcritical / q1
    }

    /// (A/B)^{1/(2*-2)}, the maximizer at lambda = 0.
    pub fn t0(&self, frac: &FractionalParams) -> f64 {
        (self.hs_sq / self.critical).powf(1.0 / (frac.crit_exp - 2.0))
    }

    /// Unique positive root of g: log-bisection on an expanding bracket, then Newton.
    ///
    /// `lambda_cap` is lambda_1^s; for q = 1 the root exists only below it.
    pub fn root(&self, pp: &ProblemParams, lambda_cap: Option<f64>) -> Result<f64> {
        if !(self.hs_sq > 0.0) || !(self.critical > 0.0) {
            return Err(Error::ZeroField("fibering map of a zero direction".into()));
        }
        if pp.q == 1.0 {
            if let Some(cap) = lambda_cap {
                if pp.lambda >= cap {
                    return Err(Error::NoRoot(format!("q = 1 needs lambda < lambda_1^s = {cap}, got {}", pp.lambda)));
                }
            }
            if self.hs_sq - pp.lambda * self.subcritical <= 0.0 {
                return Err(Error::NoRoot("g is negative at 0+: lambda too large for q = 1".into()));
            }
        }
        let mut lo = self.t0(&pp.frac).min(1.0);
        let mut hi = lo;
        let mut n = 0;
        while self.g(lo, pp) <= 0.0 {
            lo *= 0.5;
            n += 1;
            if n > 2000 {
                return Err(Error::NoRoot("no positive value of g near 0".into()));
            }
        }
        n = 0;
        while self.g(hi, pp) >= 0.0 {
            hi *= 2.0;
            n += 1;
            if n > 2000 {
                return Err(Error::NoRoot("g does not change sign".into()));
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.g(mid, pp) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-6 {
                break;
            }
        }
        let scale = self.hs_sq.max(1.0);
        let mut t = (lo * hi).sqrt();
        for _ in 0..50 {
            let gv = self.g(t, pp);
            if gv.abs() < ROOT_TOL * 1e-3 * scale {
                break;
            }
            let next = t - gv / self.g_prime(t, pp);
            if !(next > lo * 0.5 && next < hi * 2.0) {
                break;
            }
            if (next - t).abs() <= 1e-16 * t {
                t = next;
                break;
            }
            t = next;
        }
        let gv = self.g(t, pp);
        if gv.abs() > ROOT_TOL * scale {
            return Err(Error::NoRoot(format!("Newton polish left |g| = {gv:.3e}")));
        }
        Ok(t)
    }
}

fn check_dims(inst: &TruncatedInstanton, pp: &ProblemParams, basis: &EigenBasis) -> Result<()> {
    if inst.dim != pp.frac.dim || basis.dim() != pp.frac.dim || (inst.s - pp.frac.s).abs() > 0.0 {
        return Err(Error::InvalidParameter("instanton, basis and parameters disagree on (N, s)".into()));
    }
    Ok(())
}

/// beta(eps): the order of int z^{q+1}, split at q + 1 = N/(N - 2s).
pub fn beta_eps(eps: f64, frac: &FractionalParams, q: f64) -> f64 {
    let n = frac.dim as f64;
    let m = n - 2.0 * frac.s;
    let q1 = q + 1.0;
    let border = n / m;
    if (q1 - border).abs() <= 1e-12 * border {
        eps.powf(n / 2.0) * eps.ln().abs()
    } else if q1 < border {
        eps.powf(m * q1 / 2.0)
    } else {
        eps.powf(n - m * q1 / 2.0)
    }
}

/// Prop-level threshold (s/N) (2^{-2s/N} S)^{N/2s} / Q_M^{(N-2s)/2s}.
pub fn half_space_threshold(frac: &FractionalParams, q: &WeightModel) -> f64 {
    c_star_from(frac.half_space_constant(), frac, q.q_max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberingReport {
    pub lambda: f64,
    pub eps: f64,
    pub t_max: f64,
    pub sup_value: f64,
    pub t0_closed: f64,
    pub threshold: f64,
    pub margin: f64,
    pub beta_eps: f64,
    /// g at the returned root.
    pub g_residual: f64,
}

/// Report from precomputed quantities.
pub fn fiber_report(
    tq: &TraceQuantities,
    eps: f64,
    pp: &ProblemParams,
    threshold: f64,
    lambda_cap: Option<f64>,
) -> Result<FiberingReport> {
    let t = tq.root(pp, lambda_cap)?;
    let sup = tq.phi(t, pp);
    Ok(FiberingReport {
        lambda: pp.lambda,
        eps,
        t_max: t,
        sup_value: sup,
        t0_closed: tq.t0(&pp.frac),
        threshold,
        margin: threshold - sup,
        beta_eps: beta_eps(eps, &pp.frac, pp.q),
        g_residual: tq.g(t, pp),
    })
}

/// g(t) for the instanton direction.
pub fn fibering_g(t: f64, inst: &TruncatedInstanton, pp: &ProblemParams, q: &WeightModel, basis: &EigenBasis) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(TraceQuantities::of_instanton(inst, pp, q, basis)?.g(t, pp))
}

/// Maximizer of t -> J(t z), compared against the half-space threshold.
pub fn maximize_fiber(inst: &TruncatedInstanton, pp: &ProblemParams, q: &WeightModel, basis: &EigenBasis) -> Result<FiberingReport> {
    sup_vs_threshold(inst, pp, q, basis, half_space_threshold(&pp.frac, q))
}

pub fn sup_vs_threshold(
    inst: &TruncatedInstanton,
    pp: &ProblemParams,
    q: &WeightModel,
    basis: &EigenBasis,
    threshold: f64,
) -> Result<FiberingReport> {
    let tq = TraceQuantities::of_instanton(inst, pp, q, basis)?;
    fiber_report(&tq, inst.eps, pp, threshold, Some(first_fractional_eigenvalue(basis, &pp.frac)))
}

/// Reports along a lambda sweep for a fixed direction, in input order.
pub fn lambda_sweep(
    tq: &TraceQuantities,
    eps: f64,
    pp: &ProblemParams,
    lambdas: &[f64],
    threshold: f64,
    lambda_cap: Option<f64>,
) -> Result<Vec<FiberingReport>> {
    lambdas
        .par_iter()
        .map(|&l| fiber_report(tq, eps, &pp.with_lambda(l)?, threshold, lambda_cap))
        .collect()
}

/// Smallest lambda above which the margin stays positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossover {
    /// None when no tested lambda gives a positive margin.
    pub lambda: Option<f64>,
    pub reports: Vec<FiberingReport>,
}

/// Margins grow with lambda (phi decreases pointwise), so the crossover is located on the
/// sweep and refined by bisection between the last negative and first positive margin.
pub fn lambda_crossover(
    tq: &TraceQuantities,
    eps: f64,
    pp: &ProblemParams,
    lambdas: &[f64],
    threshold: f64,
) -> Result<Crossover> {
    let mut ls = lambdas.to_vec();
    ls.sort_by(|a, b| a.total_cmp(b));
    let reports = lambda_sweep(tq, eps, pp, &ls, threshold, None)?;
    let Some(first) = reports.iter().position(|r| r.margin > 0.0) else {
        return Ok(Crossover { lambda: None, reports });
    };
    if first == 0 {
        return Ok(Crossover { lambda: Some(ls[0]), reports });
    }
    let (mut lo, mut hi) = (ls[first - 1], ls[first]);
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if fiber_report(tq, eps, &pp.with_lambda(mid)?, threshold, None)?.margin > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossover { lambda: Some(hi), reports })
}

/// Constants of the bound C0 (1 + lambda beta)^{1/(1-q)} <= t <= T2 (and t >= T1 for q = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberBracket {
    pub c0: f64,
    pub t1: f64,
    pub t2: f64,
}

impl FiberBracket {
    /// Tightest constants consistent with a set of reports.
    pub fn fit(reports: &[FiberingReport], q: f64) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        let mut c0 = f64::INFINITY;
        let mut t1 = f64::INFINITY;
        let mut t2: f64 = 0.0;
        for r in reports {
            c0 = c0.min(r.t_max / Self::lower_shape(r, q));
            t1 = t1.min(r.t_max);
            t2 = t2.max(r.t_max);
        }
        Ok(Self { c0, t1, t2 })
    }

    fn lower_shape(r: &FiberingReport, q: f64) -> f64 {
        if q > 1.0 {
            (1.0 + r.lambda * r.beta_eps).powf(1.0 / (1.0 - q))
        } else {
            1.0
        }
    }

    /// Whether a report lies inside the bracket, with relative slack.
    pub fn contains(&self, r: &FiberingReport, q: f64, slack: f64) -> bool {
        let lower = if q > 1.0 { self.c0 * Self::lower_shape(r, q) } else { self.t1 };
        r.t_max >= lower * (1.0 - slack) && r.t_max <= self.t2 * (1.0 + slack)
    }
}
