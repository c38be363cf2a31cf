use std::f64::consts::PI;

use rayon::prelude::*;

use super::trace::TruncatedInstanton;
use crate::error::{Error, Result};
use crate::functionals::weight::FACE_TOL;
use crate::functionals::WeightModel;
use crate::special::gamma;
use crate::spectral::{FractionalParams, MixedRectangleDomain};

pub const MIN_SAMPLES: usize = 4;

/// Growth regime of int z^p as eps -> 0, split at p = N/(N - 2s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRegime {
    /// eps^{(N-2s)p/2}
    Subcritical { slope: f64 },
    /// eps^{N/2} |log eps|
    Borderline,
    /// eps^{N-(N-2s)p/2}
    Supercritical { slope: f64 },
}

pub fn rate_regime(p: f64, frac: &FractionalParams) -> RateRegime {
    let n = frac.dim as f64;
    let m = n - 2.0 * frac.s;
    let border = n / m;
    if (p - border).abs() <= 1e-12 * border {
        RateRegime::Borderline
    } else if p < border {
        RateRegime::Subcritical { slope: m * p / 2.0 }
    } else {
        RateRegime::Supercritical { slope: n - m * p / 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub eps: f64,
    pub value: f64,
}

/// Least-squares fit of a rate sweep.
///
/// Power regimes fit log(value) against log(eps); `slope` is the exponent.
/// The borderline regime fits value/eps^{N/2} against log(rho/eps); `slope` is then the
/// log coefficient, whose theoretical value is the solid angle of the domain at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub p: f64,
    pub regime: RateRegime,
    pub rows: Vec<RateRow>,
    pub slope: f64,
    pub intercept: f64,
    pub theory: f64,
    pub r_squared: f64,
}

/// Ordinary least squares y = a + b x; returns (b, a, R^2).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (b, a, r2)
}

/// int z^p for each eps (same center and rho as `template`), fitted against the regime law.
pub fn lp_rate_experiment(
    p: f64,
    eps_list: &[f64],
    template: &TruncatedInstanton,
    domain: &MixedRectangleDomain,
    frac: &FractionalParams,
) -> Result<RateReport> {
    if eps_list.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { need: MIN_SAMPLES, got: eps_list.len() });
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let insts: Vec<TruncatedInstanton> = eps_list
        .iter()
        .map(|&e| TruncatedInstanton::new(domain, &template.center, e, template.rho, frac))
        .collect::<Result<_>>()?;
    let rows: Vec<RateRow> =
        insts.par_iter().map(|z| RateRow { eps: z.eps, value: z.lp_integral(p, domain) }).collect();
    let regime = rate_regime(p, frac);
    let n = frac.dim as f64;
    let (x, y, theory): (Vec<f64>, Vec<f64>, f64) = match regime {
        RateRegime::Borderline => {
            let sphere = 2.0 * PI.powf(n / 2.0) / gamma(n / 2.0);
            (
                rows.iter().map(|r| (template.rho / r.eps).ln()).collect(),
                rows.iter().map(|r| r.value / r.eps.powf(n / 2.0)).collect(),
                template.solid_fraction() * sphere,
            )
        }
        RateRegime::Subcritical { slope } | RateRegime::Supercritical { slope } => (
            rows.iter().map(|r| r.eps.ln()).collect(),
            rows.iter().map(|r| r.value.ln()).collect(),
            slope,
        ),
    };
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    Ok(RateReport { p, regime, rows, slope, intercept, theory, r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedIntegral {
    /// int Q z^{2*}
    pub value: f64,
    /// Q_M int z^{2*}
    pub flat: f64,
    /// |value - flat| / eps^alpha
    pub residual: f64,
}

/// int Q z^{2*} and its distance to the flat-weight value, scaled by eps^alpha.
pub fn weighted_critical_integral(
    inst: &TruncatedInstanton,
    q: &WeightModel,
    domain: &MixedRectangleDomain,
    frac: &FractionalParams,
) -> Result<WeightedIntegral> {
    if !q.is_constant() && q.peak_at(&inst.center, FACE_TOL.max(1e-9)).is_none() {
        return Err(Error::InvalidParameter(format!(
            "instanton center {:?} is not a maximum of the weight",
            inst.center
        )));
    }
    let p = frac.crit_exp;
    let (value, flat) = if q.is_constant() {
        let v = q.q_max * inst.lp_integral(p, domain);
        (v, v)
    } else {
        (inst.weighted_lp_integral(p, q, domain), q.q_max * inst.lp_integral(p, domain))
    };
    let residual = if q.is_constant() { 0.0 } else { (flat - value).abs() / inst.eps.powf(q.alpha) };
    Ok(WeightedIntegral { value, flat, residual })
}
