use rayon::prelude::*;

use super::minimize::{minimize_on_nehari, MinimizeOptions, SolutionRecord, SolveStatus};
use crate::error::{Error, Result};
use crate::functionals::weight::dist;
use crate::functionals::{Functional, ProblemParams};
use crate::instanton::TruncatedInstanton;
use crate::spectral::SpectralField;

/// H^s distance below which two records count as the same solution.
pub const DISTINCT_HS_FLOOR: f64 = 1e-4;

/// Projected instanton centered at maximum `basin`, with rho capped by r_0 and eps
/// defaulting to rho/8.
pub fn basin_seed(f: &Functional, basin: usize, eps: Option<f64>, r0: f64) -> Result<SpectralField> {
    let centers = f.weight.maxima();
    let c = centers
        .get(basin)
        .ok_or_else(|| Error::InvalidParameter(format!("basin {basin} out of range ({} maxima)", centers.len())))?;
    let d = f.basis.domain();
    let rho = TruncatedInstanton::default_rho(d, c).min(r0);
    let eps = eps.unwrap_or(rho / 8.0).min(0.999 * rho / 4.0);
    TruncatedInstanton::new(d, c, eps, rho, &f.params.frac)?.project(f.basis)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub barycenter_gap: f64,
    pub hs_distance: f64,
    pub distinct: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    pub records: Vec<SolutionRecord>,
    pub pairs: Vec<PairCheck>,
    pub r0: f64,
    /// Some basin failed to converge, escaped, or two records coincide.
    pub partial: bool,
}

impl MultiplicityReport {
    pub fn converged(&self) -> Vec<&SolutionRecord> {
        self.records.iter().filter(|r| r.converged()).collect()
    }
}

/// One minimization per weight maximum, each seeded by the instanton at that maximum.
pub fn multiplicity_search(f: &Functional, eps_seed: Option<f64>, opts: &MinimizeOptions) -> Result<MultiplicityReport> {
    if f.weight.is_constant() {
        return Err(Error::InvalidWeight("multiplicity search needs a weight with maxima".into()));
    }
    let k = f.weight.peaks.len();
    let r0 = opts.r0.unwrap_or_else(|| f.weight.default_r0());
    let records: Vec<SolutionRecord> = (0..k)
        .into_par_iter()
        .map(|i| {
            let seed = basin_seed(f, i, eps_seed, r0)?;
            minimize_on_nehari(&seed, i, f, opts)
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let gap = dist(&records[i].barycenter, &records[j].barycenter);
            let diff = records[i].field.axpy(-1.0, &records[j].field);
            let hs = f.hs_sq(&diff).sqrt();
            pairs.push(PairCheck {
                i,
                j,
                barycenter_gap: gap,
                hs_distance: hs,
                distinct: gap >= r0 && hs > DISTINCT_HS_FLOOR,
            });
        }
    }
    let partial = records.iter().any(|r| r.status != SolveStatus::Converged) || pairs.iter().any(|p| !p.distinct);
    Ok(MultiplicityReport { records, pairs, r0, partial })
}

/// Outcome of the bisection for the largest lambda keeping every basin converged, in place,
/// and below the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTilde {
    /// Largest lambda found to pass.
    pub lambda: f64,
    /// Smallest lambda found to fail; infinite when no failure occurred up to `lambda_max`.
    pub failing: f64,
}

/// Bisection on lambda between `lo` (must pass) and an expanding upper end capped at `lambda_max`.
pub fn empirical_lambda_tilde(
    f: &Functional,
    c_star: f64,
    eps_seed: Option<f64>,
    lo: f64,
    lambda_max: f64,
    rel_tol: f64,
    opts: &MinimizeOptions,
) -> Result<LambdaTilde> {
    let passes = |lam: f64| -> Result<bool> {
        let pp = ProblemParams::new(lam, f.params.q, f.params.frac)?;
        let g = f.with_params(pp)?;
        let rep = multiplicity_search(&g, eps_seed, opts)?;
        Ok(!rep.partial && rep.records.iter().all(|r| r.energy < c_star))
    };
    if !passes(lo)? {
        return Err(Error::InvalidParameter(format!("lower end lambda = {lo} already fails")));
    }
    let mut good = lo;
    let mut bad = f64::INFINITY;
    let mut probe = if lo > 0.0 { 2.0 * lo } else { 0.1 };
    while probe <= lambda_max {
        if passes(probe)? {
            good = probe;
            probe *= 2.0;
        } else {
            bad = probe;
            break;
        }
    }
    if bad.is_finite() {
        while bad - good > rel_tol * bad {
            let mid = 0.5 * (good + bad);
            if passes(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    Ok(LambdaTilde { lambda: good, failing: bad })
}
