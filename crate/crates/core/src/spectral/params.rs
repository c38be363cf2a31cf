use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::gamma;

/// The scalar environment of the problem: order s and dimension N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    pub s: f64,
    pub dim: usize,
    pub crit_exp: f64,
    pub ks: f64,
    pub sobolev_sn: f64,
}

impl FractionalParams {
    /// Requires 1/2 < s < 1 and N >= 2.
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if !(s > 0.5 && s < 1.0) {
            return Err(Error::InvalidParameter(format!("s must lie in (1/2, 1), got {s}")));
        }
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {dim}")));
        }
        Ok(Self {
            s,
            dim,
            crit_exp: critical_exponent(dim, s)?,
            ks: ks_constant(s)?,
            sobolev_sn: sobolev_constant(dim, s)?,
        })
    }

    /// 2^{-2s/N} S(s,N): the half-space value of the mixed constant.
    pub fn half_space_constant(&self) -> f64 {
        2f64.powf(-2.0 * self.s / self.dim as f64) * self.sobolev_sn
    }
}

/// 2*_s = 2N/(N - 2s).
pub fn critical_exponent(dim: usize, s: f64) -> Result<f64> {
    let n = dim as f64;
    if !(n > 2.0 * s) || !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("need N > 2s > 0, got N={dim}, s={s}")));
    }
    Ok(2.0 * n / (n - 2.0 * s))
}

/// k_s = 2^{2s-1} Gamma(s) / Gamma(1-s).
pub fn ks_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s must lie in (0, 1), got {s}")));
    }
    Ok(2f64.powf(2.0 * s - 1.0) * gamma(s) / gamma(1.0 - s))
}

/// Sharp fractional Sobolev constant S(s, N) of the whole space.
pub fn sobolev_constant(dim: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s must lie in (0, 1), got {s}")));
    }
    let n = dim as f64;
    if !(n > 2.0 * s) {
        return Err(Error::InvalidParameter(format!("need N > 2s, got N={dim}, s={s}")));
    }
    Ok(2f64.powf(2.0 * s)
        * PI.powf(s)
        * gamma((n + 2.0 * s) / 2.0)
        / gamma((n - 2.0 * s) / 2.0)
        * (gamma(n / 2.0) / gamma(n)).powf(2.0 * s / n))
}
