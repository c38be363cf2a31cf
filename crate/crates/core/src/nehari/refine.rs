use crate::error::{Error, Result};

/// Energies on three meshes with the observed order and the extrapolated limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Richardson {
    pub order: f64,
    pub limit: f64,
    /// |E_3 - E_2| / |E_3|
    pub last_rel_change: f64,
}

/// Three-level Richardson analysis of values e_i at mesh sizes h_i (h decreasing),
/// modelling e(h) = e_inf + C h^p.
pub fn richardson3(h: [f64; 3], e: [f64; 3]) -> Result<Richardson> {
    if !(h[0] > h[1] && h[1] > h[2] && h[2] > 0.0) {
        return Err(Error::InvalidParameter("mesh sizes must decrease".into()));
    }
    let last_rel_change = (e[2] - e[1]).abs() / e[2].abs().max(f64::MIN_POSITIVE);
    let d1 = e[0] - e[1];
    let d2 = e[1] - e[2];
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return Ok(Richardson { order: f64::NAN, limit: e[2], last_rel_change });
    }
    let target = d1 / d2;
    let ratio = |p: f64| (h[0].powf(p) - h[1].powf(p)) / (h[1].powf(p) - h[2].powf(p));
    let (mut lo, mut hi) = (1e-3, 20.0);
    if (ratio(lo) - target) * (ratio(hi) - target) > 0.0 {
        return Ok(Richardson { order: f64::NAN, limit: e[2], last_rel_change });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (ratio(lo) - target) * (ratio(mid) - target) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let c = d2 / (h[1].powf(p) - h[2].powf(p));
    Ok(Richardson { order: p, limit: e[2] - c * h[2].powf(p), last_rel_change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let h = [1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0];
        let e = h.map(|x: f64| 0.25 + 3.0 * x.powf(1.5));
        let r = richardson3(h, e).unwrap();
        assert!((r.order - 1.5).abs() < 1e-8);
        assert!((r.limit - 0.25).abs() < 1e-10);
    }
}
