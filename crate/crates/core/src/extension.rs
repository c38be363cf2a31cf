//! Mode-level check of the weighted extension isometry via the 1D Bessel profile.

use crate::error::{Error, Result};
use crate::special::{gamma, GaussLegendre};
use crate::spectral::FractionalParams;

pub use crate::special::bessel_k;
pub use crate::spectral::ks_constant;

/// Profile cut where the tail bound drops below this level.
const TAIL_LEVEL: f64 = 1e-12;
/// Left end of the log-spaced panels, in profile units.
const T_MIN: f64 = 1e-12;
const REL_TOL: f64 = 1e-12;

/// theta_s(t) = 2^{1-s}/Gamma(s) t^s K_s(t), the extension profile of a single eigenmode.
#[derive(Debug, Clone)]
pub struct ExtensionProfile {
    pub s: f64,
    prefactor: f64,
    pub t_max: f64,
}

impl ExtensionProfile {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!("s must lie in (0, 1), got {s}")));
        }
        let prefactor = 2f64.powf(1.0 - s) / gamma(s);
        let mut p = Self { s, prefactor, t_max: 1.0 };
        // theta is decreasing, so walk until both theta and |theta'| fall below the level.
        let mut t = 1.0;
        while p.theta(t)?.max(p.theta_prime(t)?.abs()) >= TAIL_LEVEL {
            t += 0.5;
        }
        p.t_max = t;
        Ok(p)
    }

    pub fn theta(&self, t: f64) -> Result<f64> {
        Ok(self.prefactor * t.powf(self.s) * bessel_k(self.s, t)?)
    }

    /// d/dt [t^s K_s(t)] = -t^s K_{1-s}(t).
    pub fn theta_prime(&self, t: f64) -> Result<f64> {
        Ok(-self.prefactor * t.powf(self.s) * bessel_k(1.0 - self.s, t)?)
    }

    /// Panel breakpoints in t: one per decade from T_MIN up to 1, then unit steps to t_max.
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::new();
        let mut t = T_MIN;
        while t < 1.0 {
            b.push(t);
            t *= 10.0;
        }
        let mut t = 1.0;
        while t < self.t_max {
            b.push(t);
            t += 1.0;
        }
        b.push(self.t_max);
        b
    }

    /// int_0^{t_max / scale} y^{1-2s} f(y) dy with n-point panels; the panels are the
    /// profile panels divided by `scale`.
    fn integrate_scaled(&self, n: usize, scale: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let gl = GaussLegendre::new(n);
        let e = 2.0 - 2.0 * self.s;
        // On [0, a] substitute v = y^{2-2s}, which absorbs the weight singularity.
        let a = T_MIN / scale;
        let mut acc = 0.0;
        for (v, wv) in gl.on(0.0, a.powf(e)) {
            acc += wv / e * f(v.powf(1.0 / e))?;
        }
        for w in self.breakpoints().windows(2) {
            for (y, wy) in gl.on(w[0] / scale, w[1] / scale) {
                acc += wy * y.powf(1.0 - 2.0 * self.s) * f(y)?;
            }
        }
        Ok(acc)
    }

    fn integrate(&self, n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        self.integrate_scaled(n, 1.0, f)
    }

    /// Integral with doubling refinement until successive values agree.
    fn integrate_converged(&self, f: impl Fn(f64) -> Result<f64> + Copy) -> Result<f64> {
        let mut n = 8;
        let mut prev = self.integrate(n, f)?;
        while n < 128 {
            n *= 2;
            let cur = self.integrate(n, f)?;
            if (cur - prev).abs() <= REL_TOL * cur.abs() {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Quadrature(format!("profile integral for s = {} did not settle", self.s)))
    }

    /// I(s) = int_0^inf t^{1-2s} (theta'^2 + theta^2) dt.
    pub fn energy_integral(&self) -> Result<f64> {
        self.integrate_converged(|t| Ok(self.theta_prime(t)?.powi(2) + self.theta(t)?.powi(2)))
    }
}

/// k_s int_0^inf y^{1-2s} lambda [theta'(sqrt(lambda) y)^2 + theta(sqrt(lambda) y)^2] dy,
/// the weighted cylinder energy of the extension of one eigenmode with eigenvalue lambda.
pub fn mode_extension_energy(lambda: f64, params: &FractionalParams) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("eigenvalue must be positive, got {lambda}")));
    }
    let prof = ExtensionProfile::new(params.s)?;
    let r = lambda.sqrt();
    // Integrate in y directly; panels are the profile panels mapped by y = t / sqrt(lambda).
    let integrand = |n: usize| -> Result<f64> {
        let acc = prof.integrate_scaled(n, r, |y| {
            let t = r * y;
            Ok(lambda * (prof.theta_prime(t)?.powi(2) + prof.theta(t)?.powi(2)))
        })?;
        Ok(params.ks * acc)
    };
    let mut n = 8;
    let mut prev = integrand(n)?;
    while n < 128 {
        n *= 2;
        let cur = integrand(n)?;
        if (cur - prev).abs() <= REL_TOL * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("extension energy for lambda = {lambda} did not settle")))
}
