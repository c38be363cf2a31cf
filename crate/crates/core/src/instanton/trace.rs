use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::weight::FACE_TOL;
use crate::functionals::WeightModel;
use crate::quadrature::{graded_breaks, integrate_panels, refine_wide, TensorRule};
use crate::special::{gamma, smooth_cutoff};
use crate::spectral::{weighted_sum_sq, EigenBasis, Face, FractionalParams, MixedRectangleDomain, SpectralField};

const POINTS_PER_PANEL: usize = 10;
const GRADING_RATIO: f64 = 1.5;
/// Upper frequency of the tail integral, in units of 1/eps.
const TAIL_CUTOFF: f64 = 45.0;

/// A boundary-centered, smoothly truncated Aubin-Talenti profile
/// z(x) = phi_0(|x - a|/rho) eps^{(N-2s)/2} / (eps^2 + |x - a|^2)^{(N-2s)/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedInstanton {
    pub center: Vec<f64>,
    pub eps: f64,
    pub rho: f64,
    pub s: f64,
    pub dim: usize,
    /// Faces through the center; the trace is the full-space bubble cut by these.
    pub faces: Vec<Face>,
}

impl TruncatedInstanton {
    pub fn new(domain: &MixedRectangleDomain, center: &[f64], eps: f64, rho: f64, frac: &FractionalParams) -> Result<Self> {
        if center.len() != domain.dim() || domain.dim() != frac.dim {
            return Err(Error::InvalidParameter("center, domain and parameters disagree on N".into()));
        }
        let faces = domain.faces_containing(center, FACE_TOL);
        if faces.is_empty() {
            return Err(Error::Support(format!("center {center:?} is not on the boundary")));
        }
        let d_dir = domain.distance_to_dirichlet(center);
        if d_dir <= FACE_TOL {
            return Err(Error::Support(format!("center {center:?} lies on a Dirichlet face")));
        }
        if !(rho > 0.0) || rho >= d_dir {
            return Err(Error::Support(format!(
                "radius {rho} must be positive and below the distance {d_dir} to the Dirichlet part"
            )));
        }
        for f in domain.faces() {
            if !faces.contains(&f) && domain.distance_to_face(center, f) < rho {
                return Err(Error::Support(format!("radius {rho} reaches the face {f:?}")));
            }
        }
        if !(eps > 0.0) || !(eps < rho / 4.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, rho/4 = {})", rho / 4.0)));
        }
        let mut c = center.to_vec();
        for f in &faces {
            c[f.axis] = domain.face_coordinate(*f);
        }
        Ok(Self { center: c, eps, rho, s: frac.s, dim: frac.dim, faces })
    }

    /// A quarter of the distance to the Dirichlet part, capped by the distance to
    /// faces not containing the center.
    pub fn default_rho(domain: &MixedRectangleDomain, center: &[f64]) -> f64 {
        let own = domain.faces_containing(center, FACE_TOL);
        let others = domain
            .faces()
            .filter(|f| !own.contains(f))
            .map(|f| domain.distance_to_face(center, f))
            .fold(f64::INFINITY, f64::min);
        (0.25 * domain.distance_to_dirichlet(center)).min(others)
    }

    /// (N - 2s)/2
    pub fn beta(&self) -> f64 {
        (self.dim as f64 - 2.0 * self.s) / 2.0
    }

    /// Fraction of the full-space bubble inside the domain.
    pub fn solid_fraction(&self) -> f64 {
        0.5f64.powi(self.faces.len() as i32)
    }

    pub fn profile(&self, r: f64) -> f64 {
        let c = smooth_cutoff(r / self.rho);
        if c == 0.0 {
            return 0.0;
        }
        let b = self.beta();
        c * self.eps.powf(b) * (self.eps * self.eps + r * r).powf(-b)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.profile(radius(x, &self.center))
    }

    /// Tensor rule on the support box, graded toward the center.
    pub fn support_rule(&self, domain: &MixedRectangleDomain, h_max: f64) -> TensorRule {
        let extra: Vec<f64> = (0..=4).map(|i| self.rho * (0.5 + 0.125 * i as f64)).collect();
        let breaks: Vec<Vec<f64>> = (0..self.dim)
            .map(|a| {
                let c = self.center[a];
                let lo = (c - self.rho).max(0.0);
                let hi = (c + self.rho).min(domain.lengths()[a]);
                graded_breaks(lo, hi, c, self.eps / 8.0, GRADING_RATIO, h_max, &extra)
            })
            .collect();
        TensorRule::from_breaks(&breaks, POINTS_PER_PANEL)
    }

    fn integration_rule(&self, domain: &MixedRectangleDomain) -> TensorRule {
        self.support_rule(domain, self.rho / 4.0)
    }

    /// int z^p over the domain, by direct quadrature of the trace.
    pub fn lp_integral(&self, p: f64, domain: &MixedRectangleDomain) -> f64 {
        self.integration_rule(domain).integrate(|x| self.eval(x).powf(p))
    }

    /// int Q z^p over the domain.
    pub fn weighted_lp_integral(&self, p: f64, weight: &WeightModel, domain: &MixedRectangleDomain) -> f64 {
        self.integration_rule(domain).integrate(|x| weight.eval(x) * self.eval(x).powf(p))
    }

    /// Exact L^2 projection onto the basis: coefficients <z, phi_j> by adapted quadrature.
    pub fn project(&self, basis: &EigenBasis) -> Result<SpectralField> {
        let h = (self.rho / 4.0).min(3.0 / basis.cutoff_frequency());
        let rule = self.support_rule(basis.domain(), h);
        let values = rule.sample(|x| self.eval(x));
        SpectralField::new(basis.project_tensor_grid(&rule.nodes, &rule.weights, &values)?)
    }

    /// Fourier transform of the full-space truncated bubble at radial frequencies `ks`,
    /// through the projection-slice identity: hat b(k) = 2 int_0^rho P(x) cos(kx) dx.
    pub fn radial_fourier(&self, ks: &[f64]) -> Vec<f64> {
        let k_top = ks.iter().cloned().fold(0.0, f64::max).max(1.0);
        let extra: Vec<f64> = (0..=4).map(|i| self.rho * (0.5 + 0.125 * i as f64)).collect();
        let h = (self.rho / 8.0).min(4.0 / k_top);
        let breaks = graded_breaks(0.0, self.rho, 0.0, self.eps / 8.0, GRADING_RATIO, h, &extra);
        let gl = crate::special::GaussLegendre::new(POINTS_PER_PANEL);
        let (xs, ws) = crate::special::composite(&gl, &breaks);
        let px: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| 2.0 * w * self.slice(*x)).collect();
        use rayon::prelude::*;
        ks.par_iter()
            .map(|k| xs.iter().zip(&px).map(|(x, p)| p * (k * x).cos()).sum())
            .collect()
    }

    /// P(x) = int_{R^{N-1}} b(sqrt(x^2 + |y|^2)) dy for 0 <= x < rho.
    fn slice(&self, x: f64) -> f64 {
        let n = self.dim as f64;
        let t_end = (self.rho * self.rho - x * x).max(0.0).sqrt();
        if t_end == 0.0 {
            return 0.0;
        }
        let sphere = 2.0 * PI.powf((n - 1.0) / 2.0) / gamma((n - 1.0) / 2.0);
        let sigma = (self.eps * self.eps + x * x).sqrt();
        let extra: Vec<f64> = (0..=4)
            .filter_map(|i| {
                let r = self.rho * (0.5 + 0.125 * i as f64);
                (r > x).then(|| (r * r - x * x).sqrt())
            })
            .collect();
        let breaks = graded_breaks(0.0, t_end, 0.0, sigma / 8.0, GRADING_RATIO, self.rho / 8.0, &extra);
        sphere
            * integrate_panels(&breaks, POINTS_PER_PANEL, |t| {
                self.profile((x * x + t * t).sqrt()) * t.powi(self.dim as i32 - 2)
            })
    }

    /// Squared H^s norm of the continuum trace.
    ///
    /// Frequencies below the basis cutoff K come from the exact coefficients; the rest
    /// from the radial Fourier transform of the reflected bubble:
    ///   sum_j chi(sqrt(l_j)/K) a_j^2 l_j^s
    ///     + f (2 pi)^{-N} |S^{N-1}| int (1 - chi(k/K)) |hat b(k)|^2 k^{2s+N-1} dk,
    /// where chi is a smooth step and f the solid fraction. `exponent` replaces s
    /// (0 gives the L^2 norm, useful as a self-check).
    pub fn hs_norm_sq_with(&self, basis: &EigenBasis, exponent: f64) -> Result<f64> {
        if basis.domain().dim() != self.dim {
            return Err(Error::ShapeMismatch { expected: self.dim, got: basis.dim() });
        }
        let kc = basis.cutoff_frequency();
        let a = self.project(basis)?;
        let low: Vec<f64> = a
            .coeffs
            .iter()
            .zip(basis.eigenvalues())
            .map(|(c, l)| c * smooth_cutoff(l.sqrt() / kc).sqrt())
            .collect();
        let low_sum = weighted_sum_sq(&low, basis.eigenvalues(), exponent);
        let tail = self.tail_integral(kc, exponent);
        Ok(low_sum + tail)
    }

    pub fn hs_norm_sq(&self, basis: &EigenBasis) -> Result<f64> {
        self.hs_norm_sq_with(basis, self.s)
    }

    fn tail_integral(&self, kc: f64, exponent: f64) -> f64 {
        let n = self.dim as f64;
        let k_max = TAIL_CUTOFF / self.eps;
        if k_max <= 0.5 * kc {
            return 0.0;
        }
        // Panels: fine on the blend [K/2, K], ripple-resolving up to k rho = 400, then geometric.
        let ripple = PI / self.rho;
        let mut b = refine_wide(vec![0.5 * kc, kc], (kc / 32.0).min(ripple));
        let mut k = kc;
        while k < k_max {
            let step = if k * self.rho < 400.0 { ripple } else { 0.05 * k.max(ripple) };
            k = (k + step).min(k_max);
            b.push(k);
        }
        let gl = crate::special::GaussLegendre::new(POINTS_PER_PANEL);
        let (kn, kw) = crate::special::composite(&gl, &b);
        let bh = self.radial_fourier(&kn);
        let sphere = 2.0 * PI.powf(n / 2.0) / gamma(n / 2.0);
        let pref = self.solid_fraction() * sphere / (2.0 * PI).powf(n);
        let mut acc = 0.0;
        for ((k, w), f) in kn.iter().zip(&kw).zip(&bh) {
            let blend = 1.0 - smooth_cutoff(k / kc);
            acc += w * blend * f * f * k.powf(2.0 * exponent + n - 1.0);
        }
        pref * acc
    }
}

pub(crate) fn radius(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Projection of the truncated trace onto the basis.
pub fn instanton_trace(inst: &TruncatedInstanton, basis: &EigenBasis) -> Result<SpectralField> {
    inst.project(basis)
}
