use super::params::ProblemParams;
use super::weight::WeightModel;
use crate::error::{Error, Result};
use crate::spectral::{analyze, synthesize, EigenBasis, SpectralField};

/// Relative energy change on grid refinement above which a value is flagged.
pub const RESOLUTION_TOL: f64 = 1e-6;

/// Energy functional of the weighted critical problem on a fixed Galerkin space.
#[derive(Debug, Clone)]
pub struct Functional<'a> {
    pub basis: &'a EigenBasis,
    pub params: ProblemParams,
    pub weight: WeightModel,
    weight_grid: Vec<f64>,
    lambda_s: Vec<f64>,
}

/// Gradient in the L^2-dual form and in the H^s-preconditioned form.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dual: SpectralField,
    pub preconditioned: SpectralField,
}

impl Gradient {
    /// H^s norm of the Riesz representative: sqrt(sum dual_j^2 / lambda_j^s).
    pub fn norm(&self) -> f64 {
        self.dual.dot(&self.preconditioned).sqrt()
    }
}

/// Pieces of the energy that depend on grid values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals {
    /// sum a_j^2 lambda_j^s
    pub hs_sq: f64,
    /// int Q |u|^{2*}
    pub critical: f64,
    /// int |u|^{q+1}
    pub subcritical: f64,
}

/// Outcome of re-evaluating the energy on a finer grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionCheck {
    pub coarse: f64,
    pub fine: f64,
    pub rel_change: f64,
    pub flagged: bool,
}

impl<'a> Functional<'a> {
    pub fn new(basis: &'a EigenBasis, params: ProblemParams, weight: WeightModel) -> Result<Self> {
        if basis.dim() != params.frac.dim {
            return Err(Error::InvalidParameter(format!(
                "basis has dimension {} but the problem has N = {}",
                basis.dim(),
                params.frac.dim
            )));
        }
        let weight_grid = (0..basis.grid_len()).map(|g| weight.eval(&basis.grid_point(g))).collect();
        let lambda_s = basis.eigenvalues().iter().map(|l| l.powf(params.frac.s)).collect();
        Ok(Self { basis, params, weight, weight_grid, lambda_s })
    }

    pub fn with_params(&self, params: ProblemParams) -> Result<Self> {
        if params.frac != self.params.frac {
            return Err(Error::InvalidParameter("fractional parameters must match".into()));
        }
        let mut f = self.clone();
        f.params = params;
        Ok(f)
    }

    pub fn weight_grid(&self) -> &[f64] {
        &self.weight_grid
    }

    pub fn lambda_s(&self) -> &[f64] {
        &self.lambda_s
    }

    pub fn crit_exp(&self) -> f64 {
        self.params.frac.crit_exp
    }

    pub fn hs_sq(&self, u: &SpectralField) -> f64 {
        u.coeffs.iter().zip(&self.lambda_s).map(|(a, l)| a * a * l).sum()
    }

    /// H^s inner product.
    pub fn hs_dot(&self, u: &SpectralField, v: &SpectralField) -> f64 {
        u.coeffs.iter().zip(&v.coeffs).zip(&self.lambda_s).map(|((a, b), l)| a * b * l).sum()
    }

    pub fn integrals_from_grid(&self, u: &SpectralField, values: &[f64]) -> Integrals {
        let p = self.crit_exp();
        let q1 = self.params.q + 1.0;
        let mut crit = 0.0;
        let mut sub = 0.0;
        for ((v, w), qg) in values.iter().zip(self.basis.grid_weights()).zip(&self.weight_grid) {
            let a = v.abs();
            crit += w * qg * a.powf(p);
            sub += w * a.powf(q1);
        }
        Integrals { hs_sq: self.hs_sq(u), critical: crit, subcritical: sub }
    }

    pub fn integrals(&self, u: &SpectralField) -> Result<Integrals> {
        let v = synthesize(u, self.basis)?;
        Ok(self.integrals_from_grid(u, &v))
    }

    pub fn energy_from_integrals(&self, i: &Integrals) -> f64 {
        let p = self.crit_exp();
        let q1 = self.params.q + 1.0;
        0.5 * i.hs_sq - i.critical / p - self.params.lambda * i.subcritical / q1
    }

    /// I(u) = ||u||^2/2 - int Q|u|^{2*}/2* - lambda int |u|^{q+1}/(q+1).
    pub fn energy(&self, u: &SpectralField) -> Result<f64> {
        Ok(self.energy_from_integrals(&self.integrals(u)?))
    }

    /// Energy, failing if grid refinement moves it by more than `RESOLUTION_TOL`.
    pub fn energy_checked(&self, u: &SpectralField) -> Result<f64> {
        let c = self.resolution_check(u)?;
        if c.flagged {
            return Err(Error::Quadrature(format!(
                "energy changes by {:.2e} (relative) under grid refinement",
                c.rel_change
            )));
        }
        Ok(c.coarse)
    }

    /// Re-evaluates the energy with 1.5x the quadrature points per axis.
    pub fn resolution_check(&self, u: &SpectralField) -> Result<ResolutionCheck> {
        let coarse = self.energy(u)?;
        let q = self.basis.quad_points_per_axis();
        let fine_basis =
            EigenBasis::new(self.basis.domain(), self.basis.modes_per_axis(), q + q.div_ceil(2))?;
        let fine_f = Functional::new(&fine_basis, self.params, self.weight.clone())?;
        let fine = fine_f.energy(u)?;
        let rel_change = (fine - coarse).abs() / coarse.abs().max(f64::MIN_POSITIVE);
        Ok(ResolutionCheck { coarse, fine, rel_change, flagged: rel_change > RESOLUTION_TOL })
    }

    /// Grid samples of Q|u|^{2*-2}u + lambda |u|^{q-1}u.
    pub fn nonlinearity_grid(&self, values: &[f64]) -> Vec<f64> {
        let p = self.crit_exp();
        let q = self.params.q;
        let lam = self.params.lambda;
        values
            .iter()
            .zip(&self.weight_grid)
            .map(|(v, qg)| {
                let a = v.abs();
                v.signum() * (qg * a.powf(p - 1.0) + lam * a.powf(q))
            })
            .collect()
    }

    pub fn gradient_from_grid(&self, u: &SpectralField, values: &[f64]) -> Result<Gradient> {
        let nl = analyze(&self.nonlinearity_grid(values), self.basis)?;
        let dual: Vec<f64> = u
            .coeffs
            .iter()
            .zip(&self.lambda_s)
            .zip(&nl.coeffs)
            .map(|((a, l), n)| l * a - n)
            .collect();
        let pre = dual.iter().zip(&self.lambda_s).map(|(d, l)| d / l).collect();
        Ok(Gradient { dual: SpectralField { coeffs: dual }, preconditioned: SpectralField { coeffs: pre } })
    }

    pub fn gradient(&self, u: &SpectralField) -> Result<Gradient> {
        let v = synthesize(u, self.basis)?;
        self.gradient_from_grid(u, &v)
    }

    pub fn grad_norm(&self, u: &SpectralField) -> Result<f64> {
        Ok(self.gradient(u)?.norm())
    }
}

pub fn energy(u: &SpectralField, pp: &ProblemParams, q: &WeightModel, basis: &EigenBasis) -> Result<f64> {
    Functional::new(basis, *pp, q.clone())?.energy(u)
}

pub fn gradient(u: &SpectralField, pp: &ProblemParams, q: &WeightModel, basis: &EigenBasis) -> Result<Gradient> {
    Functional::new(basis, *pp, q.clone())?.gradient(u)
}
