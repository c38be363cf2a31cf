use super::basis::EigenBasis;
use super::params::FractionalParams;
use crate::error::{Error, Result};

/// Coefficients of a function against an `EigenBasis`, in its sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("coefficient {i} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![0.0; n] }
    }

    /// j-th unit vector (0-based).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        Self { coeffs: c }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * t).collect() }
    }

    /// self + t * other
    pub fn axpy(&self, t: f64, other: &SpectralField) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + t * b).collect() }
    }

    pub fn dot(&self, other: &SpectralField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    fn check(&self, basis: &EigenBasis) -> Result<()> {
        if self.len() != basis.len() {
            return Err(Error::ShapeMismatch { expected: basis.len(), got: self.len() });
        }
        Ok(())
    }
}

pub fn build_basis(domain: &super::MixedRectangleDomain, modes_per_axis: usize, quad_points_per_axis: usize) -> Result<EigenBasis> {
    EigenBasis::new(domain, modes_per_axis, quad_points_per_axis)
}

/// u(x_g) = sum_j a_j phi_j(x_g) on every grid node.
pub fn synthesize(field: &SpectralField, basis: &EigenBasis) -> Result<Vec<f64>> {
    field.check(basis)?;
    Ok(basis.synthesize_raw(&field.coeffs))
}

/// a_j = <u, phi_j> by tensor quadrature.
pub fn analyze(values: &[f64], basis: &EigenBasis) -> Result<SpectralField> {
    if values.len() != basis.grid_len() {
        return Err(Error::ShapeMismatch { expected: basis.grid_len(), got: values.len() });
    }
    Ok(SpectralField { coeffs: basis.analyze_raw(values) })
}

/// a_j -> lambda_j^s a_j. Only `params.s` is used.
pub fn apply_fractional(field: &SpectralField, params: &FractionalParams, basis: &EigenBasis) -> Result<SpectralField> {
    field.check(basis)?;
    let s = params.s;
    Ok(SpectralField {
        coeffs: field.coeffs.iter().zip(basis.eigenvalues()).map(|(a, l)| a * l.powf(s)).collect(),
    })
}

/// Squared H^s norm, sum a_j^2 lambda_j^s.
pub fn hs_norm_sq(field: &SpectralField, params: &FractionalParams, basis: &EigenBasis) -> Result<f64> {
    field.check(basis)?;
    Ok(weighted_sum_sq(&field.coeffs, basis.eigenvalues(), params.s))
}

pub fn hs_norm(field: &SpectralField, params: &FractionalParams, basis: &EigenBasis) -> Result<f64> {
    hs_norm_sq(field, params, basis).map(f64::sqrt)
}

pub(crate) fn weighted_sum_sq(coeffs: &[f64], eig: &[f64], s: f64) -> f64 {
    coeffs.iter().zip(eig).map(|(a, l)| a * a * l.powf(s)).sum()
}

/// Quadrature L^p norm of the synthesized field.
pub fn lp_norm(field: &SpectralField, p: f64, basis: &EigenBasis) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let v = synthesize(field, basis)?;
    Ok(grid_lp_norm(&v, p, basis))
}

/// (sum_g w_g |v_g|^p)^{1/p} for grid values.
pub fn grid_lp_norm(values: &[f64], p: f64, basis: &EigenBasis) -> f64 {
    grid_integral(values, basis, |v| v.abs().powf(p)).powf(1.0 / p)
}

/// sum_g w_g f(v_g).
pub fn grid_integral(values: &[f64], basis: &EigenBasis, f: impl Fn(f64) -> f64) -> f64 {
    values.iter().zip(basis.grid_weights()).map(|(v, w)| w * f(*v)).sum()
}

/// min_j lambda_j^s.
pub fn first_fractional_eigenvalue(basis: &EigenBasis, params: &FractionalParams) -> f64 {
    basis.eigenvalues()[0].powf(params.s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::domain::{Face, MixedRectangleDomain};
    use std::f64::consts::PI;

    fn basis(m: usize) -> EigenBasis {
        let d = MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap();
        EigenBasis::new(&d, m, EigenBasis::recommended_quad_points(m)).unwrap()
    }

    #[test]
    fn unit_vectors_reproduce_modes() {
        let b = basis(5);
        let v = synthesize(&SpectralField::unit(b.len(), 3), &b).unwrap();
        for g in [0, 17, 200] {
            assert!((v[g] - b.eval_mode(3, &b.grid_point(g))).abs() < 1e-13);
        }
        let back = analyze(&v, &b).unwrap();
        for (j, c) in back.coeffs.iter().enumerate() {
            let e = if j == 3 { 1.0 } else { 0.0 };
            assert!((c - e).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let b = basis(4);
        assert!(synthesize(&SpectralField::zeros(b.len()), &b).unwrap().iter().all(|v| *v == 0.0));
        assert!(analyze(&vec![0.0; b.grid_len()], &b).unwrap().is_zero());
        assert!(synthesize(&SpectralField::zeros(3), &b).is_err());
        assert!(analyze(&[1.0], &b).is_err());
    }

    #[test]
    fn norms_of_first_mode() {
        let b = basis(6);
        let p = FractionalParams::new(0.75, 2).unwrap();
        let e1 = SpectralField::unit(b.len(), 0);
        assert!((hs_norm(&e1, &p, &b).unwrap() - b.eigenvalues()[0].powf(0.375)).abs() < 1e-14);
        assert!((lp_norm(&e1, 2.0, &b).unwrap() - 1.0).abs() < 1e-10);
        let lam1 = first_fractional_eigenvalue(&b, &p);
        assert!((lam1 - (PI * PI / 4.0).powf(0.75)).abs() < 1e-13);
    }

    #[test]
    fn constant_field_lp() {
        let b = basis(4);
        let v = vec![-3.0; b.grid_len()];
        assert!((grid_lp_norm(&v, 2.0, &b) - 3.0).abs() < 1e-12);
    }
}
