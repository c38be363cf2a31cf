use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::instanton::TraceQuantities;
use crate::spectral::{first_fractional_eigenvalue, synthesize, EigenBasis, FractionalParams, SpectralField};

/// A field scaled onto the Nehari manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct NehariPoint {
    pub field: SpectralField,
    /// Multiplier t_w with t_w u on the manifold.
    pub t_scale: f64,
    /// ||v||^2 - int Q|v|^{2*} - lambda int |v|^{q+1} at v = t_w u.
    pub constraint_residual: f64,
    /// ||v||^2 at the projected point.
    pub hs_sq: f64,
}

/// Unique t > 0 with t^2 ||u||^2 = t^{2*} int Q|u|^{2*} + lambda t^{q+1} int |u|^{q+1}.
pub fn nehari_project(u: &SpectralField, f: &Functional) -> Result<NehariPoint> {
    if u.is_zero() {
        return Err(Error::ZeroField("cannot project the zero field onto the Nehari manifold".into()));
    }
    let pp = f.params;
    let tq = TraceQuantities::of_field(u, f)?;
    let cap = first_fractional_eigenvalue(f.basis, &pp.frac);
    let t = tq.root(&pp, Some(cap))?;
    let p = pp.frac.crit_exp;
    let a = t * t * tq.hs_sq;
    let res = a - t.powf(p) * tq.critical - pp.lambda * t.powf(pp.q + 1.0) * tq.subcritical;
    Ok(NehariPoint { field: u.scaled(t), t_scale: t, constraint_residual: res, hs_sq: a })
}

/// L^{2*}-mass centroid int x |u|^{2*} / int |u|^{2*} on the basis grid.
pub fn barycenter(u: &SpectralField, frac: &FractionalParams, basis: &EigenBasis) -> Result<Vec<f64>> {
    if u.is_zero() {
        return Err(Error::ZeroField("barycenter of the zero field".into()));
    }
    let v = synthesize(u, basis)?;
    Ok(barycenter_from_grid(&v, frac, basis))
}

pub(crate) fn barycenter_from_grid(values: &[f64], frac: &FractionalParams, basis: &EigenBasis) -> Vec<f64> {
    let n = basis.dim();
    let mut num = vec![0.0; n];
    let mut den = 0.0;
    for (g, (v, w)) in values.iter().zip(basis.grid_weights()).enumerate() {
        let m = w * v.abs().powf(frac.crit_exp);
        den += m;
        for (a, x) in basis.grid_point(g).into_iter().enumerate() {
            num[a] += m * x;
        }
    }
    num.into_iter().map(|x| x / den).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{ProblemParams, WeightModel};
    use crate::spectral::{Face, MixedRectangleDomain};

    #[test]
    fn projection_satisfies_constraint_and_is_scale_free() {
        let d = MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap();
        let b = EigenBasis::new(&d, 6, EigenBasis::recommended_quad_points(6)).unwrap();
        let frac = FractionalParams::new(0.75, 2).unwrap();
        let f = Functional::new(&b, ProblemParams::new(0.5, 2.0, frac).unwrap(), WeightModel::constant(1.0).unwrap()).unwrap();
        let u = SpectralField::new((0..b.len()).map(|j| 1.0 / (1.0 + j as f64).powi(2)).collect()).unwrap();
        let a = nehari_project(&u, &f).unwrap();
        assert!(a.constraint_residual.abs() < 1e-10 * a.hs_sq);
        let c = nehari_project(&u.scaled(7.5), &f).unwrap();
        let diff: f64 = a.field.coeffs.iter().zip(&c.field.coeffs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
        assert!(nehari_project(&SpectralField::zeros(b.len()), &f).is_err());
    }
}
