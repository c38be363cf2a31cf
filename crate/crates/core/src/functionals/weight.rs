use crate::error::{Error, Result};
use crate::spectral::{BoundaryKind, MixedRectangleDomain};

/// Tolerance for deciding whether a point sits on a face.
pub const FACE_TOL: f64 = 1e-12;

/// One strict maximum of the weight: Q falls off like c |x - a|^gamma near `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPeak {
    pub center: Vec<f64>,
    pub coeff: f64,
    pub gamma: f64,
}

/// Q(x) = background + sum_i max(0, (Q_M - background) - c_i |x - a_i|^{gamma_i}).
///
/// Peaks must have disjoint supports, so Q(a_i) = Q_M and
/// Q_M - Q(x) = c_i |x - a_i|^{gamma_i} near each maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel {
    pub q_max: f64,
    pub background: f64,
    pub peaks: Vec<WeightPeak>,
    pub alpha: f64,
}

impl WeightModel {
    /// Q == value everywhere.
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidWeight(format!("constant weight must be positive, got {value}")));
        }
        Ok(Self { q_max: value, background: value, peaks: Vec::new(), alpha: 0.0 })
    }

    /// Validated peaked weight. `alpha` is the flatness exponent every gamma_i must exceed.
    pub fn new(
        domain: &MixedRectangleDomain,
        q_max: f64,
        background: f64,
        peaks: Vec<WeightPeak>,
        alpha: f64,
    ) -> Result<Self> {
        if !(background > 0.0) || !background.is_finite() {
            return Err(Error::InvalidWeight(format!("background must be positive, got {background}")));
        }
        if !(q_max > background) || !q_max.is_finite() {
            return Err(Error::InvalidWeight(format!(
                "q_max = {q_max} must exceed the background {background}"
            )));
        }
        if peaks.is_empty() {
            return Err(Error::InvalidWeight("need at least one maximum".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidWeight(format!("alpha must be positive, got {alpha}")));
        }
        for (i, p) in peaks.iter().enumerate() {
            if p.center.len() != domain.dim() {
                return Err(Error::InvalidWeight(format!("maximum {i} has the wrong dimension")));
            }
            let faces = domain.faces_containing(&p.center, FACE_TOL);
            if faces.is_empty() {
                return Err(Error::InvalidWeight(format!(
                    "maximum {i} at {:?} must lie on a Neumann face",
                    p.center
                )));
            }
            if domain.distance_to_dirichlet(&p.center) <= FACE_TOL {
                return Err(Error::InvalidWeight(format!(
                    "maximum {i} at {:?} lies on a Dirichlet face; maxima must sit on the Neumann part",
                    p.center
                )));
            }
            debug_assert!(faces.iter().all(|f| domain.kind_of(*f) == BoundaryKind::Neumann));
            if !(p.coeff > 0.0) || !p.coeff.is_finite() {
                return Err(Error::InvalidWeight(format!("maximum {i}: decay coefficient must be positive")));
            }
            if !(p.gamma > alpha) {
                return Err(Error::InvalidWeight(format!(
                    "maximum {i}: growth exponent {} must exceed alpha = {alpha}",
                    p.gamma
                )));
            }
        }
        let model = Self { q_max, background, peaks, alpha };
        for i in 0..model.peaks.len() {
            for j in 0..i {
                let d = dist(&model.peaks[i].center, &model.peaks[j].center);
                let reach = model.support_radius(i) + model.support_radius(j);
                if !(d > reach) {
                    return Err(Error::InvalidWeight(format!(
                        "maxima {j} and {i} are {d:.4} apart but their bumps reach {reach:.4}; supports must be disjoint"
                    )));
                }
            }
        }
        Ok(model)
    }

    pub fn is_constant(&self) -> bool {
        self.peaks.is_empty()
    }

    /// Radius beyond which peak i no longer lifts Q above the background.
    pub fn support_radius(&self, i: usize) -> f64 {
        let p = &self.peaks[i];
        ((self.q_max - self.background) / p.coeff).powf(1.0 / p.gamma)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let h = self.q_max - self.background;
        self.background
            + self
                .peaks
                .iter()
                .map(|p| (h - p.coeff * dist(x, &p.center).powf(p.gamma)).max(0.0))
                .sum::<f64>()
    }

    pub fn maxima(&self) -> Vec<Vec<f64>> {
        self.peaks.iter().map(|p| p.center.clone()).collect()
    }

    /// 0.45 times the smallest distance between maxima (infinite for fewer than two).
    pub fn default_r0(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.peaks.len() {
            for j in 0..i {
                m = m.min(dist(&self.peaks[i].center, &self.peaks[j].center));
            }
        }
        0.45 * m
    }

    /// Index of the maximum located at `x`, if any.
    pub fn peak_at(&self, x: &[f64], tol: f64) -> Option<usize> {
        self.peaks.iter().position(|p| dist(&p.center, x) <= tol)
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Face;

    fn square() -> MixedRectangleDomain {
        MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap()
    }

    fn peak(c: Vec<f64>) -> WeightPeak {
        WeightPeak { center: c, coeff: 4.0, gamma: 2.5 }
    }

    #[test]
    fn peak_values() {
        let w = WeightModel::new(&square(), 2.0, 1.0, vec![peak(vec![1.0, 0.5])], 1.0).unwrap();
        assert_eq!(w.eval(&[1.0, 0.5]), 2.0);
        assert_eq!(w.eval(&[0.1, 0.1]), 1.0);
        let r = 0.1;
        assert!((w.eval(&[1.0 - r, 0.5]) - (2.0 - 4.0 * r.powf(2.5))).abs() < 1e-15);
        assert!((w.support_radius(0) - 0.25f64.powf(0.4)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_placements() {
        let d = square();
        // interior point
        assert!(WeightModel::new(&d, 2.0, 1.0, vec![peak(vec![0.5, 0.5])], 1.0).is_err());
        // Dirichlet face and Dirichlet corner
        assert!(WeightModel::new(&d, 2.0, 1.0, vec![peak(vec![0.0, 0.5])], 1.0).is_err());
        assert!(WeightModel::new(&d, 2.0, 1.0, vec![peak(vec![0.0, 0.0])], 1.0).is_err());
        // too flat
        assert!(WeightModel::new(&d, 2.0, 1.0, vec![peak(vec![1.0, 0.5])], 3.0).is_err());
        // overlapping bumps
        let two = vec![peak(vec![1.0, 0.3]), peak(vec![1.0, 0.7])];
        assert!(WeightModel::new(&d, 2.0, 1.0, two, 1.0).is_err());
        assert!(WeightModel::constant(0.0).is_err());
    }

    #[test]
    fn r0_default() {
        let d = square();
        let mut two = vec![peak(vec![1.0, 0.0]), peak(vec![1.0, 1.0])];
        two.iter_mut().for_each(|p| p.coeff = 16.0);
        let w = WeightModel::new(&d, 2.0, 1.0, two, 1.0).unwrap();
        assert!((w.default_r0() - 0.45).abs() < 1e-15);
        assert_eq!(w.peak_at(&[1.0, 1.0], 1e-9), Some(1));
    }
}
