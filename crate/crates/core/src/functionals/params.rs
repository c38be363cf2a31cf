use crate::error::{Error, Result};
use crate::spectral::FractionalParams;

/// Perturbation strength and subcritical exponent of the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub lambda: f64,
    pub q: f64,
    pub frac: FractionalParams,
}

impl ProblemParams {
    pub fn new(lambda: f64, q: f64, frac: FractionalParams) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        let upper = frac.crit_exp - 1.0;
        if !(q >= 1.0) {
            return Err(Error::InvalidParameter(format!("q must be >= 1, got {q}")));
        }
        if !(q < upper) {
            return Err(Error::InvalidParameter(format!("q must be < 2*_s - 1 = {upper}, got {q}")));
        }
        Ok(Self { lambda, q, frac })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.q, self.frac)
    }

    pub fn required_alpha(&self) -> Result<AlphaRequirement> {
        required_alpha(self.frac.dim, self.frac.s, self.q)
    }
}

/// Local flatness the weight needs at its maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRequirement {
    /// Any alpha in the open interval (0, N).
    Free { upper: f64 },
    /// alpha = N - (N - 2s)(q + 1)/2.
    Exact(f64),
}

impl AlphaRequirement {
    pub fn admits(&self, alpha: f64) -> bool {
        match *self {
            AlphaRequirement::Free { upper } => alpha > 0.0 && alpha < upper,
            AlphaRequirement::Exact(a) => (alpha - a).abs() <= 1e-12 * a.abs().max(1.0),
        }
    }
}

/// Which of the three flatness regimes a triple (N, s, q) falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatnessRegime {
    /// N in {2, 3}, 1 < q <= (6s - N)/(N - 2s).
    LowDimSmallQ,
    /// N in {2, 3}, (6s - N)/(N - 2s) < q < (N + 2s)/(N - 2s).
    LowDimLargeQ,
    /// N >= 4, 1 <= q < (N + 2s)/(N - 2s).
    HighDim,
}

pub fn flatness_regime(dim: usize, s: f64, q: f64) -> Result<FlatnessRegime> {
    let n = dim as f64;
    let top = (n + 2.0 * s) / (n - 2.0 * s);
    let mid = (6.0 * s - n) / (n - 2.0 * s);
    let bad = || {
        Err(Error::InvalidParameter(format!(
            "(N, s, q) = ({dim}, {s}, {q}) matches no admissible flatness regime"
        )))
    };
    if !(n > 2.0 * s) || !(q < top) {
        return bad();
    }
    match dim {
        2 | 3 if q > 1.0 && q <= mid => Ok(FlatnessRegime::LowDimSmallQ),
        2 | 3 if q > 1.0 && q > mid => Ok(FlatnessRegime::LowDimLargeQ),
        d if d >= 4 && q >= 1.0 => Ok(FlatnessRegime::HighDim),
        _ => bad(),
    }
}

pub fn required_alpha(dim: usize, s: f64, q: f64) -> Result<AlphaRequirement> {
    let n = dim as f64;
    Ok(match flatness_regime(dim, s, q)? {
        FlatnessRegime::LowDimSmallQ => AlphaRequirement::Free { upper: n },
        _ => AlphaRequirement::Exact(n - (n - 2.0 * s) * (q + 1.0) / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_table() {
        assert_eq!(required_alpha(4, 0.75, 1.0).unwrap(), AlphaRequirement::Exact(1.5));
        assert_eq!(required_alpha(2, 0.75, 2.0).unwrap(), AlphaRequirement::Free { upper: 2.0 });
        assert!(required_alpha(3, 0.9, 5.0).is_err());
        assert!(required_alpha(2, 0.75, 1.0).is_err());
        // (6s - N)/(N - 2s) = 2 for N = 3, s = 0.9; q = 3 is in the upper band.
        let a = required_alpha(3, 0.9, 3.0).unwrap();
        assert!(matches!(a, AlphaRequirement::Exact(x) if (x - 3.0 + 1.2 * 2.0).abs() < 1e-12));
    }

    #[test]
    fn problem_params_bounds() {
        let f = FractionalParams::new(0.75, 2).unwrap();
        assert!(ProblemParams::new(1.0, 7.0, f).is_err());
        assert!(ProblemParams::new(1.0, 0.5, f).is_err());
        assert!(ProblemParams::new(-1.0, 2.0, f).is_err());
        assert!(ProblemParams::new(0.0, 6.99, f).is_ok());
    }
}
