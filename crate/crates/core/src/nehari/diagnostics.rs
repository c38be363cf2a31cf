use super::minimize::IterRecord;
use crate::error::{Error, Result};

/// Relative energy change per iterate below which the energy counts as flat.
pub const PLATEAU_REL_CHANGE: f64 = 1e-6;
/// Consecutive flat iterates making a plateau.
pub const PLATEAU_MIN_LEN: usize = 5;
/// Plateaus within this relative distance below c* are flagged too.
pub const PLATEAU_BAND: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: usize,
    pub end: usize,
    pub level: f64,
    /// level >= (1 - PLATEAU_BAND) c*: the signature of lost compactness.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsReport {
    pub energies: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub plateaus: Vec<Plateau>,
    pub c_star: f64,
}

impl PsReport {
    pub fn flagged(&self) -> bool {
        self.plateaus.iter().any(|p| p.flagged)
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("non-empty history")
    }

    pub fn final_grad_norm(&self) -> f64 {
        *self.grad_norms.last().expect("non-empty history")
    }
}

/// Energy and gradient sequences of a run, with energy plateaus located and compared to c*.
pub fn ps_diagnostics(history: &[IterRecord], c_star: f64) -> Result<PsReport> {
    if history.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let energies: Vec<f64> = history.iter().map(|h| h.energy).collect();
    let grad_norms: Vec<f64> = history.iter().map(|h| h.grad_norm).collect();
    let mut plateaus = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        let flat = i < energies.len()
            && (energies[i] - energies[i - 1]).abs() <= PLATEAU_REL_CHANGE * energies[i - 1].abs().max(f64::MIN_POSITIVE);
        if !flat {
            if i - start >= PLATEAU_MIN_LEN {
                let level = energies[i - 1];
                plateaus.push(Plateau {
                    start: history[start].iter,
                    end: history[i - 1].iter,
                    level,
                    flagged: level >= (1.0 - PLATEAU_BAND) * c_star,
                });
            }
            start = i;
        }
    }
    Ok(PsReport { energies, grad_norms, plateaus, c_star })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(iter: usize, energy: f64, grad_norm: f64) -> IterRecord {
        IterRecord { iter, energy, grad_norm, hs_sq: 1.0, step: 1.0 }
    }

    #[test]
    fn single_row() {
        let r = ps_diagnostics(&[rec(0, 0.3, 1.0)], 0.5).unwrap();
        assert_eq!(r.energies.len(), 1);
        assert!(r.plateaus.is_empty());
        assert!(ps_diagnostics(&[], 0.5).is_err());
    }

    #[test]
    fn plateau_near_threshold() {
        let mut h: Vec<IterRecord> = (0..4).map(|i| rec(i, 1.0 - 0.1 * i as f64, 1.0)).collect();
        h.extend((4..12).map(|i| rec(i, 0.5, 1e-3)));
        let r = ps_diagnostics(&h, 0.5).unwrap();
        assert_eq!(r.plateaus.len(), 1);
        assert!(r.flagged());
        assert_eq!(r.plateaus[0].start, 4);
        assert!(!ps_diagnostics(&h, 0.9).unwrap().flagged());
    }
}
