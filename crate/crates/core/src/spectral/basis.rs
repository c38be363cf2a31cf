use std::cmp::Ordering;

use super::domain::{AxisKind, MixedRectangleDomain};
use super::tensor::{contract_all, Matrix};
use crate::error::{Error, Result};
use crate::special::GaussLegendre;

/// Largest tolerated deviation of the 1D Gram matrices from the identity.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Closed-form eigenbasis of the mixed-BC Laplacian, truncated to M modes per axis,
/// with a tensor Gauss-Legendre grid.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    domain: MixedRectangleDomain,
    modes_per_axis: usize,
    quad_points: usize,
    eigenvalues: Vec<f64>,
    /// Per-axis mode indices of each basis function, in sorted order.
    modes: Vec<Vec<usize>>,
    /// Position in the M^N tensor layout of each sorted mode.
    tensor_slot: Vec<usize>,
    axis_nodes: Vec<Vec<f64>>,
    axis_weights: Vec<Vec<f64>>,
    /// Per axis: M x Q samples of the 1D eigenfunctions.
    axis_samples: Vec<Matrix>,
    axis_samples_t: Vec<Matrix>,
    weights: Vec<f64>,
}

impl EigenBasis {
    /// Default quadrature resolution for M modes per axis.
    pub fn recommended_quad_points(modes_per_axis: usize) -> usize {
        2 * modes_per_axis + 16
    }

    pub fn new(domain: &MixedRectangleDomain, modes_per_axis: usize, quad_points_per_axis: usize) -> Result<Self> {
        if modes_per_axis == 0 {
            return Err(Error::InvalidParameter("modes_per_axis must be at least 1".into()));
        }
        if quad_points_per_axis < 2 * modes_per_axis {
            return Err(Error::InvalidParameter(format!(
                "quad_points_per_axis = {quad_points_per_axis} is below the anti-aliasing floor 2M = {}",
                2 * modes_per_axis
            )));
        }
        let dim = domain.dim();
        let m = modes_per_axis;
        let q = quad_points_per_axis;
        let gl = GaussLegendre::new(q);
        let mut axis_nodes = Vec::with_capacity(dim);
        let mut axis_weights = Vec::with_capacity(dim);
        let mut axis_samples = Vec::with_capacity(dim);
        for a in 0..dim {
            let l = domain.lengths()[a];
            let kind = domain.axis_kind(a);
            let (xs, ws): (Vec<f64>, Vec<f64>) = gl.on(0.0, l).unzip();
            let samples = Matrix::from_fn(m, q, |k, g| kind.eval(k, l, xs[g]));
            let dev = gram_deviation(&samples, &ws);
            if dev > ORTHONORMALITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "{q} quadrature points per axis leave a Gram deviation of {dev:.2e} on axis {a}; \
                     use at least {}",
                    Self::recommended_quad_points(m)
                )));
            }
            axis_nodes.push(xs);
            axis_weights.push(ws);
            axis_samples.push(samples);
        }

        let (modes, eigenvalues) = sorted_modes(domain, m);
        let tensor_slot = modes
            .iter()
            .map(|idx| idx.iter().fold(0usize, |acc, &k| acc * m + k))
            .collect();
        let mut weights = vec![1.0];
        for ws in &axis_weights {
            weights = weights.iter().flat_map(|a| ws.iter().map(move |w| a * w)).collect();
        }
        let axis_samples_t = axis_samples.iter().map(Matrix::transpose).collect();
        Ok(Self {
            domain: domain.clone(),
            modes_per_axis: m,
            quad_points: q,
            eigenvalues,
            modes,
            tensor_slot,
            axis_nodes,
            axis_weights,
            axis_samples,
            axis_samples_t,
            weights,
        })
    }

    pub fn domain(&self) -> &MixedRectangleDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn modes_per_axis(&self) -> usize {
        self.modes_per_axis
    }

    pub fn quad_points_per_axis(&self) -> usize {
        self.quad_points
    }

    /// Number of basis functions, M^N.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mode(&self, j: usize) -> &[usize] {
        &self.modes[j]
    }

    pub fn grid_len(&self) -> usize {
        self.weights.len()
    }

    pub fn grid_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn axis_nodes(&self, axis: usize) -> &[f64] {
        &self.axis_nodes[axis]
    }

    pub fn axis_weights(&self, axis: usize) -> &[f64] {
        &self.axis_weights[axis]
    }

    /// Coordinates of grid node `g` (row-major, last axis fastest).
    pub fn grid_point(&self, g: usize) -> Vec<f64> {
        let q = self.quad_points;
        let mut rest = g;
        let mut p = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            p[a] = self.axis_nodes[a][rest % q];
            rest /= q;
        }
        p
    }

    /// Evaluate basis function j at an arbitrary point.
    pub fn eval_mode(&self, j: usize, x: &[f64]) -> f64 {
        self.modes[j]
            .iter()
            .enumerate()
            .map(|(a, &k)| self.domain.axis_kind(a).eval(k, self.domain.lengths()[a], x[a]))
            .product()
    }

    /// Smallest 1D frequency excluded on any axis by the truncation.
    pub fn cutoff_frequency(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.domain.axis_kind(a).frequency(self.modes_per_axis, self.domain.lengths()[a]))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn scatter(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; self.modes_per_axis.pow(self.dim() as u32)];
        for (c, &slot) in coeffs.iter().zip(&self.tensor_slot) {
            t[slot] = *c;
        }
        t
    }

    pub(crate) fn gather(&self, t: &[f64]) -> Vec<f64> {
        self.tensor_slot.iter().map(|&s| t[s]).collect()
    }

    /// Grid values of the expansion with the given coefficients.
    pub(crate) fn synthesize_raw(&self, coeffs: &[f64]) -> Vec<f64> {
        let dims = vec![self.modes_per_axis; self.dim()];
        let mats: Vec<&Matrix> = self.axis_samples.iter().collect();
        contract_all(self.scatter(coeffs), &dims, &mats)
    }

    /// Quadrature inner products with every basis function.
    pub(crate) fn analyze_raw(&self, values: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = values.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        let dims = vec![self.quad_points; self.dim()];
        let mats: Vec<&Matrix> = self.axis_samples_t.iter().collect();
        self.gather(&contract_all(weighted, &dims, &mats))
    }

    /// Inner products <f, phi_j> for f sampled on an arbitrary tensor grid
    /// (per-axis nodes and weights, values row-major).
    pub fn project_tensor_grid(&self, nodes: &[Vec<f64>], weights: &[Vec<f64>], values: &[f64]) -> Result<Vec<f64>> {
        if nodes.len() != self.dim() || weights.len() != self.dim() {
            return Err(Error::ShapeMismatch { expected: self.dim(), got: nodes.len() });
        }
        let dims: Vec<usize> = nodes.iter().map(Vec::len).collect();
        let total: usize = dims.iter().product();
        if values.len() != total {
            return Err(Error::ShapeMismatch { expected: total, got: values.len() });
        }
        let m = self.modes_per_axis;
        let mats: Vec<Matrix> = (0..self.dim())
            .map(|a| {
                let kind = self.domain.axis_kind(a);
                let l = self.domain.lengths()[a];
                Matrix::from_fn(nodes[a].len(), m, |g, k| weights[a][g] * kind.eval(k, l, nodes[a][g]))
            })
            .collect();
        let refs: Vec<&Matrix> = mats.iter().collect();
        Ok(self.gather(&contract_all(values.to_vec(), &dims, &refs)))
    }
}

fn gram_deviation(samples: &Matrix, w: &[f64]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..samples.rows {
        for j in 0..=i {
            let g: f64 = (0..samples.cols).map(|k| samples.get(i, k) * samples.get(j, k) * w[k]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - target).abs());
        }
    }
    dev
}

/// All M^N tensor modes sorted by eigenvalue, ties broken lexicographically.
fn sorted_modes(domain: &MixedRectangleDomain, m: usize) -> (Vec<Vec<usize>>, Vec<f64>) {
    let dim = domain.dim();
    let lengths = domain.lengths();
    // Axes of equal length share a group so that tied eigenvalues compare exactly.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (a, &l) in lengths.iter().enumerate() {
        match groups.iter_mut().find(|(gl, _)| *gl == l) {
            Some((_, axes)) => axes.push(a),
            None => groups.push((l, vec![a])),
        }
    }
    let kinds: Vec<AxisKind> = (0..dim).map(|a| domain.axis_kind(a)).collect();
    let key = |idx: &[usize]| -> f64 {
        groups
            .iter()
            .map(|(l, axes)| {
                let s: u64 = axes.iter().map(|&a| kinds[a].doubled_index(idx[a]).pow(2)).sum();
                s as f64 / (l * l)
            })
            .sum()
    };
    let total = m.pow(dim as u32);
    let mut entries: Vec<(f64, Vec<usize>)> = (0..total)
        .map(|mut t| {
            let mut idx = vec![0; dim];
            for a in (0..dim).rev() {
                idx[a] = t % m;
                t /= m;
            }
            (key(&idx), idx)
        })
        .collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(&b.1)));
    let quarter_pi2 = std::f64::consts::PI.powi(2) / 4.0;
    let eig = entries.iter().map(|(k, _)| quarter_pi2 * k).collect();
    (entries.into_iter().map(|(_, i)| i).collect(), eig)
}
