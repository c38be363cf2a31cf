//! Composite Gauss-Legendre rules on graded panels.

use rayon::prelude::*;

use crate::special::{composite, GaussLegendre};

/// Breakpoints on [lo, hi] clustered geometrically around `c`: panel edges at
/// c +- d_k with d_1 = `first`, d_{k+1} = ratio d_k, capped so that no panel is
/// wider than `h_max`. `extra` offsets from `c` are inserted as well.
pub fn graded_breaks(lo: f64, hi: f64, c: f64, first: f64, ratio: f64, h_max: f64, extra: &[f64]) -> Vec<f64> {
    debug_assert!(lo < hi && first > 0.0 && ratio > 1.0 && h_max > 0.0);
    let mut b = vec![lo, hi];
    if c > lo && c < hi {
        b.push(c);
    }
    for dir in [-1.0, 1.0] {
        let end = if dir < 0.0 { c - lo } else { hi - c };
        if end <= 0.0 {
            continue;
        }
        let mut d = 0.0;
        let mut step = first;
        loop {
            d += step.min(h_max);
            if d >= end {
                break;
            }
            b.push(c + dir * d);
            step *= ratio;
        }
        for e in extra {
            if *e > 0.0 && *e < end {
                b.push(c + dir * e);
            }
        }
    }
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    refine_wide(b, h_max)
}

/// Split panels wider than `h_max` uniformly.
pub fn refine_wide(b: Vec<f64>, h_max: f64) -> Vec<f64> {
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        let n = ((w[1] - w[0]) / h_max).ceil().max(1.0) as usize;
        for i in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    out
}

/// Tensor product of per-axis composite rules.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
}

impl TensorRule {
    pub fn from_breaks(breaks: &[Vec<f64>], points_per_panel: usize) -> Self {
        let gl = GaussLegendre::new(points_per_panel);
        let (nodes, weights) = breaks.iter().map(|b| composite(&gl, b)).unzip();
        Self { nodes, weights }
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values of f at every node, row-major (last axis fastest).
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
        let dims: Vec<usize> = self.nodes.iter().map(Vec::len).collect();
        let inner: usize = dims[1..].iter().product();
        let mut out = vec![0.0; self.len()];
        out.par_chunks_mut(inner.max(1)).enumerate().for_each(|(i0, chunk)| {
            let mut x = vec![0.0; self.dim()];
            x[0] = self.nodes[0][i0];
            for (k, v) in chunk.iter_mut().enumerate() {
                let mut rest = k;
                for a in (1..self.dim()).rev() {
                    x[a] = self.nodes[a][rest % dims[a]];
                    rest /= dims[a];
                }
                *v = f(&x);
            }
        });
        out
    }

    /// sum_g w_g f(x_g).
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let dims: Vec<usize> = self.nodes.iter().map(Vec::len).collect();
        let inner: usize = dims[1..].iter().product();
        let partial: Vec<f64> = (0..dims[0])
            .into_par_iter()
            .map(|i0| {
                let mut x = vec![0.0; self.dim()];
                x[0] = self.nodes[0][i0];
                let mut acc = 0.0;
                for k in 0..inner.max(1) {
                    let mut rest = k;
                    let mut w = self.weights[0][i0];
                    for a in (1..self.dim()).rev() {
                        let idx = rest % dims[a];
                        x[a] = self.nodes[a][idx];
                        w *= self.weights[a][idx];
                        rest /= dims[a];
                    }
                    acc += w * f(&x);
                }
                acc
            })
            .collect();
        partial.iter().sum()
    }
}

/// int_a^b f on uniform panels with n-point rules.
pub fn integrate_panels(breaks: &[f64], n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(n);
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        for (x, wx) in gl.on(w[0], w[1]) {
            acc += wx * f(x);
        }
    }
    acc
}
