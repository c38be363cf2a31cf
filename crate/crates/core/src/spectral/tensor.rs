//! Axis-by-axis contraction of row-major tensors with small dense matrices.

use rayon::prelude::*;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }
}

const PAR_THRESHOLD: usize = 1 << 15;

/// Replace axis `axis` (extent `b.rows`) by extent `b.cols`:
/// out[.., o, ..] = sum_i t[.., i, ..] * b[i, o].
pub fn contract_axis(t: &[f64], dims: &[usize], axis: usize, b: &Matrix) -> (Vec<f64>, Vec<usize>) {
    assert_eq!(dims[axis], b.rows, "contraction extent mismatch");
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let (n_in, n_out) = (b.rows, b.cols);
    let mut out = vec![0.0; outer * n_out * inner];
    let kernel = |o_blk: &mut [f64], src: &[f64]| {
        for i in 0..n_in {
            let row = &src[i * inner..(i + 1) * inner];
            for o in 0..n_out {
                let c = b.get(i, o);
                if c == 0.0 {
                    continue;
                }
                let dst = &mut o_blk[o * inner..(o + 1) * inner];
                for (d, s) in dst.iter_mut().zip(row) {
                    *d += c * s;
                }
            }
        }
    };
    if outer * n_out * inner * n_in >= PAR_THRESHOLD && outer > 1 {
        out.par_chunks_mut(n_out * inner)
            .zip(t.par_chunks(n_in * inner))
            .for_each(|(o_blk, src)| kernel(o_blk, src));
    } else if inner >= 64 && n_out > 1 && outer == 1 {
        // Single outer block: parallelize over output rows instead.
        out.par_chunks_mut(inner).enumerate().for_each(|(o, dst)| {
            for i in 0..n_in {
                let c = b.get(i, o);
                if c != 0.0 {
                    for (d, s) in dst.iter_mut().zip(&t[i * inner..(i + 1) * inner]) {
                        *d += c * s;
                    }
                }
            }
        });
    } else {
        for (o_blk, src) in out.chunks_mut(n_out * inner).zip(t.chunks(n_in * inner)) {
            kernel(o_blk, src);
        }
    }
    let mut nd = dims.to_vec();
    nd[axis] = n_out;
    (out, nd)
}

/// Apply one matrix per axis.
pub fn contract_all(t: Vec<f64>, dims: &[usize], mats: &[&Matrix]) -> Vec<f64> {
    let mut cur = t;
    let mut d = dims.to_vec();
    for (a, m) in mats.iter().enumerate() {
        let (n, nd) = contract_axis(&cur, &d, a, m);
        cur = n;
        d = nd;
    }
    cur
}
