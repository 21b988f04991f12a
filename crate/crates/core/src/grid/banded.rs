use crate::error::{domain, Result};

/// Cholesky factorization of a symmetric positive definite band matrix.
///
/// Only the lower band is stored: entry `(i, i − k)` for `k ≤ bandwidth`
/// lives at `i·(bandwidth + 1) + k`.
#[derive(Debug, Clone)]
pub(crate) struct BandedCholesky {
    dim: usize,
    bandwidth: usize,
    data: Vec<f64>,
    factored: bool,
}

impl BandedCholesky {
    pub(crate) fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth,
            data: vec![0.0; dim * (bandwidth + 1)],
            factored: false,
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bandwidth + 1) + (i - j)
    }

    /// Adds `v` to entry `(i, j)` with `j ≤ i`.
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub(crate) fn factor(&mut self) -> Result<()> {
        let bw = self.bandwidth;
        for i in 0..self.dim {
            let first = i.saturating_sub(bw);
            for j in first..=i {
                let mut s = self.data[self.idx(i, j)];
                for k in first.max(j.saturating_sub(bw))..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return domain(format!("matrix is not positive definite at row {i}"));
                    }
                    let k = self.idx(i, i);
                    self.data[k] = s.sqrt();
                } else {
                    let k = self.idx(i, j);
                    self.data[k] = s / self.data[self.idx(j, j)];
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    pub(crate) fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        let bw = self.bandwidth;
        for i in 0..self.dim {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.data[self.idx(i, k)] * b[k];
            }
            b[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..self.dim).rev() {
            let mut s = b[i];
            for k in i + 1..(i + bw + 1).min(self.dim) {
                s -= self.data[self.idx(k, i)] * b[k];
            }
            b[i] = s / self.data[self.idx(i, i)];
        }
    }
}
