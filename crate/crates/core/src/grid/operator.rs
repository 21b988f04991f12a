use super::domain::DomainKind;

/// The discrete Laplacian as a sparse map from node values to interior rows.
///
/// 2-D rows use the 5-point stencil. Radial rows use
/// `u'' + u'/r` with central differences; the centre row uses the
/// reflection `u₋₁ = u₁`, giving `Δu(0) = 2u''(0) = 4(u₁ − u₀)/h²`.
#[derive(Debug, Clone)]
pub(crate) struct LaplaceOperator {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    coeffs: Vec<f64>,
}

impl LaplaceOperator {
    pub(crate) fn build(kind: DomainKind, n: usize, h: f64, interior: &[usize]) -> Self {
        let inv_h2 = 1.0 / (h * h);
        let mut row_start = Vec::with_capacity(interior.len() + 1);
        let mut cols = Vec::with_capacity(5 * interior.len());
        let mut coeffs = Vec::with_capacity(5 * interior.len());
        row_start.push(0);
        for &node in interior {
            match kind {
                DomainKind::Radial if node == 0 => {
                    cols.extend([0, 1]);
                    coeffs.extend([-4.0 * inv_h2, 4.0 * inv_h2]);
                }
                DomainKind::Radial => {
                    let drift = 1.0 / (2.0 * node as f64 * h * h);
                    cols.extend([node - 1, node, node + 1]);
                    coeffs.extend([inv_h2 - drift, -2.0 * inv_h2, inv_h2 + drift]);
                }
                _ => {
                    cols.extend([node - n, node - 1, node, node + 1, node + n]);
                    coeffs.extend([inv_h2, inv_h2, -4.0 * inv_h2, inv_h2, inv_h2]);
                }
            }
            row_start.push(cols.len());
        }
        Self { row_start, cols, coeffs }
    }

    pub(crate) fn rows(&self) -> usize {
        self.row_start.len() - 1
    }

    pub(crate) fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_start[k]..self.row_start[k + 1];
        self.cols[span.clone()].iter().copied().zip(self.coeffs[span].iter().copied())
    }

    /// Laplacian at each interior row.
    pub(crate) fn apply(&self, values: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|k| self.row(k).map(|(c, a)| a * values[c]).sum())
            .collect()
    }

    /// Accumulates `Lᵀ·rows` into `out`, indexed by node.
    pub(crate) fn apply_transpose_add(&self, rows: &[f64], out: &mut [f64]) {
        for (k, r) in rows.iter().enumerate() {
            for (c, a) in self.row(k) {
                out[c] += a * r;
            }
        }
    }
}
