use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::banded::BandedCholesky;
use super::operator::LaplaceOperator;
use crate::error::{domain, Result};

/// Smallest accepted node count per axis.
pub const MIN_NODES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// Unit disk masked out of the square `[−1, 1]²`.
    Disk,
    /// The full square `[−1, 1]²`.
    Rectangle,
    /// Radial mesh `r_i = i/(n − 1)` on `[0, 1]` for radial fields on the unit disk.
    Radial,
}

impl DomainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainKind::Disk => "disk-mask-2d",
            DomainKind::Rectangle => "rectangle-2d",
            DomainKind::Radial => "radial-1d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "disk-mask-2d" | "disk" => Some(DomainKind::Disk),
            "rectangle-2d" | "rectangle" => Some(DomainKind::Rectangle),
            "radial-1d" | "radial" => Some(DomainKind::Radial),
            _ => None,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            DomainKind::Radial => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

/// A uniform grid with a node mask and pinned boundary values.
///
/// 2-D nodes are numbered row-major, `node = j·n + i` at
/// `(−1 + i·h, −1 + j·h)`. Radial nodes sit at `r_i = i·h`; node `0` is the
/// centre (interior, closed by reflection) and node `n − 1` is the boundary.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    kind: DomainKind,
    n: usize,
    h: f64,
    mask: Vec<NodeKind>,
    boundary_values: Vec<f64>,
    /// Quadrature weight of each node's cell; zero outside the domain.
    weights: Vec<f64>,
    interior: Vec<usize>,
    interior_index: Vec<Option<usize>>,
    laplace: LaplaceOperator,
}

impl DiscreteDomain {
    /// Builds a domain whose boundary nodes take `boundary(x, y)`; radial
    /// domains sample `boundary(1, 0)`.
    pub fn new(kind: DomainKind, n: usize, boundary: impl Fn(f64, f64) -> f64) -> Result<Arc<Self>> {
        if n < MIN_NODES {
            return domain(format!("grid needs at least {MIN_NODES} nodes per axis, got {n}"));
        }
        let (h, node_count) = match kind {
            DomainKind::Radial => (1.0 / (n - 1) as f64, n),
            _ => (2.0 / (n - 1) as f64, n * n),
        };
        let mut mask = vec![NodeKind::Exterior; node_count];
        match kind {
            DomainKind::Radial => {
                mask.iter_mut().for_each(|m| *m = NodeKind::Interior);
                mask[n - 1] = NodeKind::Boundary;
            }
            DomainKind::Rectangle => {
                for j in 0..n {
                    for i in 0..n {
                        let edge = i == 0 || j == 0 || i == n - 1 || j == n - 1;
                        mask[j * n + i] = if edge { NodeKind::Boundary } else { NodeKind::Interior };
                    }
                }
            }
            DomainKind::Disk => {
                let inside = |i: isize, j: isize| {
                    if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                        return false;
                    }
                    let x = -1.0 + i as f64 * h;
                    let y = -1.0 + j as f64 * h;
                    x * x + y * y < 1.0
                };
                for j in 0..n as isize {
                    for i in 0..n as isize {
                        if !inside(i, j) {
                            continue;
                        }
                        let all = inside(i - 1, j) && inside(i + 1, j) && inside(i, j - 1) && inside(i, j + 1);
                        mask[j as usize * n + i as usize] =
                            if all { NodeKind::Interior } else { NodeKind::Boundary };
                    }
                }
            }
        }

        let mut weights = vec![0.0; node_count];
        match kind {
            DomainKind::Radial => {
                for (i, w) in weights.iter_mut().enumerate() {
                    *w = 2.0 * PI * i as f64 * h * h;
                }
                weights[0] = PI * h * h / 4.0;
                weights[n - 1] = PI * (h - h * h / 4.0);
            }
            _ => {
                for (w, m) in weights.iter_mut().zip(&mask) {
                    if *m != NodeKind::Exterior {
                        *w = h * h;
                    }
                }
            }
        }

        let mut interior = Vec::new();
        let mut interior_index = vec![None; node_count];
        for (node, m) in mask.iter().enumerate() {
            if *m == NodeKind::Interior {
                interior_index[node] = Some(interior.len());
                interior.push(node);
            }
        }

        let mut boundary_values = vec![0.0; node_count];
        for (node, m) in mask.iter().enumerate() {
            if *m == NodeKind::Boundary {
                let (x, y) = match kind {
                    DomainKind::Radial => (1.0, 0.0),
                    _ => (-1.0 + (node % n) as f64 * h, -1.0 + (node / n) as f64 * h),
                };
                boundary_values[node] = boundary(x, y);
            }
        }

        let laplace = LaplaceOperator::build(kind, n, h, &interior);
        Ok(Arc::new(Self {
            kind,
            n,
            h,
            mask,
            boundary_values,
            weights,
            interior,
            interior_index,
            laplace,
        }))
    }

    pub fn with_constant(kind: DomainKind, n: usize, u0: f64) -> Result<Arc<Self>> {
        Self::new(kind, n, |_, _| u0)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[NodeKind] {
        &self.mask
    }

    pub fn boundary_values(&self) -> &[f64] {
        &self.boundary_values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Interior node ids in degree-of-freedom order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_index[node]
    }

    pub(crate) fn laplace(&self) -> &LaplaceOperator {
        &self.laplace
    }

    /// Physical coordinates; radial nodes report `(r, 0)`.
    pub fn coords(&self, node: usize) -> (f64, f64) {
        match self.kind {
            DomainKind::Radial => (node as f64 * self.h, 0.0),
            _ => (
                -1.0 + (node % self.n) as f64 * self.h,
                -1.0 + (node / self.n) as f64 * self.h,
            ),
        }
    }

    pub fn radius(&self, node: usize) -> f64 {
        let (x, y) = self.coords(node);
        x.hypot(y)
    }

    /// Total quadrature weight, the discrete measure of the domain.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_inside(&self, node: usize) -> bool {
        self.mask[node] != NodeKind::Exterior
    }

    pub fn boundary_mean(&self) -> f64 {
        let (sum, count) = self
            .mask
            .iter()
            .zip(&self.boundary_values)
            .filter(|(m, _)| **m == NodeKind::Boundary)
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Node values on a [`DiscreteDomain`]; exterior nodes carry zero.
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Arc<DiscreteDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: Arc<DiscreteDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.node_count() {
            return domain_err_len(values.len(), domain.node_count());
        }
        let mut values = values;
        for (v, m) in values.iter_mut().zip(domain.mask()) {
            if *m == NodeKind::Exterior {
                *v = 0.0;
            }
        }
        Ok(Self { domain, values })
    }

    /// Samples `f(x, y)` at every node inside the domain, boundary included.
    pub fn from_fn(domain: &Arc<DiscreteDomain>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..domain.node_count())
            .map(|node| {
                if domain.is_inside(node) {
                    let (x, y) = domain.coords(node);
                    f(x, y)
                } else {
                    0.0
                }
            })
            .collect();
        Self { domain: domain.clone(), values }
    }

    /// Samples a radial profile `f(|x|)` and pins the boundary nodes.
    pub fn from_radial_profile(domain: &Arc<DiscreteDomain>, f: impl Fn(f64) -> f64) -> Self {
        let mut field = Self::from_fn(domain, |x, y| f(x.hypot(y)));
        field.pin_boundary();
        field
    }

    /// Samples `f` and zeroes it on boundary nodes, as required of test functions.
    pub fn test_function(domain: &Arc<DiscreteDomain>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::from_fn(domain, f);
        for (v, m) in field.values.iter_mut().zip(domain.mask()) {
            if *m == NodeKind::Boundary {
                *v = 0.0;
            }
        }
        field
    }

    /// Discrete harmonic extension of the boundary values; for radial
    /// domains this is the constant boundary value.
    pub fn harmonic_extension(domain: &Arc<DiscreteDomain>) -> Result<Self> {
        let mut values = domain.boundary_values().to_vec();
        match domain.kind() {
            DomainKind::Radial => {
                let u0 = domain.boundary_values()[domain.n() - 1];
                values.iter_mut().for_each(|v| *v = u0);
            }
            _ => {
                // −h²Δ_h on the interior is the symmetric positive definite 5-point matrix.
                let n = domain.n();
                let interior = domain.interior();
                let mut rhs = vec![0.0; interior.len()];
                let neighbours = |node: usize| [node - 1, node + 1, node - n, node + n];
                let bw = interior
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &node)| {
                        neighbours(node)
                            .into_iter()
                            .filter_map(|nb| domain.interior_index(nb))
                            .map(move |j| k.abs_diff(j))
                    })
                    .max()
                    .unwrap_or(0);
                let mut chol = BandedCholesky::zeros(interior.len(), bw);
                for (k, &node) in interior.iter().enumerate() {
                    chol.add(k, k, 4.0);
                    for nb in neighbours(node) {
                        match domain.interior_index(nb) {
                            Some(j) if j < k => chol.add(k, j, -1.0),
                            Some(_) => {}
                            None => rhs[k] += domain.boundary_values()[nb],
                        }
                    }
                }
                chol.factor()?;
                chol.solve_in_place(&mut rhs);
                for (k, &node) in interior.iter().enumerate() {
                    values[node] = rhs[k];
                }
            }
        }
        Ok(Self { domain: domain.clone(), values })
    }

    pub fn domain(&self) -> &Arc<DiscreteDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Overwrites boundary nodes with the domain's boundary values.
    pub fn pin_boundary(&mut self) {
        for ((v, m), b) in self
            .values
            .iter_mut()
            .zip(self.domain.mask())
            .zip(self.domain.boundary_values())
        {
            if *m == NodeKind::Boundary {
                *v = *b;
            }
        }
    }

    /// Largest deviation from the pinned boundary values.
    pub fn boundary_defect(&self) -> f64 {
        self.values
            .iter()
            .zip(self.domain.mask())
            .zip(self.domain.boundary_values())
            .filter(|((_, m), _)| **m == NodeKind::Boundary)
            .map(|((v, _), b)| (v - b).abs())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance over nodes inside the domain.
    pub fn max_distance(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.domain.mask())
            .filter(|(_, m)| **m != NodeKind::Exterior)
            .map(|((a, b), _)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn domain_err_len<T>(got: usize, want: usize) -> Result<T> {
    domain(format!("field has {got} values but the domain has {want} nodes"))
}
