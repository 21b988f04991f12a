//! The smoothed energy `Σ (Δ_h u)²·w + Σ H_ε(u)·w` and its gradient.
//!
//! `w` is the node quadrature weight: `h²` in 2-D, the annulus area
//! `2π·r·h` on the radial mesh (a quarter-cell disk at the centre and a
//! half cell at `r = 1`). The Laplacian term runs over interior rows only;
//! the area term runs over every node inside the domain. Pinning only
//! boundary values makes `Δu = 0` at the boundary the natural condition.

use super::domain::{NodeKind, ScalarField};

/// `H_ε(t) = ½(1 + tanh(t/ε))`.
pub fn smoothed_heaviside(t: f64, eps: f64) -> f64 {
    0.5 * (1.0 + (t / eps).tanh())
}

/// `H_ε'(t) = (1 − tanh²(t/ε)) / (2ε)`.
pub fn smoothed_heaviside_prime(t: f64, eps: f64) -> f64 {
    let th = (t / eps).tanh();
    0.5 * (1.0 - th * th) / eps
}

/// `H_ε''(t) = −tanh(t/ε)·(1 − tanh²(t/ε)) / ε²`.
pub fn smoothed_heaviside_second(t: f64, eps: f64) -> f64 {
    let th = (t / eps).tanh();
    -th * (1.0 - th * th) / (eps * eps)
}

/// `Δ_h u` on interior nodes, zero elsewhere.
pub fn discrete_laplacian(u: &ScalarField) -> ScalarField {
    let domain = u.domain();
    let rows = domain.laplace().apply(u.values());
    let mut out = vec![0.0; domain.node_count()];
    for (&node, v) in domain.interior().iter().zip(rows) {
        out[node] = v;
    }
    ScalarField::new(domain.clone(), out).expect("length matches domain")
}

/// `Σ_interior (Δ_h u)²·w`.
pub fn bending_energy(u: &ScalarField) -> f64 {
    let domain = u.domain();
    let w = domain.weights();
    domain
        .laplace()
        .apply(u.values())
        .iter()
        .zip(domain.interior())
        .map(|(l, &node)| l * l * w[node])
        .sum()
}

pub fn smoothed_energy(u: &ScalarField, eps: f64) -> f64 {
    let domain = u.domain();
    let area: f64 = u
        .values()
        .iter()
        .zip(domain.weights())
        .map(|(&v, &w)| if w > 0.0 { smoothed_heaviside(v, eps) * w } else { 0.0 })
        .sum();
    bending_energy(u) + area
}

/// Weighted count of nodes with `u > 0`.
pub fn positive_measure(u: &ScalarField) -> f64 {
    u.values()
        .iter()
        .zip(u.domain().weights())
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, w)| w)
        .sum()
}

/// Energy with the sharp indicator of `{u > 0}`.
pub fn sharp_energy(u: &ScalarField) -> f64 {
    bending_energy(u) + positive_measure(u)
}

/// Gradient of [`smoothed_energy`] with respect to interior node values;
/// boundary and exterior entries are zero.
pub fn energy_gradient(u: &ScalarField, eps: f64) -> ScalarField {
    let domain = u.domain();
    let w = domain.weights();
    let lap = domain.laplace().apply(u.values());
    let weighted: Vec<f64> = lap
        .iter()
        .zip(domain.interior())
        .map(|(l, &node)| 2.0 * l * w[node])
        .collect();
    let mut g = vec![0.0; domain.node_count()];
    domain.laplace().apply_transpose_add(&weighted, &mut g);
    for (node, gi) in g.iter_mut().enumerate() {
        if domain.mask()[node] == NodeKind::Interior {
            *gi += smoothed_heaviside_prime(u.values()[node], eps) * w[node];
        } else {
            *gi = 0.0;
        }
    }
    ScalarField::new(domain.clone(), g).expect("length matches domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::domain::{DiscreteDomain, DomainKind};
    use std::f64::consts::PI;

    #[test]
    fn laplacian_exact_on_quadratics() {
        let d = DiscreteDomain::with_constant(DomainKind::Rectangle, 21, 0.0).unwrap();
        let u = ScalarField::from_fn(&d, |x, y| x * x + y * y);
        let lap = discrete_laplacian(&u);
        for &node in d.interior() {
            assert!((lap.values()[node] - 4.0).abs() < 1e-10);
        }
        let u = ScalarField::from_fn(&d, |x, y| 3.0 - 2.0 * x + 0.5 * y + x * y);
        let lap = discrete_laplacian(&u);
        for &node in d.interior() {
            assert!(lap.values()[node].abs() < 1e-10);
        }
    }

    #[test]
    fn radial_laplacian_exact_on_quadratics() {
        let d = DiscreteDomain::with_constant(DomainKind::Radial, 101, 0.0).unwrap();
        let u = ScalarField::from_fn(&d, |r, _| 2.0 + 3.0 * r * r);
        let lap = discrete_laplacian(&u);
        for &node in d.interior() {
            assert!((lap.values()[node] - 12.0).abs() < 1e-8, "node {node}");
        }
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        for kind in [DomainKind::Disk, DomainKind::Radial, DomainKind::Rectangle] {
            let d = DiscreteDomain::with_constant(kind, 33, 0.7).unwrap();
            let u = ScalarField::from_fn(&d, |_, _| 0.7);
            assert!(discrete_laplacian(&u).values().iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn cubic_truncation_error() {
        // Δ_h x³ = 6x exactly: the fourth derivative vanishes, so the O(h²) term is zero.
        let d = DiscreteDomain::with_constant(DomainKind::Rectangle, 21, 0.0).unwrap();
        assert!((d.h() - 0.1).abs() < 1e-15);
        let u = ScalarField::from_fn(&d, |x, _| x * x * x);
        let lap = discrete_laplacian(&u);
        for &node in d.interior() {
            let (x, _) = d.coords(node);
            assert!((lap.values()[node] - 6.0 * x).abs() <= 1e-9);
        }
        // x⁴ has Δ = 12x² and truncation error exactly h²·24/12 = 2h².
        let u = ScalarField::from_fn(&d, |x, _| x.powi(4));
        let lap = discrete_laplacian(&u);
        for &node in d.interior() {
            let (x, _) = d.coords(node);
            assert!((lap.values()[node] - 12.0 * x * x - 2.0 * d.h() * d.h()).abs() <= 1e-9);
        }
    }

    #[test]
    fn positive_constant_has_area_energy() {
        let d = DiscreteDomain::with_constant(DomainKind::Disk, 129, 0.3).unwrap();
        let u = ScalarField::from_fn(&d, |_, _| 0.3);
        let e = smoothed_energy(&u, 1e-3);
        assert!((e - PI).abs() / PI < 0.02, "{e}");
        let g = energy_gradient(&u, 1e-3);
        assert!(g.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn quadratic_competitor_energy() {
        let c = 0.05;
        let d = DiscreteDomain::with_constant(DomainKind::Disk, 257, c).unwrap();
        let u = ScalarField::from_fn(&d, |x, y| 2.0 * c * (x * x + y * y) - c);
        let e = smoothed_energy(&u, 1e-3);
        let expected = (64.0 * c * c + 0.5) * PI;
        assert!((e - expected).abs() / expected < 0.02, "{e} vs {expected}");
    }

    #[test]
    fn heaviside_derivatives_match_differences() {
        let eps = 0.1;
        for &t in &[-0.3, -0.05, 0.0, 0.02, 0.2] {
            let h = 1e-6;
            let d1 = (smoothed_heaviside(t + h, eps) - smoothed_heaviside(t - h, eps)) / (2.0 * h);
            assert!((d1 - smoothed_heaviside_prime(t, eps)).abs() < 1e-7);
            let d2 = (smoothed_heaviside_prime(t + h, eps) - smoothed_heaviside_prime(t - h, eps))
                / (2.0 * h);
            assert!((d2 - smoothed_heaviside_second(t, eps)).abs() < 1e-5);
        }
        assert_eq!(smoothed_heaviside_prime(1e3, 1e-6), 0.0);
    }
}
