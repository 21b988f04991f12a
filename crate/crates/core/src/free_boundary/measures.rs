use std::f64::consts::PI;

use serde::Serialize;

use super::contour::{radial_crossings, zero_contour, FreeBoundary};
use crate::error::{domain, Result};
use crate::grid::{discrete_laplacian, DomainKind, NodeKind, ScalarField};

/// Node-centred gradient: central differences where both neighbours are
/// inside the domain, one-sided otherwise. Radial fields report `(∂_r u, 0)`
/// with `∂_r u(0) = 0` by symmetry.
fn node_gradients(u: &ScalarField) -> Vec<[f64; 2]> {
    let d = u.domain();
    let v = u.values();
    let h = d.h();
    let n = d.n();
    match d.kind() {
        DomainKind::Radial => (0..n)
            .map(|i| {
                let g = if i == 0 {
                    0.0
                } else if i == n - 1 {
                    (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h)
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * h)
                };
                [g, 0.0]
            })
            .collect(),
        _ => {
            let inside = |i: isize, j: isize| {
                i >= 0 && j >= 0 && i < n as isize && j < n as isize && d.is_inside(j as usize * n + i as usize)
            };
            let val = |i: isize, j: isize| v[j as usize * n + i as usize];
            let diff = |i: isize, j: isize, di: isize, dj: isize| {
                let fwd = inside(i + di, j + dj);
                let bwd = inside(i - di, j - dj);
                match (fwd, bwd) {
                    (true, true) => (val(i + di, j + dj) - val(i - di, j - dj)) / (2.0 * h),
                    (true, false) => (val(i + di, j + dj) - val(i, j)) / h,
                    (false, true) => (val(i, j) - val(i - di, j - dj)) / h,
                    (false, false) => 0.0,
                }
            };
            (0..d.node_count())
                .map(|node| {
                    if !d.is_inside(node) {
                        return [0.0, 0.0];
                    }
                    let (i, j) = ((node % n) as isize, (node / n) as isize);
                    [diff(i, j, 1, 0), diff(i, j, 0, 1)]
                })
                .collect()
        }
    }
}

/// Largest second difference over the given nodes, using only stencils
/// that stay inside the domain.
fn max_second_difference(u: &ScalarField, nodes: impl Iterator<Item = usize>) -> f64 {
    let d = u.domain();
    let v = u.values();
    let h2 = d.h() * d.h();
    let n = d.n();
    let mut worst: f64 = 0.0;
    for node in nodes {
        match d.kind() {
            DomainKind::Radial => {
                if node >= 1 && node + 1 < n {
                    worst = worst.max(((v[node + 1] - 2.0 * v[node] + v[node - 1]) / h2).abs());
                }
            }
            _ => {
                let (i, j) = (node % n, node / n);
                if i == 0 || j == 0 || i + 1 >= n || j + 1 >= n {
                    continue;
                }
                let ok = |k: usize| d.is_inside(k);
                let (l, r, b, t) = (node - 1, node + 1, node - n, node + n);
                if ok(l) && ok(r) {
                    worst = worst.max(((v[r] - 2.0 * v[node] + v[l]) / h2).abs());
                }
                if ok(b) && ok(t) {
                    worst = worst.max(((v[t] - 2.0 * v[node] + v[b]) / h2).abs());
                }
                let corners = [t + 1, t - 1, b + 1, b - 1];
                if corners.iter().all(|&k| ok(k)) {
                    let uxy = (v[t + 1] - v[t - 1] - v[b + 1] + v[b - 1]) / (4.0 * h2);
                    worst = worst.max(uxy.abs());
                }
            }
        }
    }
    worst
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn norm(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Fills in length, `∫ 1/|∇u| dH¹`, the gradient range on the nodal set
/// and the degenerate-gradient flag. `|∇u|` at contour vertices is the
/// linear interpolation of node-centred differences along the cut edge.
pub fn contour_measures(u: &ScalarField, fb: &FreeBoundary) -> FreeBoundary {
    let d = u.domain();
    let grads = node_gradients(u);
    let mut out = fb.clone();
    let mut length = 0.0;
    let mut mass = 0.0;
    let mut min_grad = f64::INFINITY;
    let mut max_grad: f64 = 0.0;
    let mut touched = Vec::new();

    if d.kind() == DomainKind::Radial {
        for c in &fb.crossings {
            let g = norm(lerp(grads[c.inner], grads[c.inner + 1], c.t));
            let circumference = 2.0 * PI * c.radius;
            length += circumference;
            mass += circumference / g;
            min_grad = min_grad.min(g);
            max_grad = max_grad.max(g);
            touched.extend([c.inner, c.inner + 1]);
        }
    } else {
        for p in &fb.polylines {
            let g: Vec<f64> = p
                .vertices
                .iter()
                .map(|v| norm(lerp(grads[v.a], grads[v.b], v.t)))
                .collect();
            for (w, gw) in p.vertices.windows(2).zip(g.windows(2)) {
                let [x0, y0] = w[0].point;
                let [x1, y1] = w[1].point;
                let seg = (x1 - x0).hypot(y1 - y0);
                length += seg;
                mass += 0.5 * seg * (1.0 / gw[0] + 1.0 / gw[1]);
            }
            for (v, gv) in p.vertices.iter().zip(&g) {
                min_grad = min_grad.min(*gv);
                max_grad = max_grad.max(*gv);
                touched.extend([v.a, v.b]);
            }
        }
    }
    if fb.is_empty() {
        min_grad = 0.0;
    }
    let threshold = 10.0 * d.h() * max_second_difference(u, touched.into_iter());
    out.length = length;
    out.weighted_mass = mass;
    out.min_grad = min_grad;
    out.max_grad = max_grad;
    out.grad_threshold = threshold;
    out.degenerate_gradient = !fb.is_empty() && min_grad < threshold;
    out
}

/// Zero contour with its measures.
pub fn free_boundary(u: &ScalarField) -> FreeBoundary {
    contour_measures(u, &zero_contour(u))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionAreas {
    pub positive: f64,
    pub negative: f64,
}

/// Measures of `{u > 0}` and `{u < 0}`.
///
/// 2-D fields use node-count quadrature. Radial fields use exact annuli
/// between the interpolated crossing radii.
pub fn region_areas(u: &ScalarField) -> RegionAreas {
    let d = u.domain();
    let v = u.values();
    if d.kind() != DomainKind::Radial {
        let (mut positive, mut negative) = (0.0, 0.0);
        for (val, w) in v.iter().zip(d.weights()) {
            if *val > 0.0 {
                positive += w;
            } else if *val < 0.0 {
                negative += w;
            }
        }
        return RegionAreas { positive, negative };
    }
    let crossings = radial_crossings(u);
    let mut edges = vec![0.0];
    edges.extend(crossings.iter().map(|c| c.radius));
    edges.push(1.0);
    // Representative node of each interval: the centre, then the outer node of each crossing.
    let mut reps = vec![0];
    reps.extend(crossings.iter().map(|c| c.inner + 1));
    let (mut positive, mut negative) = (0.0, 0.0);
    for (k, &rep) in reps.iter().enumerate() {
        let area = PI * (edges[k + 1] * edges[k + 1] - edges[k] * edges[k]);
        if v[rep] > 0.0 {
            positive += area;
        } else if v[rep] < 0.0 {
            negative += area;
        }
    }
    RegionAreas { positive, negative }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerLagrangeResidual {
    /// `2 Σ Δ_h u · Δ_h φ · w`.
    pub lhs: f64,
    /// `−∫_{u=0} φ/|∇u| dH¹`.
    pub rhs: f64,
    /// `|lhs − rhs| / (|lhs| + |rhs| + 1e-12)`; absent when the nodal set is empty.
    pub relative: Option<f64>,
}

/// Tests the first variation `2∫ Δu Δφ = −∫_{u=0} φ/|∇u| dH¹` against one
/// test function `φ`, which must vanish on boundary nodes.
pub fn euler_lagrange_residual(u: &ScalarField, phi: &ScalarField) -> Result<EulerLagrangeResidual> {
    let d = u.domain();
    if phi.domain().node_count() != d.node_count() || phi.domain().kind() != d.kind() {
        return domain("test function lives on a different grid");
    }
    let boundary_max = phi
        .values()
        .iter()
        .zip(d.mask())
        .filter(|(_, m)| **m == NodeKind::Boundary)
        .fold(0.0f64, |m, (v, _)| m.max(v.abs()));
    if boundary_max > 1e-12 {
        return domain(format!("test function must vanish on the boundary, max |phi| = {boundary_max}"));
    }
    let lap_u = discrete_laplacian(u);
    let lap_phi = discrete_laplacian(phi);
    let w = d.weights();
    let lhs: f64 = d
        .interior()
        .iter()
        .map(|&node| 2.0 * lap_u.values()[node] * lap_phi.values()[node] * w[node])
        .sum();

    let fb = zero_contour(u);
    let grads = node_gradients(u);
    let p = phi.values();
    let mut integral = 0.0;
    if d.kind() == DomainKind::Radial {
        for c in &fb.crossings {
            let g = norm(lerp(grads[c.inner], grads[c.inner + 1], c.t));
            let phi_c = p[c.inner] + c.t * (p[c.inner + 1] - p[c.inner]);
            integral += phi_c * 2.0 * PI * c.radius / g;
        }
    } else {
        for line in &fb.polylines {
            let dens: Vec<f64> = line
                .vertices
                .iter()
                .map(|v| {
                    let g = norm(lerp(grads[v.a], grads[v.b], v.t));
                    (p[v.a] + v.t * (p[v.b] - p[v.a])) / g
                })
                .collect();
            for (w2, dw) in line.vertices.windows(2).zip(dens.windows(2)) {
                let [x0, y0] = w2[0].point;
                let [x1, y1] = w2[1].point;
                integral += 0.5 * (x1 - x0).hypot(y1 - y0) * (dw[0] + dw[1]);
            }
        }
    }
    let rhs = -integral;
    let relative = (!fb.is_empty()).then(|| (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + 1e-12));
    Ok(EulerLagrangeResidual { lhs, rhs, relative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiscreteDomain;

    #[test]
    fn plane_has_unit_gradient() {
        let d = DiscreteDomain::with_constant(DomainKind::Rectangle, 33, 0.0).unwrap();
        let u = ScalarField::from_fn(&d, |x, _| x + 0.01);
        let fb = free_boundary(&u);
        assert!((fb.min_grad - 1.0).abs() < 1e-12 && (fb.max_grad - 1.0).abs() < 1e-12);
        assert!((fb.weighted_mass - fb.length).abs() < 1e-12);
        assert!(!fb.degenerate_gradient);
    }

    #[test]
    fn circle_measures() {
        // u = |x|² − ¼ has |∇u| = 1 on the circle of radius ½.
        let d = DiscreteDomain::with_constant(DomainKind::Rectangle, 257, 0.0).unwrap();
        let u = ScalarField::from_fn(&d, |x, y| x * x + y * y - 0.25);
        let fb = free_boundary(&u);
        assert!((fb.length - PI).abs() / PI < 0.01);
        assert!((fb.weighted_mass - PI).abs() / PI < 0.01);
        assert!(fb.weighted_mass >= fb.length / fb.max_grad - 1e-12);
        assert!(fb.weighted_mass <= fb.length / fb.min_grad + 1e-12);
        let areas = region_areas(&u);
        assert!((areas.negative - PI / 4.0).abs() / (PI / 4.0) < 0.02);
        assert!((areas.positive + areas.negative - 4.0).abs() <= 4.0 * d.h() * fb.length);
    }

    #[test]
    fn degenerate_gradient_is_flagged() {
        // u = (x² + y² − ¼)² − 1e-6 has |∇u| ≈ 0 on its nodal set.
        let d = DiscreteDomain::with_constant(DomainKind::Rectangle, 129, 0.0).unwrap();
        let u = ScalarField::from_fn(&d, |x, y| {
            let s = x * x + y * y - 0.25;
            s * s - 1e-6
        });
        assert!(free_boundary(&u).degenerate_gradient);
    }

    #[test]
    fn constant_field_areas() {
        let d = DiscreteDomain::with_constant(DomainKind::Disk, 65, 0.3).unwrap();
        let u = ScalarField::from_fn(&d, |_, _| 0.3);
        let a = region_areas(&u);
        assert_eq!(a.negative, 0.0);
        assert!((a.positive - d.area()).abs() < 1e-12);
        let r = DiscreteDomain::with_constant(DomainKind::Radial, 65, 0.3).unwrap();
        let a = region_areas(&ScalarField::from_fn(&r, |_, _| 0.3));
        assert!((a.positive - PI).abs() < 1e-12 && a.negative == 0.0);
    }

    #[test]
    fn el_residual_rejects_non_vanishing_test_function() {
        let d = DiscreteDomain::with_constant(DomainKind::Radial, 65, 0.1).unwrap();
        let u = ScalarField::from_fn(&d, |r, _| r - 0.5);
        let phi = ScalarField::from_fn(&d, |_, _| 1.0);
        assert!(euler_lagrange_residual(&u, &phi).is_err());
        let zero = ScalarField::from_fn(&d, |_, _| 0.0);
        let res = euler_lagrange_residual(&u, &zero).unwrap();
        assert_eq!(res.lhs, 0.0);
        assert_eq!(res.rhs, 0.0);
    }
}
