use std::collections::HashMap;

use serde::Serialize;

use crate::grid::{DomainKind, ScalarField};

/// A point of the zero level set on the grid edge between nodes `a` and `b`,
/// at `a + t·(b − a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourVertex {
    pub point: [f64; 2],
    pub a: usize,
    pub b: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    /// Closed polylines repeat their first vertex at the end.
    pub vertices: Vec<ContourVertex>,
    pub closed: bool,
}

impl Polyline {
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.vertices.iter().map(|v| v.point)
    }

    pub fn length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| {
                let [x0, y0] = w[0].point;
                let [x1, y1] = w[1].point;
                (x1 - x0).hypot(y1 - y0)
            })
            .sum()
    }

    /// Shoelace area; meaningful for closed polylines.
    pub fn enclosed_area(&self) -> f64 {
        let s: f64 = self
            .vertices
            .windows(2)
            .map(|w| {
                let [x0, y0] = w[0].point;
                let [x1, y1] = w[1].point;
                x0 * y1 - x1 * y0
            })
            .sum();
        0.5 * s.abs()
    }
}

/// A sign change of a radial field between nodes `inner` and `inner + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialCrossing {
    pub radius: f64,
    pub inner: usize,
    pub t: f64,
}

/// The nodal set `{u = 0}` of a discrete field and its measures.
///
/// 2-D fields carry polylines; radial fields carry crossing radii, each
/// standing for a full circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeBoundary {
    pub polylines: Vec<Polyline>,
    pub crossings: Vec<RadialCrossing>,
    pub component_count: usize,
    /// `H¹` length of the nodal set.
    pub length: f64,
    /// `∫_{u=0} 1/|∇u| dH¹`.
    pub weighted_mass: f64,
    pub min_grad: f64,
    pub max_grad: f64,
    /// `10·h·max|D²u|` near the nodal set.
    pub grad_threshold: f64,
    /// Set when `min_grad < grad_threshold`.
    pub degenerate_gradient: bool,
}

impl FreeBoundary {
    fn geometry(polylines: Vec<Polyline>, crossings: Vec<RadialCrossing>) -> Self {
        let component_count = polylines.len() + crossings.len();
        Self {
            polylines,
            crossings,
            component_count,
            length: 0.0,
            weighted_mass: 0.0,
            min_grad: 0.0,
            max_grad: 0.0,
            grad_threshold: 0.0,
            degenerate_gradient: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.component_count == 0
    }
}

/// Extracts the zero level set: marching squares with linear edge
/// interpolation in 2-D, interpolated sign changes on the radial mesh.
///
/// Nodes with `u > 0` are positive, all others non-positive. Saddle cells
/// are resolved by the sign of the mean of their four corners.
pub fn zero_contour(u: &ScalarField) -> FreeBoundary {
    match u.domain().kind() {
        DomainKind::Radial => FreeBoundary::geometry(Vec::new(), radial_crossings(u)),
        _ => FreeBoundary::geometry(marching_squares(u), Vec::new()),
    }
}

pub(crate) fn radial_crossings(u: &ScalarField) -> Vec<RadialCrossing> {
    let d = u.domain();
    let v = u.values();
    let h = d.h();
    (0..d.n() - 1)
        .filter(|&i| (v[i] > 0.0) != (v[i + 1] > 0.0))
        .map(|i| {
            let t = v[i] / (v[i] - v[i + 1]);
            RadialCrossing {
                radius: (i as f64 + t) * h,
                inner: i,
                t,
            }
        })
        .collect()
}

fn marching_squares(u: &ScalarField) -> Vec<Polyline> {
    let d = u.domain();
    let n = d.n();
    let v = u.values();
    let node = |i: usize, j: usize| j * n + i;
    // Edge keys: 2·node for the edge to the right, 2·node + 1 for the edge upward.
    let mut vertex_of: HashMap<usize, ContourVertex> = HashMap::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut vertex = |a: usize, b: usize, key: usize| {
        vertex_of.entry(key).or_insert_with(|| {
            let t = v[a] / (v[a] - v[b]);
            let (xa, ya) = d.coords(a);
            let (xb, yb) = d.coords(b);
            ContourVertex {
                point: [xa + t * (xb - xa), ya + t * (yb - ya)],
                a,
                b,
                t,
            }
        });
        key
    };

    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let c = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            if !c.iter().all(|&k| d.is_inside(k)) {
                continue;
            }
            let case = c
                .iter()
                .enumerate()
                .fold(0u8, |acc, (bit, &k)| acc | (u8::from(v[k] > 0.0) << bit));
            if case == 0 || case == 15 {
                continue;
            }
            let mut edge = |e: u8| match e {
                0 => vertex(c[0], c[1], 2 * c[0]),
                1 => vertex(c[1], c[2], 2 * c[1] + 1),
                2 => vertex(c[3], c[2], 2 * c[3]),
                _ => vertex(c[0], c[3], 2 * c[0] + 1),
            };
            let centre_positive = c.iter().map(|&k| v[k]).sum::<f64>() > 0.0;
            let pairs: &[(u8, u8)] = match case {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 if centre_positive => &[(0, 1), (2, 3)],
                5 => &[(3, 0), (1, 2)],
                10 if centre_positive => &[(3, 0), (1, 2)],
                10 => &[(0, 1), (2, 3)],
                _ => unreachable!("cases 0 and 15 carry no contour"),
            };
            for &(e0, e1) in pairs {
                let k0 = edge(e0);
                let k1 = edge(e1);
                segments.push((k0, k1));
            }
        }
    }
    chain(&segments, &vertex_of)
}

fn chain(segments: &[(usize, usize)], vertex_of: &HashMap<usize, ContourVertex>) -> Vec<Polyline> {
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start_seg: usize, start_key: usize, used: &mut Vec<bool>| {
        let mut keys = vec![start_key];
        let mut seg = start_seg;
        let mut at = start_key;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            keys.push(next);
            at = next;
            if at == start_key {
                break;
            }
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        let closed = keys.len() > 2 && keys.first() == keys.last();
        Polyline {
            vertices: keys.iter().map(|k| vertex_of[k]).collect(),
            closed,
        }
    };

    // Open chains start at keys touched by a single segment.
    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let (a, b) = segments[s];
        if incident[&a].len() == 1 {
            out.push(walk(s, a, &mut used));
        } else if incident[&b].len() == 1 {
            out.push(walk(s, b, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(s, segments[s].0, &mut used));
        }
    }
    out
}
