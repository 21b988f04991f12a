//! Continuation in the smoothing width with Newton or preconditioned
//! Barzilai-Borwein descent and Armijo backtracking.
//!
//! The bending term has condition number of order `h⁻⁴`, so raw gradient
//! steps stall. When the exact Hessian `Hess(bending) + diag(H_ε''(u)·w)` is
//! positive definite the step is a damped Newton step. Otherwise it is taken
//! in the metric of `P = Hess(bending) + diag(|H_ε''(u)|·w)`, refreshed every
//! [`CURVATURE_REFRESH`] iterations, with the BB step length measured in the
//! same metric. Stationarity is the max-norm of the step direction, a
//! displacement in field units.

use std::sync::Arc;

use serde::Serialize;

use super::banded::BandedCholesky;
use super::domain::{DiscreteDomain, NodeKind, ScalarField};
use super::energy::{
    energy_gradient, sharp_energy, smoothed_energy, smoothed_heaviside_second,
};
use crate::error::{domain, Result};
use crate::radial::minimize_energy;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const CURVATURE_REFRESH: usize = 20;
/// Accepted steps in a row without an energy decrease above rounding.
const FLAT_STEPS: usize = 10;
/// Floor on the final smoothing width.
pub const EPS_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationSchedule {
    pub eps_start: f64,
    pub eps_end: f64,
    /// Geometric decrement of ε between stages, in `(0, 1)`.
    pub eps_factor: f64,
    /// Stage stops once the max-norm of the step direction is `≤ grad_tol`.
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl ContinuationSchedule {
    /// Default schedule for constant boundary value `u0` at spacing `h`.
    ///
    /// Starts at `ε = u0` so the area term still pulls on a constant
    /// initial field, and ends where the transition layer `ε/|∇u|` spans
    /// four cells, with `|∇u|` on the nodal circle taken from the radial
    /// closed form (or `u0` when the constant is optimal).
    pub fn for_boundary_value(u0: f64, h: f64) -> Result<Self> {
        let slope = match minimize_energy(u0)?.nodal_radius {
            Some(r0) => crate::radial::RadialSolution::new(u0, r0)?.nodal_gradient(),
            None => u0,
        };
        let eps_end = (4.0 * h * slope).max(EPS_FLOOR);
        Ok(Self {
            eps_start: u0.max(eps_end),
            eps_end,
            eps_factor: 0.5,
            grad_tol: 1e-8,
            max_iters: 2000,
        })
    }

    /// A single stage at fixed `eps`, for warm starts.
    pub fn single_stage(eps: f64, grad_tol: f64, max_iters: usize) -> Self {
        Self {
            eps_start: eps,
            eps_end: eps,
            eps_factor: 0.5,
            grad_tol,
            max_iters,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_end > 0.0 && self.eps_start >= self.eps_end) {
            return domain(format!(
                "schedule needs 0 < eps_end <= eps_start, got {} and {}",
                self.eps_end, self.eps_start
            ));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0) {
            return domain(format!("eps_factor must lie in (0, 1), got {}", self.eps_factor));
        }
        if !(self.grad_tol > 0.0) || self.max_iters == 0 {
            return domain("grad_tol and max_iters must be positive");
        }
        Ok(())
    }

    /// The ε of every stage, geometric from `eps_start` down to `eps_end`.
    pub fn stages(&self) -> Vec<f64> {
        let mut out = vec![self.eps_start];
        let mut eps = self.eps_start;
        while eps > self.eps_end {
            eps = (eps * self.eps_factor).max(self.eps_end);
            out.push(eps);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Converged,
    MaxIters,
    /// No step passed the Armijo test, or accepted steps stopped lowering
    /// the energy beyond rounding.
    Stalled,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageDiagnostics {
    pub eps: f64,
    pub iterations: usize,
    pub status: StageStatus,
    pub smoothed_energy: f64,
    /// Max-norm of the last step direction.
    pub step_norm: f64,
    /// `max |∂E/∂u_i| / w_i` at exit.
    pub gradient_norm: f64,
    /// Smoothed energy after every accepted step, starting with the initial value.
    pub energy_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub field: ScalarField,
    /// Energy with the sharp indicator of `{u > 0}`.
    pub energy: f64,
    pub stages: Vec<StageDiagnostics>,
    pub iterations: usize,
    /// False when the last stage exits unconverged with `step_norm > 10·grad_tol`.
    pub converged: bool,
}

/// Minimizes the smoothed energy through the schedule's ε stages.
///
/// `init` defaults to the harmonic extension of the boundary values and must
/// agree with them on boundary nodes.
pub fn minimize(
    domain: &Arc<DiscreteDomain>,
    schedule: &ContinuationSchedule,
    init: Option<&ScalarField>,
) -> Result<MinimizeOutcome> {
    schedule.validate()?;
    let mut u = match init {
        Some(f) => {
            if !Arc::ptr_eq(f.domain(), domain) && f.domain().node_count() != domain.node_count() {
                return crate::error::domain("initial field lives on a different grid");
            }
            if f.boundary_defect() > 1e-12 {
                return crate::error::domain("initial field violates the boundary values");
            }
            ScalarField::new(domain.clone(), f.values().to_vec())?
        }
        None => ScalarField::harmonic_extension(domain)?,
    };
    let bending = BendingHessian::assemble(domain);
    let mut stages = Vec::new();
    let mut iterations = 0;
    for eps in schedule.stages() {
        let diag = run_stage(&mut u, &bending, eps, schedule)?;
        iterations += diag.iterations;
        stages.push(diag);
    }
    let last = stages.last().expect("at least one stage");
    let converged = last.status == StageStatus::Converged || last.step_norm <= 10.0 * schedule.grad_tol;
    Ok(MinimizeOutcome {
        energy: sharp_energy(&u),
        field: u,
        stages,
        iterations,
        converged,
    })
}

/// Runs each start through the schedule and keeps the lowest sharp energy.
/// Ties keep the earlier start.
pub fn minimize_best_of(
    domain: &Arc<DiscreteDomain>,
    schedule: &ContinuationSchedule,
    starts: &[ScalarField],
) -> Result<(MinimizeOutcome, Vec<MinimizeOutcome>)> {
    if starts.is_empty() {
        return crate::error::domain("minimize_best_of needs at least one start");
    }
    let runs = starts
        .iter()
        .map(|s| minimize(domain, schedule, Some(s)))
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.energy < runs[b].energy { i } else { b });
    Ok((runs[best].clone(), runs))
}

/// `2·Lᵢᵀ·W·Lᵢ` in banded form over interior degrees of freedom.
struct BendingHessian {
    bandwidth: usize,
    /// `(row, col, value)` with `col ≤ row`, in interior indices.
    entries: Vec<(usize, usize, f64)>,
}

impl BendingHessian {
    fn assemble(domain: &DiscreteDomain) -> Self {
        let op = domain.laplace();
        let w = domain.weights();
        let mut acc = std::collections::BTreeMap::new();
        let mut bandwidth = 0;
        for (k, &node) in domain.interior().iter().enumerate() {
            let row: Vec<(usize, f64)> = op
                .row(k)
                .filter_map(|(c, a)| domain.interior_index(c).map(|j| (j, a)))
                .collect();
            for &(a, ca) in &row {
                for &(b, cb) in &row {
                    if b <= a {
                        bandwidth = bandwidth.max(a - b);
                        *acc.entry((a, b)).or_insert(0.0) += 2.0 * w[node] * ca * cb;
                    }
                }
            }
        }
        Self {
            bandwidth,
            entries: acc.into_iter().map(|((a, b), v)| (a, b, v)).collect(),
        }
    }

    fn factor_with_shift(&self, shift: &[f64]) -> Result<BandedCholesky> {
        let mut m = BandedCholesky::zeros(shift.len(), self.bandwidth);
        for &(a, b, v) in &self.entries {
            m.add(a, b, v);
        }
        for (i, s) in shift.iter().enumerate() {
            m.add(i, i, *s);
        }
        m.factor()?;
        Ok(m)
    }

    fn quad_form(&self, shift: &[f64], s: &[f64]) -> f64 {
        let mut q = 0.0;
        for &(a, b, v) in &self.entries {
            q += if a == b { v * s[a] * s[a] } else { 2.0 * v * s[a] * s[b] };
        }
        q + shift.iter().zip(s).map(|(d, x)| d * x * x).sum::<f64>()
    }
}

/// `H_ε''(u)·w` on interior nodes; `signed = false` takes absolute values.
fn curvature_shift(u: &ScalarField, eps: f64, signed: bool) -> Vec<f64> {
    let d = u.domain();
    d.interior()
        .iter()
        .map(|&node| {
            let c = smoothed_heaviside_second(u.values()[node], eps) * d.weights()[node];
            if signed { c } else { c.max(0.0) }
        })
        .collect()
}

fn interior_gradient(u: &ScalarField, eps: f64) -> Vec<f64> {
    let g = energy_gradient(u, eps);
    u.domain().interior().iter().map(|&node| g.values()[node]).collect()
}

fn run_stage(
    u: &mut ScalarField,
    bending: &BendingHessian,
    eps: f64,
    schedule: &ContinuationSchedule,
) -> Result<StageDiagnostics> {
    let domain = u.domain().clone();
    let interior = domain.interior();
    let weights = domain.weights();
    let mut shift = curvature_shift(u, eps, false);
    let mut precond = bending.factor_with_shift(&shift)?;
    let mut energy = smoothed_energy(u, eps);
    let mut grad = interior_gradient(u, eps);
    let mut trace = vec![energy];
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut status = StageStatus::MaxIters;
    let mut step_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut flat = 0;
    let mut trial = u.clone();

    for it in 0..schedule.max_iters {
        if it > 0 && it % CURVATURE_REFRESH == 0 {
            shift = curvature_shift(u, eps, false);
            precond = bending.factor_with_shift(&shift)?;
        }
        let mut dir = grad.clone();
        let newton = match bending.factor_with_shift(&curvature_shift(u, eps, true)) {
            Ok(hess) => {
                hess.solve_in_place(&mut dir);
                true
            }
            Err(_) => {
                precond.solve_in_place(&mut dir);
                false
            }
        };
        step_norm = dir.iter().fold(0.0, |m, v| m.max(v.abs()));
        if step_norm <= schedule.grad_tol {
            status = StageStatus::Converged;
            break;
        }
        let mut alpha = 1.0;
        if let (false, Some((s, y))) = (newton, &previous) {
            let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
            if sy > 0.0 {
                alpha = (bending.quad_form(&shift, s) / sy).clamp(1e-8, 1e8);
            }
        }
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let mut t = alpha;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            {
                let vals = trial.values_mut();
                for (k, &node) in interior.iter().enumerate() {
                    vals[node] = u.values()[node] - t * dir[k];
                }
            }
            let e = smoothed_energy(&trial, eps);
            if e <= energy - ARMIJO * t * slope {
                accepted = Some(e);
                break;
            }
            t *= 0.5;
        }
        let Some(new_energy) = accepted else {
            status = StageStatus::Stalled;
            break;
        };
        let s: Vec<f64> = interior
            .iter()
            .map(|&node| trial.values()[node] - u.values()[node])
            .collect();
        flat = if energy - new_energy <= 4.0 * f64::EPSILON * energy.abs().max(1.0) { flat + 1 } else { 0 };
        std::mem::swap(u, &mut trial);
        let new_grad = interior_gradient(u, eps);
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        previous = Some((s, y));
        grad = new_grad;
        energy = new_energy;
        trace.push(energy);
        iterations += 1;
        if flat >= FLAT_STEPS {
            status = StageStatus::Stalled;
            break;
        }
    }

    let gradient_norm = interior
        .iter()
        .zip(&grad)
        .filter(|(&node, _)| domain.mask()[node] == NodeKind::Interior)
        .map(|(&node, g)| (g / weights[node]).abs())
        .fold(0.0, f64::max);
    Ok(StageDiagnostics {
        eps,
        iterations,
        status,
        smoothed_energy: energy,
        step_norm,
        gradient_norm,
        energy_trace: trace,
    })
}
