//! Closed-form radial minimizers on the unit disk with constant boundary value.
//!
//! A two-phase radial minimizer is biharmonic on the disk `|x| < R0` and on
//! the annulus `R0 < |x| < 1`, vanishes on the nodal circle `|x| = R0`, and
//! is `C²` across it. With the Navier condition `Δu(1) = 0` this leaves a
//! one-parameter family `w_{R0}` whose energy is explicit in `R0`; the
//! minimizing `R0` is found numerically.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::lambert::{lambert_w, Branch};

/// Trial nodal radii are restricted to `[SEARCH_LO, SEARCH_HI]`.
pub const SEARCH_LO: f64 = 1e-4;
pub const SEARCH_HI: f64 = 1.0 - 1e-4;
const SCAN_POINTS: usize = 1000;
const GOLDEN_TOL: f64 = 1e-10;
/// Energy denominators below this are reported as an infinite energy.
const DENOM_FLOOR: f64 = 1e-300;

/// `(1 − R0²)/2 + R0²·log R0`, positive on `(0, 1)` and vanishing as `R0 → 1`.
pub fn landscape_denominator(r0: f64) -> f64 {
    let r2 = r0 * r0;
    0.5 * (1.0 - r2) + r2 * r0.ln()
}

fn check_u0(u0: f64) -> Result<()> {
    if !(u0 > 0.0 && u0.is_finite()) {
        return domain(format!("boundary value must be positive, got {u0}"));
    }
    Ok(())
}

fn check_open_radius(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return domain(format!("nodal radius must lie in (0, 1), got {r0}"));
    }
    Ok(())
}

/// The funnel-shaped solution `w_{R0}` for boundary value `u0`.
///
/// Inside the nodal circle `u = C1·r² + D1`; outside
/// `u = C2·r² + D2 + E2·log r + F2·(r²/2)·log r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSolution {
    pub u0: f64,
    pub nodal_radius: f64,
    /// `F2`, coefficient of `(r²/2)·log r` on the annulus; negative.
    pub outer_r2_log: f64,
    /// `C1 = F2·log(R0)/2`.
    pub inner_quadratic: f64,
    /// `D1 = −C1·R0²`.
    pub inner_constant: f64,
    /// `E2 = F2·R0²/2`.
    pub outer_log: f64,
    /// `D2 = F2·R0²/2 − F2·R0²·log R0`.
    pub outer_constant: f64,
    /// `C2 = −F2/2`.
    pub outer_quadratic: f64,
}

impl RadialSolution {
    pub fn new(u0: f64, nodal_radius: f64) -> Result<Self> {
        check_u0(u0)?;
        check_open_radius(nodal_radius)?;
        let r0 = nodal_radius;
        let r2 = r0 * r0;
        let log_r0 = r0.ln();
        let f2 = u0 / (0.5 * (r2 - 1.0) - r2 * log_r0);
        let c1 = 0.5 * f2 * log_r0;
        Ok(Self {
            u0,
            nodal_radius,
            outer_r2_log: f2,
            inner_quadratic: c1,
            inner_constant: -c1 * r2,
            outer_log: 0.5 * f2 * r2,
            outer_constant: 0.5 * f2 * r2 - f2 * r2 * log_r0,
            outer_quadratic: -0.5 * f2,
        })
    }

    /// The optimal funnel for `u0`, or `None` when the constant wins.
    pub fn minimizer(u0: f64) -> Result<Option<Self>> {
        let min = minimize_energy(u0)?;
        min.nodal_radius.map(|r0| Self::new(u0, r0)).transpose()
    }

    fn check_radius(r: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&r) {
            return domain(format!("radius must lie in [0, 1], got {r}"));
        }
        Ok(())
    }

    /// Inner polynomial branch, valid for any `r ≥ 0`.
    pub fn inner_value(&self, r: f64) -> f64 {
        self.inner_quadratic * r * r + self.inner_constant
    }

    /// Outer branch, valid for any `r > 0`.
    pub fn outer_value(&self, r: f64) -> f64 {
        let lr = r.ln();
        self.outer_quadratic * r * r
            + self.outer_constant
            + self.outer_log * lr
            + self.outer_r2_log * 0.5 * r * r * lr
    }

    pub fn inner_derivative(&self, r: f64) -> f64 {
        2.0 * self.inner_quadratic * r
    }

    pub fn outer_derivative(&self, r: f64) -> f64 {
        2.0 * self.outer_quadratic * r
            + self.outer_log / r
            + self.outer_r2_log * (r * r.ln() + 0.5 * r)
    }

    pub fn inner_laplacian(&self) -> f64 {
        4.0 * self.inner_quadratic
    }

    pub fn outer_laplacian(&self, r: f64) -> f64 {
        2.0 * self.outer_r2_log * r.ln()
    }

    /// `u(r)`, inner branch for `r ≤ R0` and outer branch beyond.
    pub fn value(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(self.value_unchecked(r))
    }

    pub(crate) fn value_unchecked(&self, r: f64) -> f64 {
        if r <= self.nodal_radius {
            self.inner_value(r)
        } else {
            self.outer_value(r)
        }
    }

    /// Radial derivative `∂_r u`.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(if r <= self.nodal_radius {
            self.inner_derivative(r)
        } else {
            self.outer_derivative(r)
        })
    }

    /// `Δu(r)`; `r = 0` is allowed since the inner branch is constant.
    pub fn laplacian(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(self.laplacian_unchecked(r))
    }

    pub(crate) fn laplacian_unchecked(&self, r: f64) -> f64 {
        if r < self.nodal_radius {
            self.inner_laplacian()
        } else {
            self.outer_laplacian(r)
        }
    }

    /// `|∇u|` on the nodal circle.
    pub fn nodal_gradient(&self) -> f64 {
        self.outer_derivative(self.nodal_radius).abs()
    }

    pub fn energy(&self) -> f64 {
        annulus_energy_unchecked(self.u0, self.nodal_radius)
    }

    /// Largest deviation among the six coefficient relations, each measured
    /// relative to the size of the terms involved.
    pub fn coefficient_defect(&self) -> f64 {
        let r0 = self.nodal_radius;
        let r2 = r0 * r0;
        let lr = r0.ln();
        let f2 = self.outer_r2_log;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        [
            rel(self.u0, f2 * (0.5 * (r2 - 1.0) - r2 * lr)),
            rel(self.inner_quadratic, 0.5 * f2 * lr),
            rel(self.inner_constant, -self.inner_quadratic * r2),
            rel(self.outer_log, 0.5 * f2 * r2),
            rel(self.outer_constant, 0.5 * f2 * r2 - f2 * r2 * lr),
            rel(4.0 * self.outer_quadratic, -2.0 * f2),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Energy of `w_{R0}`: `4π·u0²/((1 − R0²)/2 + R0²·log R0) + π(1 − R0²)`.
///
/// Returns `+∞` once the denominator underflows (`R0 → 1`).
pub fn annulus_energy(u0: f64, r0: f64) -> Result<f64> {
    check_u0(u0)?;
    check_open_radius(r0)?;
    Ok(annulus_energy_unchecked(u0, r0))
}

fn annulus_energy_unchecked(u0: f64, r0: f64) -> f64 {
    let denom = landscape_denominator(r0);
    if !(denom > DENOM_FLOOR) {
        return f64::INFINITY;
    }
    4.0 * PI * u0 * u0 / denom + PI * (1.0 - r0 * r0)
}

/// Derivative of [`annulus_energy`] with respect to `R0`:
/// `−8π·u0²·R0·log R0 / denom² − 2π·R0`.
///
/// Zero at interior minimizers. Tends to `+∞` as `R0 → 1⁻`.
pub fn stationarity_residual(u0: f64, r0: f64) -> Result<f64> {
    check_u0(u0)?;
    check_open_radius(r0)?;
    let denom = landscape_denominator(r0);
    if !(denom > DENOM_FLOOR) {
        return Ok(f64::INFINITY);
    }
    Ok(-8.0 * PI * u0 * u0 * r0 * r0.ln() / (denom * denom) - 2.0 * PI * r0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLandscapePoint {
    pub nodal_radius: f64,
    pub energy: f64,
    pub stationarity: f64,
}

pub fn energy_landscape(u0: f64, radii: &[f64]) -> Result<Vec<EnergyLandscapePoint>> {
    radii
        .iter()
        .map(|&r0| {
            Ok(EnergyLandscapePoint {
                nodal_radius: r0,
                energy: annulus_energy(u0, r0)?,
                stationarity: stationarity_residual(u0, r0)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizerBranch {
    TwoPhase,
    Constant,
}

impl MinimizerBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            MinimizerBranch::TwoPhase => "two-phase",
            MinimizerBranch::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMinimum {
    pub u0: f64,
    pub branch: MinimizerBranch,
    /// Optimal nodal radius; absent for the constant minimizer.
    pub nodal_radius: Option<f64>,
    /// `min(π, inf over R0 of annulus_energy)`.
    pub energy: f64,
}

/// Minimal energy over the disk for constant boundary value `u0`.
///
/// The landscape is scanned on a uniform grid of trial radii and the best
/// scan point is refined by golden-section search in its neighbouring
/// interval. The constant competitor has energy exactly `π`.
pub fn minimize_energy(u0: f64) -> Result<RadialMinimum> {
    check_u0(u0)?;
    let f = |r0: f64| annulus_energy_unchecked(u0, r0);
    let step = (SEARCH_HI - SEARCH_LO) / (SCAN_POINTS - 1) as f64;
    let node = |i: usize| SEARCH_LO + step * i as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..SCAN_POINTS {
        let v = f(node(i));
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = node(best.saturating_sub(1));
    let hi = node((best + 1).min(SCAN_POINTS - 1));
    let (r_opt, e_opt) = golden_section(f, lo, hi, GOLDEN_TOL);
    let (r_opt, e_opt) = if best_val < e_opt {
        (node(best), best_val)
    } else {
        (r_opt, e_opt)
    };
    if e_opt < PI {
        Ok(RadialMinimum {
            u0,
            branch: MinimizerBranch::TwoPhase,
            nodal_radius: Some(r_opt),
            energy: e_opt,
        })
    } else {
        Ok(RadialMinimum {
            u0,
            branch: MinimizerBranch::Constant,
            nodal_radius: None,
            energy: PI,
        })
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `(R² − 1)/(2·log R) − 2R²`, whose unique root in `(0, 1)` is the critical radius.
pub fn critical_radius_equation(r: f64) -> f64 {
    (r * r - 1.0) / (2.0 * r.ln()) - 2.0 * r * r
}

/// The critical boundary value at which the constant and the funnel tie.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonUniquenessLevel {
    pub r_star: f64,
    pub iota: f64,
    /// `2·log R*`, equal to `½ + W₋₁(−1/(2√e))`.
    pub u_star: f64,
    /// Root of [`critical_radius_equation`] found by bisection, independent of Lambert W.
    pub r_star_bisection: f64,
}

impl NonUniquenessLevel {
    pub fn equation_residual(&self) -> f64 {
        critical_radius_equation(self.r_star).abs()
    }

    /// `|(u* − ½)·e^{u*} + ½|`, the Lambert relation after substitution.
    pub fn lambert_residual(&self) -> f64 {
        ((self.u_star - 0.5) * self.u_star.exp() + 0.5).abs()
    }
}

pub fn nonuniqueness_level() -> NonUniquenessLevel {
    let arg = -0.5 * (-0.5f64).exp();
    let w = lambert_w(Branch::MinusOne, arg).expect("argument lies inside (-1/e, 0)");
    let u_star = 0.5 + w;
    let r_star = (0.5 * u_star).exp();
    let iota = 0.5 * r_star * landscape_denominator(r_star).sqrt();
    NonUniquenessLevel {
        r_star,
        iota,
        u_star,
        r_star_bisection: bisect(critical_radius_equation, 0.1, 0.9),
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
