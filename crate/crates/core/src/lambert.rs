//! Real branches of the Lambert W function, the inverse of `w ↦ w·eʷ`.
//!
//! Both branches are refined with Newton's method. The lower branch is
//! seeded from the asymptotic expansion `log(−x) − log(−log(−x))`; close to
//! the branch point `−1/e` both branches are seeded from the square-root
//! series instead, where the asymptotic seed is poor.

use std::f64::consts::E;

use crate::error::{domain, Result};

/// Branch point of both real branches.
pub const BRANCH_POINT: f64 = -1.0 / E;

/// Below this distance from the branch point the series seed is already
/// accurate to well under machine precision in `w·eʷ − x`.
const SERIES_ONLY: f64 = 1e-3;
const MAX_ITERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `W₀`, defined on `[−1/e, ∞)`, values `≥ −1`.
    Principal,
    /// `W₋₁`, defined on `[−1/e, 0)`, values `≤ −1`.
    MinusOne,
}

/// Evaluates `W_branch(x)`.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if !x.is_finite() && !(branch == Branch::Principal && x == f64::INFINITY) {
        return domain(format!("lambert_w: argument {x} is not finite"));
    }
    // Tolerate `x` rounding just below -1/e.
    let shifted = E * x + 1.0;
    if shifted < -4.0 * f64::EPSILON {
        return domain(format!("lambert_w: argument {x} below the branch point -1/e"));
    }
    let p = (2.0 * shifted.max(0.0)).sqrt();
    match branch {
        Branch::Principal => {
            if x == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
            if x == 0.0 {
                return Ok(0.0);
            }
            let seed = if p < SERIES_ONLY || x < -0.25 {
                -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
            } else if x < 3.0 {
                let l = x.ln_1p();
                l * (1.0 - l.ln_1p() / (2.0 + l))
            } else {
                let l1 = x.ln();
                l1 - l1.ln()
            };
            if p < SERIES_ONLY {
                return Ok(seed);
            }
            Ok(newton(x, seed))
        }
        Branch::MinusOne => {
            if x >= 0.0 {
                return domain(format!(
                    "lambert_w: minus-one branch requires -1/e <= x < 0, got {x}"
                ));
            }
            let series = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
            if p < SERIES_ONLY {
                return Ok(series);
            }
            let seed = if x < -0.25 {
                series
            } else {
                let l1 = (-x).ln();
                l1 - (-l1).ln()
            };
            Ok(newton(x, seed).min(-1.0))
        }
    }
}

fn newton(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let df = ew * (w + 1.0);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}
