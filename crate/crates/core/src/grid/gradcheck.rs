use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::domain::{DiscreteDomain, NodeKind, ScalarField};
use super::energy::{energy_gradient, smoothed_energy};

#[derive(Debug, Clone, Copy)]
pub struct GradCheckConfig {
    pub trials: usize,
    pub seed: u64,
    /// Interior values are drawn uniformly from `[−amplitude, amplitude]`.
    pub amplitude: f64,
    /// Central-difference step along the random direction.
    pub step: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            seed: 0x5eed,
            amplitude: 0.1,
            step: 1e-5,
        }
    }
}

/// Max over random fields and directions of
/// `|∇E·v − (E(u + δv) − E(u − δv))/2δ| / (|FD| + 1e-12)`.
pub fn fd_gradient_check(domain: &Arc<DiscreteDomain>, eps: f64, config: &GradCheckConfig) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..config.trials.max(1) {
        let mut u = ScalarField::from_fn(domain, |_, _| 0.0);
        let mut v = vec![0.0; domain.node_count()];
        for node in 0..domain.node_count() {
            if domain.mask()[node] == NodeKind::Interior {
                u.values_mut()[node] = rng.random_range(-config.amplitude..=config.amplitude);
                v[node] = rng.random_range(-1.0..=1.0);
            }
        }
        u.pin_boundary();
        let g = energy_gradient(&u, eps);
        let analytic: f64 = g.values().iter().zip(&v).map(|(a, b)| a * b).sum();
        let shifted = |sign: f64| {
            let vals = u
                .values()
                .iter()
                .zip(&v)
                .map(|(x, d)| x + sign * config.step * d)
                .collect();
            let f = ScalarField::new(domain.clone(), vals).expect("length matches domain");
            smoothed_energy(&f, eps)
        };
        let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * config.step);
        worst = worst.max((analytic - fd).abs() / (fd.abs() + 1e-12));
    }
    worst
}
