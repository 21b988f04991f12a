//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the output is exactly one PASS/FAIL line per criterion; any failure makes
//! the process exit nonzero.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use biharm_core::cli_io;
use biharm_core::free_boundary::{euler_lagrange_residual, free_boundary, region_areas};
use biharm_core::grid::{
    discrete_laplacian, fd_gradient_check, minimize, smoothed_energy, ContinuationSchedule, DiscreteDomain,
    DomainKind, GradCheckConfig, MinimizeOutcome, ScalarField,
};
use biharm_core::radial::{annulus_energy, minimize_energy, nonuniqueness_level, MinimizerBranch};
use biharm_core::verification::{check_nonuniqueness, reproduce_table};

/// Closed form written out independently of the library.
mod oracle {
    use std::f64::consts::PI;

    pub fn denominator(r: f64) -> f64 {
        (1.0 - r * r) / 2.0 + r * r * r.ln()
    }

    pub fn energy(u0: f64, r: f64) -> f64 {
        4.0 * PI * u0 * u0 / denominator(r) + PI * (1.0 - r * r)
    }

    /// Interior minimum of the landscape by a dense scan and golden section.
    pub fn optimal_radius(u0: f64) -> f64 {
        let m = 20_000;
        let grid = |i: usize| 1e-4 + (1.0 - 2e-4) * i as f64 / m as f64;
        let best = (0..=m).min_by(|&a, &b| energy(u0, grid(a)).total_cmp(&energy(u0, grid(b)))).unwrap();
        let (mut a, mut b) = (grid(best.saturating_sub(1)), grid((best + 1).min(m)));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-13 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if energy(u0, c) < energy(u0, d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    pub struct Profile {
        pub r0: f64,
        pub f2: f64,
    }

    impl Profile {
        pub fn new(u0: f64) -> Self {
            let r0 = optimal_radius(u0);
            Self { r0, f2: u0 / ((r0 * r0 - 1.0) / 2.0 - r0 * r0 * r0.ln()) }
        }

        pub fn value(&self, r: f64) -> f64 {
            let (r0, f2) = (self.r0, self.f2);
            let c1 = 0.5 * f2 * r0.ln();
            if r <= r0 {
                c1 * (r * r - r0 * r0)
            } else {
                let e2 = 0.5 * f2 * r0 * r0;
                let d2 = 0.5 * f2 * r0 * r0 - f2 * r0 * r0 * r0.ln();
                -0.5 * f2 * r * r + d2 + e2 * r.ln() + 0.5 * f2 * r * r * r.ln()
            }
        }

        pub fn slope_at_nodal_circle(&self) -> f64 {
            (self.f2 * self.r0 * self.r0.ln()).abs()
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn radial_run(u0: f64, n: usize) -> (std::sync::Arc<DiscreteDomain>, MinimizeOutcome) {
    let d = DiscreteDomain::with_constant(DomainKind::Radial, n, u0).unwrap();
    let s = ContinuationSchedule::for_boundary_value(u0, d.h()).unwrap();
    let out = minimize(&d, &s, None).unwrap();
    (d, out)
}

fn table_reproduction() -> Outcome {
    let t = reproduce_table().unwrap();
    let ok = t.within_tolerance() && t.rows.len() == 7;
    outcome(ok, format!("max |dR| = {:.2e}, max |dE| = {:.2e}", t.max_radius_deviation, t.max_energy_deviation))
}

fn level() -> Outcome {
    let l = nonuniqueness_level();
    let ok = (l.r_star - 0.533543).abs() <= 1e-6
        && (l.iota - 0.112814).abs() <= 1e-6
        && l.equation_residual() <= 1e-12
        && l.lambert_residual() <= 1e-12;
    outcome(
        ok,
        format!(
            "R* = {:.9}, iota = {:.9}, equation residual {:.1e}, Lambert residual {:.1e}",
            l.r_star,
            l.iota,
            l.equation_residual(),
            l.lambert_residual()
        ),
    )
}

fn limit_case() -> Outcome {
    let l = nonuniqueness_level();
    // The level as the oracle sees it: the energy at (iota, R*) equals the disk area.
    let oracle_gap = (oracle::energy(l.iota, l.r_star) - PI).abs();
    let closed = (annulus_energy(l.iota, l.r_star).unwrap() - PI).abs();
    let checks = check_nonuniqueness(2001).unwrap();
    let all = checks.iter().all(|c| c.pass);
    let distance = checks.iter().find(|c| c.name == "nonuniqueness-grid-distance").unwrap().measured[0];
    let energies = &checks.iter().find(|c| c.name == "nonuniqueness-grid-energies").unwrap().measured;
    outcome(
        all && closed <= 1e-8 && oracle_gap <= 1e-8,
        format!(
            "|E(iota, R*) - pi| = {closed:.1e}, grid distance {distance:.4}, grid energies {:.5} / {:.5}",
            energies[0], energies[1]
        ),
    )
}

fn competitor() -> Outcome {
    let c = 0.05;
    let d = DiscreteDomain::with_constant(DomainKind::Disk, 257, c).unwrap();
    let w = ScalarField::from_fn(&d, |x, y| 2.0 * c * (x * x + y * y) - c);
    let eps = 4.0 * d.h() * 4.0 * c * 0.5f64.sqrt();
    let e = smoothed_energy(&w, eps);
    let expected = (64.0 * c * c + 0.5) * PI;
    let rel = (e - expected).abs() / expected;
    outcome(rel <= 0.02, format!("E = {e:.5}, (64C^2 + 1/2) pi = {expected:.5}, rel. error {rel:.2e}"))
}

fn energy_bound_sweep() -> Outcome {
    let iota = nonuniqueness_level().iota;
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for k in 1..=200 {
        let u0 = 0.5 * k as f64 / 200.0;
        let m = minimize_energy(u0).unwrap();
        worst = worst.max(m.energy - PI);
        let ok = m.energy <= PI
            && (u0 >= iota || (m.energy < PI && m.branch == MinimizerBranch::TwoPhase))
            && (u0 <= iota + 1e-4 || (m.energy == PI && m.branch == MinimizerBranch::Constant));
        if !ok {
            bad.push(u0);
        }
    }
    outcome(bad.is_empty(), format!("200 points, max(h - pi) = {worst:.3e}, violations {bad:?}"))
}

fn one_phase_bounds() -> Outcome {
    let mut closed_margin = f64::INFINITY;
    for k in 1..=200 {
        let u0 = 0.5 * k as f64 / 200.0;
        if let Some(r) = minimize_energy(u0).unwrap().nodal_radius {
            closed_margin = closed_margin.min(PI * r * r - 2.0 * PI * u0);
        }
    }
    let mut worst_ratio = 0.0f64;
    for u0 in [0.02, 0.05, 0.08, 0.11] {
        let (_, out) = radial_run(u0, 2001);
        let fb = free_boundary(&out.field);
        let a = region_areas(&out.field);
        worst_ratio = worst_ratio.max(fb.weighted_mass / (2.0 * a.negative / u0));
    }
    let d = DiscreteDomain::with_constant(DomainKind::Disk, 65, 0.05).unwrap();
    let s = ContinuationSchedule::for_boundary_value(0.05, d.h()).unwrap();
    let out = minimize(&d, &s, None).unwrap();
    let fb = free_boundary(&out.field);
    let a = region_areas(&out.field);
    worst_ratio = worst_ratio.max(fb.weighted_mass / (2.0 * a.negative / 0.05));
    outcome(
        closed_margin >= 0.0 && worst_ratio <= 1.02,
        format!("min(pi R^2 - 2 pi u0) = {closed_margin:.4}, max mass / (2 area_neg / u0) = {worst_ratio:.4}"),
    )
}

fn property_suite() -> Outcome {
    let cfg = GradCheckConfig { trials: 50, ..GradCheckConfig::default() };
    let fd = [
        fd_gradient_check(&DiscreteDomain::with_constant(DomainKind::Rectangle, 17, 0.05).unwrap(), 0.1, &cfg),
        fd_gradient_check(&DiscreteDomain::with_constant(DomainKind::Radial, 101, 0.05).unwrap(), 0.05, &cfg),
        fd_gradient_check(&DiscreteDomain::with_constant(DomainKind::Disk, 33, 0.05).unwrap(), 1e-2, &cfg),
    ];
    let fd_max = fd.iter().copied().fold(0.0, f64::max);

    let mut subharmonic = f64::INFINITY;
    let mut navier = 0.0f64;
    let mut monotone = true;
    let mut errors = Vec::new();
    for u0 in [0.02, 0.05, 0.1] {
        let profile = oracle::Profile::new(u0);
        let mut errs = Vec::new();
        for n in [251, 501, 1001, 2001] {
            let (d, out) = radial_run(u0, n);
            let exact = ScalarField::from_radial_profile(&d, |r| profile.value(r));
            errs.push(out.field.max_distance(&exact));
            let lap = discrete_laplacian(&out.field);
            let min_lap = d.interior().iter().map(|&k| lap.values()[k]).fold(f64::INFINITY, f64::min);
            subharmonic = subharmonic.min(min_lap + 10.0 * d.h());
            navier = navier.max(lap.values()[n - 2].abs() / (5.0 * profile.f2.abs() * d.h()));
        }
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);
        errors.push(errs);
    }
    let finest: Vec<String> = errors.iter().map(|e| format!("{:.1e}", e[3])).collect();
    outcome(
        fd_max <= 1e-6 && subharmonic >= 0.0 && navier <= 1.0 && monotone,
        format!(
            "fd {fd_max:.1e}, min(lap + 10h) {subharmonic:.2e}, Navier ratio {navier:.3}, monotone {monotone}, n=2001 errors {finest:?}"
        ),
    )
}

fn euler_lagrange() -> Outcome {
    let (d, out) = radial_run(0.05, 2001);
    let phi = ScalarField::test_function(&d, |r, _| 1.0 - r * r);
    let res = euler_lagrange_residual(&out.field, &phi).unwrap();
    let rel = res.relative.unwrap_or(f64::INFINITY);
    // Oracle for the contour side: −φ(R)·2πR/|u′(R)| on the nodal circle.
    let p = oracle::Profile::new(0.05);
    let rhs = -(1.0 - p.r0 * p.r0) * 2.0 * PI * p.r0 / p.slope_at_nodal_circle();
    let rhs_err = (res.rhs - rhs).abs() / rhs.abs();
    outcome(
        out.converged && rel <= 0.05 && rhs_err <= 0.01,
        format!("L = {:.6}, R = {:.6} (oracle {rhs:.6}), relative residual {rel:.2e}", res.lhs, res.rhs),
    )
}

fn full_verify() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli_io::run(["biharm", "verify", "--output", report.to_str().unwrap()], &mut out, &mut err);
    let text = String::from_utf8_lossy(&out);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    let summary = text.lines().last().unwrap_or("").to_string();
    outcome(
        code == 0 && report.exists(),
        format!("exit code {code}; {summary}{}", if failed.is_empty() { String::new() } else { format!("; {failed:?}") }),
    )
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 9] = [
        (1, "table reproduction", Duration::from_secs(1), table_reproduction),
        (2, "nonuniqueness level", Duration::MAX, level),
        (3, "limit-case energy and two grid minimizers", Duration::from_secs(120), limit_case),
        (4, "quadratic competitor energy", Duration::MAX, competitor),
        (5, "energy bound sweep", Duration::MAX, energy_bound_sweep),
        (6, "one-phase and biharmonic measure bounds", Duration::MAX, one_phase_bounds),
        (7, "property suite", Duration::MAX, property_suite),
        (8, "Euler-Lagrange residual", Duration::from_secs(60), euler_lagrange),
        (9, "full verify suite", Duration::from_secs(600), full_verify),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run);
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= limit, o.detail),
            Err(_) => (false, "panicked".to_string()),
        };
        let budget = if limit == Duration::MAX { String::new() } else { format!(" of {}s", limit.as_secs()) };
        println!(
            "{} criterion {id}: {name} [{:.2}s{budget}] {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        failures += usize::from(!pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
