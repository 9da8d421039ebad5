//! Identity suites comparing the closed-form entropy pieces with numerical
//! integration.

use std::f64::consts::PI;
use std::fmt;

use aim_core::entropy::{
    increment_closed_form, s_app_at_offset, s_body_exact, s_tail_exact, theta_eq, EntropyState,
};
use aim_core::oracle::{gauss_hermite, integrate, partition_integrals, pmax_mass};
use aim_core::{PosteriorSet, QuadratureSpec};
use libm::{erf, erfc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Test-only perturbations of the quantities under check.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Hooks {
    /// Added to every `s_tail_exact` value.
    pub s_tail_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} cases={:<6} worst={:.3e} tol={:.0e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.worst,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

/// Two-arm state with `N_min ∈ [1, 500)`, `N_max = N_min + [1, 5000)`,
/// `σ² ∈ [0.1, 4)` and gap in `[0, 1.5)`.
pub fn random_state(rng: &mut impl Rng) -> EntropyState {
    let n_min = rng.random_range(1..500u64);
    let n_max = n_min + rng.random_range(1..5000u64);
    let sigma2 = rng.random_range(0.1..4.0);
    let mean_min = rng.random_range(-1.0..1.0);
    let gap = rng.random_range(0.0..1.5);
    EntropyState::new(mean_min + gap, n_max, mean_min, n_min, sigma2)
}

pub fn random_states(seed: u64, count: usize) -> Vec<EntropyState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_state(&mut rng)).collect()
}

/// States with `N_max ≥ 10 N_min ≥ 100` and `gap·√N_min ≥ 1`: `N_min`
/// log-uniform on `[100, 2000]`, `N_max/N_min` log-uniform on `[10, 1000]`,
/// `gap·√N_min` uniform on `[1, 5]`, `σ² = 1`.
pub fn asymptotic_grid(seed: u64, count: usize) -> Vec<EntropyState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n_min = 10f64.powf(rng.random_range(2.0..3.3)).round() as u64;
            let n_max = (n_min as f64 * 10f64.powf(rng.random_range(1.0..3.0))).round() as u64;
            let z = rng.random_range(1.0..5.0);
            EntropyState::new(z / (n_min as f64).sqrt(), n_max, 0.0, n_min, 1.0)
        })
        .collect()
}

fn gauss_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn neg_p_log_p(p: f64) -> f64 {
    if p < 1e-300 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// `−∫_{θ_eq}^{∞} p_min ln p_min` by adaptive quadrature.
pub fn tail_by_quadrature(s: &EntropyState, teq: f64, spec: &QuadratureSpec) -> f64 {
    let sn = (s.sigma2 / s.n_min as f64).sqrt();
    let hi = (s.mean_min + 12.0 * sn).max(teq);
    let mut breaks = vec![teq, hi];
    breaks.extend([s.mean_min + 2.0 * sn, s.mean_min + 5.0 * sn].into_iter().filter(|&x| x > teq && x < hi));
    breaks.sort_by(f64::total_cmp);
    integrate(|t| neg_p_log_p(gauss_pdf(t, s.mean_min, sn * sn)), &breaks, spec).unwrap_or(f64::NAN)
}

/// `−∫ F_min p_max ln p_max` by adaptive quadrature.
pub fn body_by_quadrature(s: &EntropyState, spec: &QuadratureSpec) -> f64 {
    let vx = s.sigma2 / s.n_max as f64;
    let vn = s.sigma2 / s.n_min as f64;
    let sx = vx.sqrt();
    let (lo, hi) = (s.mean_max - 12.0 * sx, s.mean_max + 12.0 * sx);
    let mut breaks = vec![lo, s.mean_max - 3.0 * sx, s.mean_max, s.mean_max + 3.0 * sx, hi];
    breaks.extend([s.mean_min].into_iter().filter(|&x| x > lo && x < hi));
    breaks.sort_by(f64::total_cmp);
    integrate(
        |t| {
            let p = gauss_pdf(t, s.mean_max, vx);
            if p < 1e-300 {
                0.0
            } else {
                -0.5 * erfc(-(t - s.mean_min) / (2.0 * vn).sqrt()) * p * p.ln()
            }
        },
        &breaks,
        spec,
    )
    .unwrap_or(f64::NAN)
}

/// Truncated balance `(N_min(θ−μ̂_min)² − N_max(θ−μ̂_max)²)/(2σ²) + ½ ln(N_max/N_min)`.
pub fn theta_balance(s: &EntropyState, theta: f64) -> f64 {
    let (nx, nn) = (s.n_max as f64, s.n_min as f64);
    (nn * (theta - s.mean_min).powi(2) - nx * (theta - s.mean_max).powi(2)) / (2.0 * s.sigma2)
        + 0.5 * (nx / nn).ln()
}

/// Gauss–Hermite expectation of the approximate entropy after one pull of
/// the max arm and of the min arm, minus its current value.
pub fn increments_by_hermite(s: &EntropyState, nodes: usize) -> (f64, f64) {
    let (x, w) = gauss_hermite(nodes);
    let d = theta_eq(s).value().unwrap_or(f64::NAN) - s.mean_min;
    let (nx, nn, s2) = (s.n_max as f64, s.n_min as f64, s.sigma2);
    let total = |d: f64, nx: f64, nn: f64| {
        let (b, t) = s_app_at_offset(d, nx, nn, s2);
        b + t
    };
    let now = total(d, nx, nn);
    let expect = |pulled: f64, nx2: f64, nn2: f64| {
        let acc: f64 = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * total(d + (2.0 * s2).sqrt() * xi / (pulled + 1.0), nx2, nn2))
            .sum();
        acc / PI.sqrt() - now
    };
    (expect(nx, nx + 1.0, nn), expect(nn, nx, nn + 1.0))
}

fn worst(values: impl Iterator<Item = f64>) -> f64 {
    // NaN counts as an infinitely bad residual.
    values.fold(0.0, |w, v| if v.is_nan() { f64::INFINITY } else { w.max(v) })
}

fn check(name: &'static str, tolerance: f64, residuals: Vec<f64>) -> CheckResult {
    CheckResult { name, cases: residuals.len(), worst: worst(residuals.into_iter()), tolerance }
}

pub fn tail_check(hooks: &Hooks, count: usize) -> CheckResult {
    let spec = QuadratureSpec::default();
    let residuals = random_states(11, count)
        .iter()
        .map(|s| {
            let teq = theta_eq(s).value().unwrap_or(f64::NAN);
            (s_tail_exact(s, teq) + hooks.s_tail_offset - tail_by_quadrature(s, teq, &spec)).abs()
        })
        .collect();
    check("tail_vs_quadrature", 1e-8, residuals)
}

pub fn body_check(count: usize) -> CheckResult {
    let spec = QuadratureSpec::default();
    let residuals =
        random_states(12, count).iter().map(|s| (s_body_exact(s) - body_by_quadrature(s, &spec)).abs()).collect();
    check("body_vs_quadrature", 1e-8, residuals)
}

/// `∫ (1 + erf((t−θ₁)/√(2v₁))) N(t; θ₂, v₂) dt = 1 + erf((θ₂−θ₁)/√(2(v₁+v₂)))`.
pub fn erf_identity_check(count: usize) -> CheckResult {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let residuals = (0..count)
        .map(|_| {
            let t1: f64 = rng.random_range(-2.0..2.0);
            let t2: f64 = rng.random_range(-2.0..2.0);
            let v1: f64 = rng.random_range(0.01..3.0);
            let v2: f64 = rng.random_range(0.01..3.0);
            let breaks: Vec<f64> = (-12..=12).map(|k| t2 + k as f64 * v2.sqrt()).collect();
            let lhs = integrate(|t| (1.0 + erf((t - t1) / (2.0 * v1).sqrt())) * gauss_pdf(t, t2, v2), &breaks, &spec)
                .unwrap_or(f64::NAN);
            (lhs - 1.0 - erf((t2 - t1) / (2.0 * (v1 + v2)).sqrt())).abs()
        })
        .collect();
    check("erf_gaussian_identity", 1e-9, residuals)
}

/// Balance residual at `θ_eq`, relative to `1 + θ²`.
pub fn theta_check(count: usize) -> CheckResult {
    let residuals = random_states(14, count)
        .iter()
        .map(|s| {
            let theta = theta_eq(s).value().unwrap_or(f64::NAN);
            theta_balance(s, theta).abs() / (1.0 + theta * theta)
        })
        .collect();
    check("theta_eq_residual", 1e-9, residuals)
}

pub fn increment_check(count: usize) -> CheckResult {
    let residuals = random_states(15, count)
        .iter()
        .map(|s| match increment_closed_form(s) {
            Ok((a, b)) => {
                let (ha, hb) = increments_by_hermite(s, 80);
                (a - ha).abs().max((b - hb).abs())
            }
            Err(_) => f64::NAN,
        })
        .collect();
    check("increment_vs_hermite", 1e-6, residuals)
}

/// Body and tail closed forms against the oracle's partition of the
/// posterior-of-the-maximum entropy.
pub fn partition_check(hooks: &Hooks, count: usize) -> CheckResult {
    let spec = QuadratureSpec::default();
    let residuals = random_states(16, count)
        .iter()
        .map(|s| {
            let set = PosteriorSet::gaussian(&[
                (s.mean_max, s.sigma2 / s.n_max as f64),
                (s.mean_min, s.sigma2 / s.n_min as f64),
            ]);
            let teq = theta_eq(s).value().unwrap_or(f64::NAN);
            match set.and_then(|set| partition_integrals(&set, teq, &spec)) {
                Ok((body, tail)) => (body - s_body_exact(s))
                    .abs()
                    .max((tail - s_tail_exact(s, teq) - hooks.s_tail_offset).abs()),
                Err(_) => f64::NAN,
            }
        })
        .collect();
    check("partition_vs_oracle", 1e-8, residuals)
}

pub fn normalization_check(count: usize) -> CheckResult {
    let spec = QuadratureSpec::default();
    let residuals = random_states(17, count)
        .iter()
        .map(|s| {
            PosteriorSet::gaussian(&[
                (s.mean_max, s.sigma2 / s.n_max as f64),
                (s.mean_min, s.sigma2 / s.n_min as f64),
            ])
            .and_then(|set| pmax_mass(&set, &spec))
            .map_or(f64::NAN, |m| (m - 1.0).abs())
        })
        .collect();
    check("pmax_normalization", 1e-8, residuals)
}

/// Runs every identity suite.
pub fn validate_suite(hooks: &Hooks) -> Report {
    Report {
        checks: vec![
            tail_check(hooks, 100),
            body_check(100),
            erf_identity_check(50),
            theta_check(10_000),
            increment_check(100),
            partition_check(hooks, 100),
            normalization_check(100),
        ],
    }
}
