//! Closed form against brute force, channel by channel.
//!
//! Every check pairs a closed-form routine with an independent numerical
//! oracle (dense `Δτ` sweeps, exhaustive grids, finite differences) and
//! reports the worst disagreement. The oracles are public so that test
//! harnesses can run them at other sizes.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{
    high_snr_offset, low_snr_derivatives, optimal_high_snr_offset, sum_rate_nats, wideband_coupling,
    wideband_slope_grid,
};
use crate::channel::{random_channel, ChannelParams, Covariance2, PowerConfig};
use crate::game::verify_nash;
use crate::math::{wrap_pi, Angle};
use crate::rank_one::{nzf_sinr2_with_rule, sinr1_feasible_range, zf_max_min, zf_max_sum_rate, zf_rates, BranchRule};
use crate::rates::{rank_one_rates, rank_one_sinrs, RatePoint};
use crate::region::pareto_filter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate corruptions, used to prove the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign branch of the MMSE boundary.
    BranchTable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub anchor: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing_anchors(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.anchor).collect()
    }
}

/// Sizes of one verification level.
#[derive(Clone, Copy, Debug)]
struct Sizes {
    channels: usize,
    sweep: usize,
    nzf_targets: usize,
    nash_channels: usize,
    nash_grid: usize,
    slope_channels: usize,
    slope_grid: usize,
    derivative_cases: usize,
}

impl Level {
    fn sizes(self) -> Sizes {
        match self {
            Level::Quick => Sizes {
                channels: 8,
                sweep: 100_000,
                nzf_targets: 16,
                nash_channels: 4,
                nash_grid: 41,
                slope_channels: 6,
                slope_grid: 9,
                derivative_cases: 25,
            },
            Level::Full => Sizes {
                channels: 20,
                sweep: 1_000_000,
                nzf_targets: 64,
                nash_channels: 20,
                nash_grid: 201,
                slope_channels: 20,
                slope_grid: 17,
                derivative_cases: 100,
            },
        }
    }
}

/// Largest SINR2 among all `Δτ` with `SINR1(Δτ) = target`, found by
/// scanning an `n`-point grid for sign changes and bisecting each one.
pub fn constrained_sinr2_oracle(ch: &ChannelParams, pw: &PowerConfig, targets: &[f64], n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|k| PI * k as f64 / n as f64).collect();
    let s1: Vec<f64> = xs.par_iter().map(|&x| rank_one_sinrs(Angle(x), ch, pw).0).collect();
    targets
        .par_iter()
        .map(|&target| {
            let f = |x: f64| rank_one_sinrs(Angle(x), ch, pw).0 - target;
            let mut best = f64::NEG_INFINITY;
            for k in 0..n {
                let (fa, fb) = (s1[k] - target, s1[k + 1] - target);
                if fa == 0.0 || fa.signum() != fb.signum() {
                    let (mut a, mut b) = (xs[k], xs[k + 1]);
                    let sa = fa.signum();
                    for _ in 0..60 {
                        let m = 0.5 * (a + b);
                        if f(m).signum() == sa {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    best = best.max(rank_one_sinrs(Angle(0.5 * (a + b)), ch, pw).1);
                }
            }
            best
        })
        .collect()
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Grid argmax of `objective(Δτ)` over `n` points of `[0, π)`, plus the
/// maximum after golden-section polishing within one step of it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepMax {
    pub grid_dtau: f64,
    pub grid_value: f64,
    pub polished: f64,
    pub step: f64,
}

pub fn dtau_sweep_max(objective: impl Fn(f64) -> f64 + Sync, n: usize) -> SweepMax {
    let step = PI / n as f64;
    let (grid_dtau, grid_value) = (0..n)
        .into_par_iter()
        .map(|k| {
            let x = k as f64 * step;
            (x, objective(x))
        })
        .reduce(|| (0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let (_, polished) = golden_max(&objective, grid_dtau - step, grid_dtau + step);
    SweepMax { grid_dtau, grid_value, polished: polished.max(grid_value), step }
}

/// Distance between two `Δτ` values modulo π.
pub fn dtau_distance(a: f64, b: f64) -> f64 {
    wrap_pi(2.0 * (a - b)).abs() * 0.5
}

struct Tally {
    cases: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, worst: 0.0, failures: Vec::new() }
    }

    fn record(&mut self, err: f64, tol: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        let err = if err.is_nan() { f64::INFINITY } else { err };
        self.worst = self.worst.max(err);
        if err > tol && self.failures.len() < 3 {
            self.failures.push(what());
        }
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.record(if ok { 0.0 } else { f64::INFINITY }, 0.0, what);
    }

    fn finish(self, anchor: &'static str, description: &'static str, tolerance: f64, start: Instant) -> CheckResult {
        let passed = self.worst <= tolerance && self.cases > 0;
        CheckResult {
            anchor,
            description,
            passed,
            cases: self.cases,
            worst: self.worst,
            tolerance,
            detail: self.failures.join("; "),
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn check_nzf(channels: &[(ChannelParams, PowerConfig)], sizes: Sizes, fault: Fault) -> CheckResult {
    let start = Instant::now();
    let rule = match fault {
        Fault::BranchTable => BranchRule::Inverted,
        Fault::None => BranchRule::Table,
    };
    let mut tally = Tally::new();
    for (c, pw) in channels {
        let (lo, hi) = sinr1_feasible_range(c, pw);
        let m = sizes.nzf_targets;
        let targets: Vec<f64> = (0..m).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / m as f64).collect();
        let oracle = constrained_sinr2_oracle(c, pw, &targets, sizes.sweep);
        for (t, o) in targets.iter().zip(oracle) {
            match nzf_sinr2_with_rule(*t, c, pw, rule) {
                Ok(p) => tally.record((p.sinr2 - o).abs(), 1e-6, || format!("{c:?} sinr1={t}: {} vs {o}", p.sinr2)),
                Err(e) => tally.flag(false, || e.to_string()),
            }
        }
    }
    tally.finish("nzf-pareto-boundary", "MMSE rank-one boundary SINR2(SINR1) vs constrained Δτ sweep", 1e-6, start)
}

fn check_zf(channels: &[(ChannelParams, PowerConfig)], sizes: Sizes) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    for (c, pw) in channels {
        let sum = zf_max_sum_rate(c, pw);
        let mm = zf_max_min(c, pw);
        for (sol, objective) in
            [(&sum, (|r: RatePoint| r.sum()) as fn(RatePoint) -> f64), (&mm, |r: RatePoint| r.min())]
        {
            let value = objective(sol.rates());
            let sweep = dtau_sweep_max(|x| objective(zf_rates(Angle(x), c, pw)), sizes.sweep);
            tally.record((value - sweep.polished).abs(), 1e-8, || {
                format!("{c:?} γ={}: closed {value} vs sweep {}", pw.snr(), sweep.polished)
            });
            let located = sol.candidates_evaluated.iter().any(|cand| {
                (objective(zf_rates(cand.dtau, c, pw)) - sweep.polished).abs() <= 1e-8
                    && dtau_distance(cand.dtau.0, sweep.grid_dtau) <= sweep.step * (1.0 + 1e-9)
            });
            tally.flag(located, || format!("{c:?}: no optimal candidate within one step of {}", sweep.grid_dtau));
        }
    }
    tally.finish("zf-stationary-points", "ZF max-sum and max-min closed forms vs Δτ sweep", 1e-8, start)
}

fn check_nash(rng: &mut ChaCha8Rng, sizes: Sizes) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    for k in 0..sizes.nash_channels {
        let c = random_channel(rng);
        let gamma = [0.1, 1.0, 100.0][k % 3];
        let pw = PowerConfig::from_snr(gamma).expect("positive SNR");
        let ok = verify_nash(&c, &pw, (sizes.nash_grid, sizes.nash_grid)).unwrap_or(false);
        tally.flag(ok, || format!("{c:?} γ={gamma}: best response to proper is not proper"));
    }
    tally.finish("proper-equilibrium", "best response to (P/2)I is (P/2)I on a grid", 0.0, start)
}

fn random_shape(rng: &mut ChaCha8Rng) -> Covariance2 {
    let p: f64 = rng.gen_range(0.0..=1.0);
    let u: f64 = rng.gen_range(-1.0..=1.0);
    Covariance2::from_params(p, u * (p * (1.0 - p)).sqrt(), 1.0).expect("unit shape")
}

/// Central differences of the analytic sum rate at `γ = 0`.
pub fn derivative_oracle(q1: &Covariance2, q2: &Covariance2, ch: &ChannelParams) -> (f64, f64) {
    let f = |g: f64| sum_rate_nats(g, q1, q2, ch);
    let (h1, h2) = (1e-6, 1e-4);
    ((f(h1) - f(-h1)) / (2.0 * h1), (f(h2) - 2.0 * f(0.0) + f(-h2)) / (h2 * h2))
}

fn check_low_snr(rng: &mut ChaCha8Rng, sizes: Sizes) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    for _ in 0..sizes.derivative_cases {
        let c = random_channel(rng);
        let (a, b) = (random_shape(rng), random_shape(rng));
        let (r_dot, r_ddot) = low_snr_derivatives(&a, &b, &c);
        let (fd1, fd2) = derivative_oracle(&a, &b, &c);
        // Both relative errors are scaled to a common tolerance of 1.
        let err = ((fd1 - r_dot).abs() / r_dot.abs() / 1e-4).max((fd2 - r_ddot).abs() / r_ddot.abs() / 1e-3);
        tally.record(err, 1.0, || format!("{c:?}: ({r_dot}, {r_ddot}) vs ({fd1}, {fd2})"));
    }
    tally.finish(
        "low-snr-derivatives",
        "first/second sum-rate derivatives at zero SNR vs central differences (scaled error)",
        1.0,
        start,
    )
}

fn check_wideband(rng: &mut ChaCha8Rng, sizes: Sizes) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    let mut done = 0;
    while done < sizes.slope_channels {
        let c = random_channel(rng);
        let m = wideband_coupling(&c);
        if (m - 1.0).abs() < 0.05 {
            continue;
        }
        done += 1;
        match wideband_slope_grid(&c, sizes.slope_grid) {
            Ok(s) => tally.flag(s.argmax_is_proper == (m < 1.0), || {
                format!("{c:?}: coupling {m} but grid argmax {:?}", s.argmax)
            }),
            Err(e) => tally.flag(false, || e.to_string()),
        }
    }
    tally.finish(
        "wideband-slope-coupling",
        "S0 grid argmax is proper exactly when |g12 + g21 e^{2j(phi12+phi21)}| <= 1",
        0.0,
        start,
    )
}

fn check_high_snr(channels: &[(ChannelParams, PowerConfig)], rng: &mut ChaCha8Rng, sizes: Sizes) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    let gamma = 2f64.powi(40);
    let pw = PowerConfig::from_snr(gamma).expect("positive SNR");
    for _ in 0..sizes.derivative_cases {
        let c = random_channel(rng);
        let dtau = Angle(rng.gen_range(0.0..PI));
        if let Ok(rep) = high_snr_offset(dtau, &c) {
            let numeric = gamma.log2() - rank_one_rates(dtau, &c, &pw).sum();
            tally.record((numeric - rep.l_inf).abs(), 1e-3, || {
                format!("{c:?} Δτ={}: {} vs {numeric}", dtau.0, rep.l_inf)
            });
        }
    }
    // Optimum vs grid minimum, rescaled to the same tolerance.
    for (c, _) in channels {
        let opt = optimal_high_snr_offset(c);
        let sweep =
            dtau_sweep_max(|x| high_snr_offset(Angle(x), c).map_or(f64::NEG_INFINITY, |r| -r.l_inf), sizes.sweep);
        tally.record((opt.l_inf + sweep.polished).abs() * 1e5, 1e-3, || {
            format!("{c:?}: optimal {} vs sweep {}", opt.l_inf, -sweep.polished)
        });
    }
    tally.finish("high-snr-offset", "power offset vs log2(γ) − sum rate at γ = 2^40, and optimum vs sweep", 1e-3, start)
}

fn check_pareto(rng: &mut ChaCha8Rng) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    for _ in 0..20 {
        let n = rng.gen_range(1..300);
        let pts: Vec<RatePoint> = (0..n)
            .map(|_| RatePoint { r1: rng.gen_range(0..20) as f64 * 0.1, r2: rng.gen_range(0..20) as f64 * 0.1 })
            .collect();
        let fast = pareto_filter(&pts, 0.0);
        let mut brute: Vec<RatePoint> = pts
            .iter()
            .filter(|p| !pts.iter().any(|q| q.covers(p, 0.0) && (q.r1 > p.r1 || q.r2 > p.r2)))
            .copied()
            .collect();
        brute.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
        tally.flag(fast == brute, || format!("{n}-point cloud differs from quadratic scan"));
    }
    tally.finish("pareto-filter", "sort-based non-dominated filter vs quadratic scan", 0.0, start)
}

/// Runs every check on the scenario channel plus seeded random channels.
pub fn run(scenario: Option<(ChannelParams, PowerConfig)>, level: Level, seed: u64, fault: Fault) -> VerifyReport {
    let sizes = level.sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut channels: Vec<(ChannelParams, PowerConfig)> = scenario.into_iter().collect();
    while channels.len() < sizes.channels {
        let c = random_channel(&mut rng);
        let gamma = if channels.len().is_multiple_of(2) { 1.0 } else { 10.0 };
        channels.push((c, PowerConfig::from_snr(gamma).expect("positive SNR")));
    }
    let checks = vec![
        check_nzf(&channels, sizes, fault),
        check_zf(&channels, sizes),
        check_nash(&mut rng, sizes),
        check_low_snr(&mut rng, sizes),
        check_wideband(&mut rng, sizes),
        check_high_snr(&channels, &mut rng, sizes),
        check_pareto(&mut rng),
    ];
    VerifyReport { level, seed, checks }
}
