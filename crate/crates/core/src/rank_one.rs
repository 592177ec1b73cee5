//! Closed-form Pareto machinery for rank-one (beamforming) strategies.
//!
//! With `Q_i = P q_i q_iᵀ`, `q_i = [cos τ_i, sin τ_i]ᵀ`, every rate depends
//! only on `Δτ = τ2 − τ1` modulo π. Two receiver choices are covered:
//!
//! * MMSE receivers ("non-ZF"): the boundary `SINR2(SINR1)` is explicit once
//!   the sign branch `b` is chosen from the quadrant of `φ̄ = φ12 + φ21`.
//! * Zero-forcing receivers: `SINR1 = γ sin²(Δτ + φ12)`,
//!   `SINR2 = γ sin²(Δτ − φ21)`, with the max-sum-rate and max-min points
//!   picked from a short list of stationary points.

use std::f64::consts::{FRAC_PI_2, PI};

use log::warn;
use serde::Serialize;

use crate::channel::{ChannelParams, PowerConfig};
use crate::error::{Error, Result};
use crate::math::{wrap_2pi, Angle};
use crate::rates::{rate_from_sinr, RatePoint};

const SINR_SLACK: f64 = 1e-9;
const D_SLACK: f64 = 1e-9;
const ACOS_SLACK: f64 = 1e-12;
const QUADRANT_EDGE: f64 = 1e-12;

/// A point of the MMSE rank-one boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NzfBoundaryPoint {
    pub sinr1: f64,
    pub sinr2: f64,
    /// `cos²(φ12 + Δτ)`, in [0, 1].
    pub d_value: f64,
    pub b_choice: u8,
    /// A Δτ in [0, π) that realizes the pair.
    pub dtau: Angle,
}

impl NzfBoundaryPoint {
    pub fn rates(&self) -> RatePoint {
        RatePoint::new(rate_from_sinr(self.sinr1), rate_from_sinr(self.sinr2))
    }
}

/// How the sign branch `b` is picked. `Inverted` exists only so that the
/// verification suite can prove it catches a wrong branch table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchRule {
    #[default]
    Table,
    #[doc(hidden)]
    Inverted,
}

/// `[2γ/(1 + 2 g12 γ), 2γ]`, the attainable range of the MMSE SINR of user 1.
pub fn sinr1_feasible_range(ch: &ChannelParams, pw: &PowerConfig) -> (f64, f64) {
    let snr = pw.snr();
    (2.0 * snr / (1.0 + 2.0 * ch.g12 * snr), 2.0 * snr)
}

/// Branch table on `φ̄ ∈ [0, 2π)`: `b = 1` in the first and third quadrants,
/// `b = 0` in the second and fourth. `None` within 1e−12 of a quadrant edge,
/// where both branches coincide.
pub fn branch_from_table(phase_sum: f64) -> Option<u8> {
    let phibar = wrap_2pi(phase_sum);
    let scaled = phibar / FRAC_PI_2;
    let nearest = scaled.round();
    if (scaled - nearest).abs() * FRAC_PI_2 <= QUADRANT_EDGE || (phibar - 2.0 * PI).abs() <= QUADRANT_EDGE {
        return None;
    }
    match scaled.floor() as i64 {
        0 | 2 => Some(1),
        _ => Some(0),
    }
}

/// Interference weight `4 g γ² / (1 + 2 g γ)` of the MMSE SINR.
fn mmse_weight(g: f64, snr: f64) -> f64 {
    4.0 * g * snr * snr / (1.0 + 2.0 * g * snr)
}

/// SINR2 on branch `b` for a given `D`.
///
/// The bracket `x = √D cos φ̄ + (−1)^b sin φ̄ √(1−D)` has the orthogonal
/// companion `y = √D sin φ̄ − (−1)^b cos φ̄ √(1−D)` with `x² + y² = 1`, so
/// `2γ − K x² = 2γ y² + 2γ x² / (1 + 2 g21 γ)` without cancellation.
fn sinr2_on_branch(d: f64, b: u8, phase_sum: f64, g21: f64, snr: f64) -> f64 {
    let sign = if b == 0 { 1.0 } else { -1.0 };
    let (sd, sc) = (d.sqrt(), (1.0 - d).sqrt());
    let (s, c) = phase_sum.sin_cos();
    let x = sd * c + sign * s * sc;
    let y = sd * s - sign * c * sc;
    2.0 * snr * y * y + 2.0 * snr * x * x / (1.0 + 2.0 * g21 * snr)
}

/// Δτ in [0, π) with `cos(φ12 + Δτ) = (−1)^b·…` realizing branch `b`:
/// `Δτ = (−1)^b arccos(√D) − φ12`.
fn branch_dtau(d: f64, b: u8, phi12: f64) -> Angle {
    let base = d.sqrt().clamp(0.0, 1.0).acos();
    let signed = if b == 0 { base } else { -base };
    Angle(signed - phi12).normalized_half_turn()
}

/// Maximal SINR2 attainable by MMSE rank-one strategies for a target SINR1.
pub fn nzf_sinr2(sinr1: f64, ch: &ChannelParams, pw: &PowerConfig) -> Result<NzfBoundaryPoint> {
    nzf_sinr2_with_rule(sinr1, ch, pw, BranchRule::Table)
}

#[doc(hidden)]
pub fn nzf_sinr2_with_rule(
    sinr1: f64,
    ch: &ChannelParams,
    pw: &PowerConfig,
    rule: BranchRule,
) -> Result<NzfBoundaryPoint> {
    let snr = pw.snr();
    let (lo, hi) = sinr1_feasible_range(ch, pw);
    if !sinr1.is_finite() || sinr1 < lo - SINR_SLACK || sinr1 > hi + SINR_SLACK {
        return Err(Error::InfeasibleSinr1 { sinr1, lo, hi });
    }
    let sinr1 = sinr1.clamp(lo, hi);
    let k1 = mmse_weight(ch.g12, snr);
    if k1 == 0.0 {
        // User 1 sees no interference: SINR1 = 2γ for every Δτ, and user 2
        // is best off steering its interference orthogonal to receiver 2.
        let dtau = Angle(ch.phi21.0 + FRAC_PI_2).normalized_half_turn();
        return Ok(NzfBoundaryPoint {
            sinr1: 2.0 * snr,
            sinr2: 2.0 * snr,
            d_value: (ch.phi12.0 + dtau.0).cos().powi(2),
            b_choice: 0,
            dtau,
        });
    }
    let mut d = (2.0 * snr - sinr1) / k1;
    if (-D_SLACK..0.0).contains(&d) {
        d = 0.0;
    }
    if d > 1.0 && d <= 1.0 + D_SLACK {
        d = 1.0;
    }
    let d = d.clamp(0.0, 1.0);
    let phibar = ch.phase_sum();
    let eval = |b: u8| sinr2_on_branch(d, b, phibar, ch.g21, snr);
    let b = match (branch_from_table(phibar), rule) {
        (Some(b), BranchRule::Table) => b,
        (Some(b), BranchRule::Inverted) => 1 - b,
        (None, _) => {
            if eval(1) > eval(0) {
                1
            } else {
                0
            }
        }
    };
    Ok(NzfBoundaryPoint { sinr1, sinr2: eval(b), d_value: d, b_choice: b, dtau: branch_dtau(d, b, ch.phi12.0) })
}

/// SINR1 range of the non-dominated part of the MMSE boundary.
///
/// The optimal-branch bracket reaches zero (SINR2 = 2γ) at `D = sin² φ̄`;
/// for larger `D` both SINRs fall together, so those points are dominated.
pub fn nzf_pareto_sinr1_range(ch: &ChannelParams, pw: &PowerConfig) -> (f64, f64) {
    let snr = pw.snr();
    let k1 = mmse_weight(ch.g12, snr);
    let s = ch.phase_sum().sin();
    (2.0 * snr - k1 * s * s, 2.0 * snr)
}

/// `n` points of the MMSE Pareto boundary, uniform in SINR1, ascending.
pub fn nzf_pareto_points(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> Result<Vec<NzfBoundaryPoint>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 boundary points, got {n}")));
    }
    let (lo, hi) = nzf_pareto_sinr1_range(ch, pw);
    (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            let sinr1 = if k == n - 1 { hi } else { lo + (hi - lo) * t };
            let point = nzf_sinr2(sinr1, ch, pw)?;
            Ok(best_branch(point, ch, pw))
        })
        .collect()
}

/// Re-evaluates the other branch and keeps the larger SINR2.
fn best_branch(point: NzfBoundaryPoint, ch: &ChannelParams, pw: &PowerConfig) -> NzfBoundaryPoint {
    if mmse_weight(ch.g12, pw.snr()) == 0.0 {
        return point;
    }
    let other = 1 - point.b_choice;
    let alt = sinr2_on_branch(point.d_value, other, ch.phase_sum(), ch.g21, pw.snr());
    if alt > point.sinr2 {
        NzfBoundaryPoint { sinr2: alt, b_choice: other, dtau: branch_dtau(point.d_value, other, ch.phi12.0), ..point }
    } else {
        point
    }
}

pub fn nzf_pareto_boundary(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> Result<Vec<RatePoint>> {
    Ok(nzf_pareto_points(ch, pw, n)?.iter().map(NzfBoundaryPoint::rates).collect())
}

/// `(γ sin²(Δτ + φ12), γ sin²(Δτ − φ21))`.
pub fn zf_sinrs(dtau: Angle, ch: &ChannelParams, pw: &PowerConfig) -> (f64, f64) {
    let snr = pw.snr();
    (snr * (dtau.0 + ch.phi12.0).sin().powi(2), snr * (dtau.0 - ch.phi21.0).sin().powi(2))
}

pub fn zf_rates(dtau: Angle, ch: &ChannelParams, pw: &PowerConfig) -> RatePoint {
    let (s1, s2) = zf_sinrs(dtau, ch, pw);
    RatePoint::new(rate_from_sinr(s1), rate_from_sinr(s2))
}

/// Second derivative in Δτ of `f = (1 + SINR1)(1 + SINR2)` under ZF.
pub fn zf_product_curvature(dtau: Angle, ch: &ChannelParams, pw: &PowerConfig) -> f64 {
    let snr = pw.snr();
    let a = dtau.0 + ch.phi12.0;
    let b = dtau.0 - ch.phi21.0;
    let (s1, s2) = zf_sinrs(dtau, ch, pw);
    let (d1, d2) = (snr * (2.0 * a).sin(), snr * (2.0 * b).sin());
    let (dd1, dd2) = (2.0 * snr * (2.0 * a).cos(), 2.0 * snr * (2.0 * b).cos());
    dd1 * (1.0 + s2) + 2.0 * d1 * d2 + dd2 * (1.0 + s1)
}

/// Stationary points of the ZF sum rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZfCandidateKind {
    /// `Δτ = −Δφ/2`
    HalfPhaseDiff,
    /// `Δτ = π/2 − Δφ/2`
    QuarterTurn,
    /// `Δτ = ½ arccos(((γ+2)/γ) cos φ̄) − Δφ/2`, when it exists.
    Interior,
}

impl ZfCandidateKind {
    /// Local-maximum conditions for the two boundary stationary points as
    /// closed inequalities on `cos φ̄`. `Interior` has no such test; exact
    /// differentiation shows it is always a minimum of the sum rate.
    pub fn stated_admissible(self, ch: &ChannelParams, pw: &PowerConfig) -> Option<bool> {
        let snr = pw.snr();
        let c = ch.phase_sum().cos();
        let edge = snr / (2.0 + snr);
        match self {
            ZfCandidateKind::HalfPhaseDiff => Some(c <= edge),
            ZfCandidateKind::QuarterTurn => Some(c >= -edge),
            ZfCandidateKind::Interior => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZfCandidate {
    pub kind: ZfCandidateKind,
    pub dtau: Angle,
    /// Sum rate for the max-sum problem, common rate for max-min.
    pub value: f64,
    pub curvature: f64,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZfSolution {
    pub dtau: Angle,
    pub sinr1: f64,
    pub sinr2: f64,
    pub candidates_evaluated: Vec<ZfCandidate>,
    /// True when no closed-form candidate classified as a maximum and a grid
    /// search supplied the answer instead.
    pub used_fallback: bool,
}

impl ZfSolution {
    pub fn rates(&self) -> RatePoint {
        RatePoint::new(rate_from_sinr(self.sinr1), rate_from_sinr(self.sinr2))
    }
}

fn zf_candidate_angles(ch: &ChannelParams, pw: &PowerConfig, interior: bool) -> Vec<(ZfCandidateKind, Angle)> {
    let half_diff = 0.5 * ch.phase_diff();
    let mut out = vec![
        (ZfCandidateKind::HalfPhaseDiff, Angle(-half_diff)),
        (ZfCandidateKind::QuarterTurn, Angle(FRAC_PI_2 - half_diff)),
    ];
    let snr = pw.snr();
    if interior && snr > 0.0 {
        let mut arg = (snr + 2.0) / snr * ch.phase_sum().cos();
        if arg.abs() > 1.0 && arg.abs() <= 1.0 + ACOS_SLACK {
            arg = arg.signum();
        }
        if arg.abs() <= 1.0 {
            out.push((ZfCandidateKind::Interior, Angle(0.5 * arg.acos() - half_diff)));
        }
    }
    out.into_iter().map(|(k, a)| (k, a.normalized_half_turn())).collect()
}

/// Picks the largest value; exact ties keep the earlier candidate.
fn pick_best(cands: &[ZfCandidate]) -> Option<&ZfCandidate> {
    cands.iter().filter(|c| c.admissible).fold(None, |best: Option<&ZfCandidate>, c| match best {
        Some(b) if b.value >= c.value => Some(b),
        _ => Some(c),
    })
}

fn solution_at(
    dtau: Angle,
    ch: &ChannelParams,
    pw: &PowerConfig,
    cands: Vec<ZfCandidate>,
    fallback: bool,
) -> ZfSolution {
    let (sinr1, sinr2) = zf_sinrs(dtau, ch, pw);
    ZfSolution { dtau, sinr1, sinr2, candidates_evaluated: cands, used_fallback: fallback }
}

const FALLBACK_GRID: usize = 1 << 16;

fn grid_argmax(ch: &ChannelParams, pw: &PowerConfig, objective: impl Fn(RatePoint) -> f64) -> Angle {
    let mut best = (f64::NEG_INFINITY, Angle::ZERO);
    for k in 0..FALLBACK_GRID {
        let dtau = Angle(k as f64 * PI / FALLBACK_GRID as f64);
        let v = objective(zf_rates(dtau, ch, pw));
        if v > best.0 {
            best = (v, dtau);
        }
    }
    best.1
}

/// Maximum ZF sum rate from the closed-form stationary points.
pub fn zf_max_sum_rate(ch: &ChannelParams, pw: &PowerConfig) -> ZfSolution {
    let scale = (1.0 + pw.snr()).powi(2);
    let cands: Vec<ZfCandidate> = zf_candidate_angles(ch, pw, true)
        .into_iter()
        .map(|(kind, dtau)| {
            let curvature = zf_product_curvature(dtau, ch, pw);
            ZfCandidate {
                kind,
                dtau,
                value: zf_rates(dtau, ch, pw).sum(),
                curvature,
                admissible: curvature <= 1e-9 * scale,
            }
        })
        .collect();
    match pick_best(&cands) {
        Some(best) => {
            let dtau = best.dtau;
            solution_at(dtau, ch, pw, cands, false)
        }
        None => {
            warn!("no ZF sum-rate candidate classified as a maximum for {ch:?}; using grid search");
            let dtau = grid_argmax(ch, pw, |r| r.sum());
            solution_at(dtau, ch, pw, cands, true)
        }
    }
}

/// ZF max-min fair point; both candidates equalize the two SINRs.
pub fn zf_max_min(ch: &ChannelParams, pw: &PowerConfig) -> ZfSolution {
    let cands: Vec<ZfCandidate> = zf_candidate_angles(ch, pw, false)
        .into_iter()
        .map(|(kind, dtau)| ZfCandidate {
            kind,
            dtau,
            value: zf_rates(dtau, ch, pw).min(),
            curvature: f64::NAN,
            admissible: true,
        })
        .collect();
    let dtau = pick_best(&cands).expect("two max-min candidates").dtau;
    solution_at(dtau, ch, pw, cands, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_channel;
    use crate::rates::{rank_one_rates, rank_one_sinrs};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, LN_2};

    fn ch(g12: f64, g21: f64, p12: f64, p21: f64) -> ChannelParams {
        ChannelParams::new(g12, g21, p12, p21).unwrap()
    }

    fn snr(gamma: f64) -> PowerConfig {
        PowerConfig::from_snr(gamma).unwrap()
    }

    /// Brute-force max of SINR2 over all Δτ with SINR1(Δτ) = target: scan a
    /// uniform grid for crossings, bisect each to machine precision.
    fn constrained_sweep_max(c: &ChannelParams, pw: &PowerConfig, target: f64, n: usize) -> f64 {
        let f = |x: f64| rank_one_sinrs(Angle(x), c, pw).0 - target;
        let mut best = f64::NEG_INFINITY;
        let mut prev = (0.0, f(0.0));
        for k in 1..=n {
            let x = k as f64 * PI / n as f64;
            let cur = (x, f(x));
            if prev.1 == 0.0 || prev.1.signum() != cur.1.signum() {
                let (mut a, mut b) = (prev.0, cur.0);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                best = best.max(rank_one_sinrs(Angle(0.5 * (a + b)), c, pw).1);
            }
            prev = cur;
        }
        best
    }

    #[test]
    fn feasible_range_examples() {
        assert_eq!(sinr1_feasible_range(&ch(0.0, 1.0, 0.0, 0.0), &snr(3.0)), (6.0, 6.0));
        let (lo, hi) = sinr1_feasible_range(&ch(1.0, 1.0, 0.0, 0.0), &snr(1.0));
        assert!((lo - 2.0 / 3.0).abs() < 1e-15 && hi == 2.0);
        let c = ch(1.3, 0.4, 0.2, 1.0);
        let pw = snr(4.0);
        let (lo, hi) = sinr1_feasible_range(&c, &pw);
        assert!((nzf_sinr2(lo, &c, &pw).unwrap().d_value - 1.0).abs() < 1e-12);
        assert_eq!(nzf_sinr2(hi, &c, &pw).unwrap().d_value, 0.0);
    }

    #[test]
    fn branch_table_quadrants() {
        assert_eq!(branch_from_table(0.3), Some(1));
        assert_eq!(branch_from_table(2.0), Some(0));
        assert_eq!(branch_from_table(3.5), Some(1));
        assert_eq!(branch_from_table(5.0), Some(0));
        assert_eq!(branch_from_table(-0.4), Some(0));
        assert_eq!(branch_from_table(0.0), None);
        assert_eq!(branch_from_table(FRAC_PI_2), None);
        assert_eq!(branch_from_table(-PI), None);
    }

    #[test]
    fn d_endpoints_collapse_the_bracket() {
        let c = ch(0.8, 1.7, 0.9, 1.3);
        let pw = snr(5.0);
        let gm = pw.snr();
        let k2 = 4.0 * 1.7 * gm * gm / (1.0 + 2.0 * 1.7 * gm);
        let phibar = c.phase_sum();
        let top = nzf_sinr2(2.0 * gm, &c, &pw).unwrap();
        assert!((top.sinr2 - (2.0 * gm - k2 * phibar.sin().powi(2))).abs() < 1e-12);
        let (lo, _) = sinr1_feasible_range(&c, &pw);
        let bottom = nzf_sinr2(lo, &c, &pw).unwrap();
        assert!((bottom.sinr2 - (2.0 * gm - k2 * phibar.cos().powi(2))).abs() < 1e-12);
    }

    #[test]
    fn infeasible_targets_are_rejected() {
        let c = ch(1.0, 1.0, 0.2, 0.1);
        let pw = snr(2.0);
        assert!(matches!(nzf_sinr2(4.1, &c, &pw), Err(Error::InfeasibleSinr1 { .. })));
        assert!(matches!(nzf_sinr2(0.1, &c, &pw), Err(Error::InfeasibleSinr1 { .. })));
        assert!(nzf_sinr2(4.0 + 5e-10, &c, &pw).is_ok());
    }

    #[test]
    fn midpoint_matches_constrained_sweep() {
        let c = ch(0.5, 2.0, 0.3, -0.7);
        let pw = snr(10.0);
        let (lo, hi) = sinr1_feasible_range(&c, &pw);
        let target = 0.5 * (lo + hi);
        let point = nzf_sinr2(target, &c, &pw).unwrap();
        let oracle = constrained_sweep_max(&c, &pw, target, 1_000_000);
        assert!((point.sinr2 - oracle).abs() < 1e-6, "{} vs {oracle}", point.sinr2);
    }

    #[test]
    fn reported_dtau_reproduces_the_boundary_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..2.0)));
            let (lo, hi) = sinr1_feasible_range(&c, &pw);
            let p = nzf_sinr2(rng.gen_range(lo..=hi), &c, &pw).unwrap();
            assert!((0.0..=1.0).contains(&p.d_value));
            let direct = rank_one_rates(p.dtau, &c, &pw);
            let rates = p.rates();
            assert!((direct.r1 - rates.r1).abs() < 1e-9 && (direct.r2 - rates.r2).abs() < 1e-9);
        }
    }

    #[test]
    fn table_branch_is_the_better_branch_inside_quadrants() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..300 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..2.0)));
            let (lo, hi) = sinr1_feasible_range(&c, &pw);
            let table = nzf_sinr2(rng.gen_range(lo..=hi), &c, &pw).unwrap();
            let other = sinr2_on_branch(table.d_value, 1 - table.b_choice, c.phase_sum(), c.g21, pw.snr());
            assert!(table.sinr2 >= other - 1e-12);
        }
    }

    #[test]
    fn boundary_with_two_points_is_the_arc_endpoints() {
        // With φ̄ = π/2 the non-dominated arc spans the whole feasible interval.
        let c = ch(0.7, 1.4, 1.0, FRAC_PI_2 - 1.0);
        let pw = snr(3.0);
        let pts = nzf_pareto_points(&c, &pw, 2).unwrap();
        let (lo, hi) = sinr1_feasible_range(&c, &pw);
        assert!((pts[0].sinr1 - lo).abs() < 1e-12 && (pts[0].d_value - 1.0).abs() < 1e-12);
        assert!(pts[1].sinr1 == hi && pts[1].d_value == 0.0);
        assert!(nzf_pareto_points(&c, &pw, 1).is_err());
    }

    fn sweep(c: &ChannelParams, pw: &PowerConfig, n: usize) -> Vec<RatePoint> {
        (0..n).map(|k| rank_one_rates(Angle(k as f64 * PI / n as f64), c, pw)).collect()
    }

    #[test]
    fn boundary_points_are_not_dominated_by_the_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..2.0)));
            let cloud = sweep(&c, &pw, 1_000_000);
            let boundary = nzf_pareto_boundary(&c, &pw, 64).unwrap();
            for b in &boundary {
                let dominated = cloud.iter().any(|q| q.covers(b, 0.0) && (q.r1 > b.r1 + 1e-6 || q.r2 > b.r2 + 1e-6));
                assert!(!dominated, "{b:?} dominated for {c:?}");
            }
        }
    }

    #[test]
    fn envelope_beyond_the_arc_is_dominated() {
        // D > sin²φ̄ points are dominated by the arc start, where SINR2 = 2γ.
        let c = ch(1.0, 2.0, 0.2, 0.1);
        let pw = snr(5.0);
        let (arc_lo, _) = nzf_pareto_sinr1_range(&c, &pw);
        let start = nzf_sinr2(arc_lo, &c, &pw).unwrap();
        assert!((start.sinr2 - 2.0 * pw.snr()).abs() < 1e-9);
        let (lo, _) = sinr1_feasible_range(&c, &pw);
        let inside = nzf_sinr2(0.5 * (lo + arc_lo), &c, &pw).unwrap();
        assert!(inside.sinr1 < start.sinr1 && inside.sinr2 < start.sinr2);
    }

    #[test]
    fn symmetric_channel_gives_symmetric_boundary() {
        let c = ch(0.9, 0.9, 0.4, 0.4);
        let pw = snr(6.0);
        let swapped_pw = pw;
        for p in nzf_pareto_points(&c, &pw, 50).unwrap() {
            // The swapped point must lie on the same curve.
            let mirror = nzf_sinr2(p.sinr2, &c.swapped(), &swapped_pw).unwrap();
            assert!((mirror.sinr2 - p.sinr1).abs() < 1e-9, "{p:?} {mirror:?}");
        }
    }

    #[test]
    fn zf_sinr_examples() {
        let c = ch(1.0, 1.0, 0.3, -0.5);
        let pw = snr(2.0);
        let (s1, _) = zf_sinrs(Angle(FRAC_PI_2 - 0.3), &c, &pw);
        assert!((s1 - 2.0).abs() < 1e-15);
        let (_, s2) = zf_sinrs(Angle(-0.5), &c, &pw);
        assert!(s2.abs() < 1e-30);
    }

    #[test]
    fn zf_is_dominated_by_mmse_at_the_same_dtau() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..1000 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-2.0..4.0)));
            let d = Angle(rng.gen_range(0.0..PI));
            let (z1, z2) = zf_sinrs(d, &c, &pw);
            let (m1, m2) = rank_one_sinrs(d, &c, &pw);
            assert!(z1 <= m1 * (1.0 + 1e-12) && z2 <= m2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zf_region_lies_under_the_mmse_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..20 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..2.0)));
            let (arc_lo, _) = nzf_pareto_sinr1_range(&c, &pw);
            for k in 0..200 {
                let d = Angle(k as f64 * PI / 200.0);
                let z = zf_rates(d, &c, &pw);
                let (m1, _) = rank_one_sinrs(d, &c, &pw);
                let b = nzf_sinr2(m1.max(arc_lo), &c, &pw).unwrap().rates();
                assert!(b.covers(&z, 1e-6), "{z:?} not under {b:?}");
            }
        }
    }

    #[test]
    fn zf_max_sum_examples() {
        let sol = zf_max_sum_rate(&ch(1.0, 1.0, 0.0, 0.0), &snr(1.0));
        assert!((sol.dtau.0 - FRAC_PI_2).abs() < 1e-15);
        assert!((sol.sinr1 - 1.0).abs() < 1e-15 && (sol.sinr2 - 1.0).abs() < 1e-15);
        assert!((sol.rates().sum() - 1.0).abs() < 1e-15);

        let sol = zf_max_sum_rate(&ch(1.0, 1.0, FRAC_PI_2, 0.0), &snr(1.0));
        assert!((sol.rates().sum() - 1.5f64.log2()).abs() < 1e-12);
        assert!((sol.dtau.0 - FRAC_PI_4).abs() < 1e-12 || (sol.dtau.0 - 3.0 * FRAC_PI_4).abs() < 1e-12);
        assert!((sol.sinr1 - 0.5).abs() < 1e-12 && (sol.sinr2 - 0.5).abs() < 1e-12);
        assert!(!sol.used_fallback);
        // The exhaustive product scan agrees.
        let grid_best = (0..100_000)
            .map(|k| {
                let d = k as f64 * PI / 100_000.0;
                (1.0 + (d + FRAC_PI_2).sin().powi(2)) * (1.0 + d.sin().powi(2))
            })
            .fold(f64::MIN, f64::max);
        assert!((0.5 * grid_best.ln() / LN_2 - 1.5f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn interior_stationary_point_is_a_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let mut seen = 0;
        for _ in 0..500 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..3.0)));
            let sol = zf_max_sum_rate(&c, &pw);
            for cand in &sol.candidates_evaluated {
                if cand.kind == ZfCandidateKind::Interior {
                    seen += 1;
                    assert!(cand.curvature >= -1e-9 * (1.0 + pw.snr()).powi(2));
                }
            }
        }
        assert!(seen > 50);
    }

    #[test]
    fn curvature_agrees_with_stated_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..2000 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..3.0)));
            let sol = zf_max_sum_rate(&c, &pw);
            for cand in &sol.candidates_evaluated {
                if let Some(stated) = cand.kind.stated_admissible(&c, &pw) {
                    let scale = (1.0 + pw.snr()).powi(2);
                    if cand.curvature.abs() > 1e-6 * scale {
                        assert_eq!(cand.admissible, stated, "{cand:?} {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_matches_finite_differences() {
        let c = ch(0.4, 2.2, 0.7, -1.9);
        let pw = snr(3.0);
        let f = |x: f64| {
            let (a, b) = zf_sinrs(Angle(x), &c, &pw);
            (1.0 + a) * (1.0 + b)
        };
        for k in 0..50 {
            let x = k as f64 * 0.13;
            let h = 1e-4;
            let fd = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            assert!((fd - zf_product_curvature(Angle(x), &c, &pw)).abs() < 1e-5);
        }
    }

    #[test]
    fn zf_max_min_examples() {
        let sol = zf_max_min(&ch(1.0, 1.0, 0.0, 0.0), &snr(1.0));
        assert!((sol.dtau.0 - FRAC_PI_2).abs() < 1e-15);
        assert!((sol.rates().min() - 0.5).abs() < 1e-15);
        let zero = sol.candidates_evaluated.iter().find(|c| c.kind == ZfCandidateKind::HalfPhaseDiff).unwrap();
        assert_eq!(zero.value, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..200 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-1.0..3.0)));
            for cand in zf_max_min(&c, &pw).candidates_evaluated {
                let (s1, s2) = zf_sinrs(cand.dtau, &c, &pw);
                assert!((s1 - s2).abs() <= 1e-10 * pw.snr());
            }
        }
    }

    #[test]
    fn zf_matches_mmse_in_slope_at_high_snr() {
        // At γ = 10⁴ the best ZF and MMSE sum rates differ by the constant
        // one bit from ZF's γ (rather than 2γ) per-receiver SNR; the gap is
        // otherwise vanishing.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let pw = snr(1e4);
        for _ in 0..10 {
            let c = random_channel(&mut rng);
            let zf = zf_max_sum_rate(&c, &pw).rates().sum();
            let mmse = (0..1_000_000)
                .map(|k| rank_one_rates(Angle(k as f64 * PI / 1e6), &c, &pw).sum())
                .fold(f64::MIN, f64::max);
            assert!((mmse - zf - 1.0).abs() < 0.01, "gap {}", mmse - zf);
        }
    }

    #[test]
    #[ignore = "fails by ~1 bit: ZF SINR uses γ where MMSE uses 2γ; kept to document the literal claim"]
    fn zf_within_hundredth_of_a_bit_of_mmse_at_high_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let pw = snr(1e4);
        let c = random_channel(&mut rng);
        let zf = zf_max_sum_rate(&c, &pw).rates().sum();
        let mmse =
            (0..1_000_000).map(|k| rank_one_rates(Angle(k as f64 * PI / 1e6), &c, &pw).sum()).fold(f64::MIN, f64::max);
        assert!(mmse - zf <= 0.01);
    }
}
