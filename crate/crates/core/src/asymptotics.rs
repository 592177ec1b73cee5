//! Extreme-SNR behavior of the sum rate.
//!
//! Low SNR: first and second derivatives of the sum rate at `γ = 0`, the
//! wide-band slope `S₀` and the minimum energy per bit. Derivatives are in
//! nats; only `S₀` is converted to bits/s/Hz per dB.
//!
//! High SNR: rank-one strategies reach slope `S∞ = 1` (one bit per 3 dB of
//! `γ`) and a power offset `L∞` that depends on `Δτ` only.

use std::f64::consts::{FRAC_PI_2, LN_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelParams, Covariance2, User};
use crate::error::{Error, Result};
use crate::game::within_one_step_of_proper;
use crate::math::{det2, rotation_matrix, Angle, Mat2};

/// `10 log10 2`: converts "per 3 dB" to "per dB".
const DB_PER_DOUBLING: f64 = 3.010299956639812;
const SIN_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowSnrReport {
    /// Sum-rate derivative at `γ = 0`, nats per unit `γ`.
    pub r_dot: f64,
    /// Second derivative, nats per unit `γ²`.
    pub r_ddot: f64,
    /// Wide-band slope, bits/s/Hz per dB.
    pub s0: f64,
    /// Minimum energy per bit of the sum rate, dB.
    pub ebn0_min_db: f64,
    /// Both inputs use the full budget, so `ebn0_min_db` does not depend on
    /// the covariance shapes.
    pub ebn0_covariance_free: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HighSnrReport {
    /// Bits per 3 dB.
    pub s_inf: f64,
    /// Power offset in 3-dB units.
    pub l_inf: f64,
    pub dtau_opt: Angle,
}

fn cross_term(user: User, own: &Mat2, other: &Mat2, ch: &ChannelParams) -> (Mat2, Mat2) {
    let j = rotation_matrix(ch.cross_phase(user));
    let interference = j.congruence(other).scale(ch.cross_gain(user));
    (*own + interference, interference)
}

/// `(Ṙ, R̈)` of the sum rate at `γ = 0`, in nats, for the normalized shapes
/// `Q̄_i = Q_i / P`:
///
/// `Ṙ_i = tr Q̄_i`, `R̈_i = −2 tr((Q̄_i + g_ik J Q̄_k Jᵀ)²) + 2 g_ik² tr(Q̄_k²)`.
pub fn low_snr_derivatives(q1: &Covariance2, q2: &Covariance2, ch: &ChannelParams) -> (f64, f64) {
    let (a, b) = (q1.normalized(), q2.normalized());
    let (m1, m2) = (*a.matrix(), *b.matrix());
    let mut r_dot = 0.0;
    let mut r_ddot = 0.0;
    for (user, own, other) in [(User::One, &m1, &m2), (User::Two, &m2, &m1)] {
        let (total, interference) = cross_term(user, own, other, ch);
        r_dot += own.trace();
        r_ddot += -2.0 * (total * total).trace() + 2.0 * (interference * interference).trace();
    }
    (r_dot, r_ddot)
}

/// Sum rate in nats at `γ` for the normalized shapes, as an analytic
/// function of `γ`. Unlike [`crate::rates::rate_pair`] it accepts small
/// negative `γ`, which central differences at zero need.
pub fn sum_rate_nats(gamma: f64, q1: &Covariance2, q2: &Covariance2, ch: &ChannelParams) -> f64 {
    let (a, b) = (q1.normalized(), q2.normalized());
    let half = Mat2::diag(0.5, 0.5);
    [(User::One, a.matrix(), b.matrix()), (User::Two, b.matrix(), a.matrix())]
        .into_iter()
        .map(|(user, own, other)| {
            let (total, interference) = cross_term(user, own, other, ch);
            0.5 * (det2(&(half + total.scale(gamma))) / det2(&(half + interference.scale(gamma)))).ln()
        })
        .sum()
}

/// `S₀ = 2Ṙ² / (−R̈)` converted to per dB, and `(Eb/N0)min = ln 2 / Ṙ`.
pub fn wideband_slope(q1: &Covariance2, q2: &Covariance2, ch: &ChannelParams) -> Result<LowSnrReport> {
    let (r_dot, r_ddot) = low_snr_derivatives(q1, q2, ch);
    if !(r_ddot < 0.0) {
        return Err(Error::DegenerateCurvature { r_ddot });
    }
    let full = |q: &Covariance2| (q.normalized().matrix().trace() - 1.0).abs() <= 1e-12;
    Ok(LowSnrReport {
        r_dot,
        r_ddot,
        s0: 2.0 * r_dot * r_dot / -r_ddot / DB_PER_DOUBLING,
        ebn0_min_db: 10.0 * (LN_2 / r_dot).log10(),
        ebn0_covariance_free: full(q1) && full(q2),
    })
}

/// `M = |g12 + g21 e^{2jφ̄}|`, the coupling between the two users' improper
/// components in the low-SNR curvature.
///
/// Writing each unit-trace shape as `½I + ½[[c, s], [s, −c]]` with
/// `z = c + js`, `−R̈/2 = 1 + g12 + g21 + ½(|z1|² + |z2|²) + Re(z1 z̄2 w)` with
/// `|w| = M`. Proper signaling (`z = 0`) maximizes `S₀` iff `M ≤ 1`;
/// otherwise two aligned rank-one shapes do better.
pub fn wideband_coupling(ch: &ChannelParams) -> f64 {
    let (s, c) = (2.0 * ch.phase_sum()).sin_cos();
    (ch.g12 + ch.g21 * c).hypot(ch.g21 * s)
}

pub fn proper_maximizes_wideband_slope(ch: &ChannelParams) -> bool {
    wideband_coupling(ch) <= 1.0
}

/// Supremum of `S₀` over full-power shape pairs, per dB.
pub fn max_wideband_slope(ch: &ChannelParams) -> f64 {
    let m = wideband_coupling(ch);
    let t = 1.0 + ch.g12 + ch.g21 + (1.0 - m).min(0.0);
    4.0 / t / DB_PER_DOUBLING
}

/// Normalized shape parameters `(p1, α1, p2, α2)`.
pub type ShapePair = [f64; 4];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidebandGridSearch {
    pub argmax: ShapePair,
    pub s0_max: f64,
    pub s0_proper: f64,
    pub points_per_axis: usize,
    /// Both users' argmax shapes are within one grid step of proper.
    pub argmax_is_proper: bool,
}

/// Exhaustive `S₀` maximization over an `n⁴` grid in `(p1, u1, p2, u2)`,
/// `α = u√(p(1−p))`. Ties within 1e−12 go to the most proper pair.
pub fn wideband_slope_grid(ch: &ChannelParams, n: usize) -> Result<WidebandGridSearch> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {n}")));
    }
    let axis = |lo: f64, hi: f64| -> Vec<f64> { crate::game::grid_axis(n, lo, hi).collect() };
    let (ps, us) = (axis(0.0, 1.0), axis(-1.0, 1.0));
    let shapes: Vec<(f64, f64, Covariance2)> = ps
        .iter()
        .flat_map(|&p| {
            let bound = (p * (1.0 - p)).sqrt();
            us.iter().map(move |&u| {
                let alpha = u * bound + 0.0;
                (p, alpha, Covariance2::from_params(p, alpha, 1.0).expect("grid shape is feasible"))
            })
        })
        .collect();
    let values: Vec<(usize, usize, f64)> = (0..shapes.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let shapes = &shapes;
            (0..shapes.len()).map(move |k| {
                let (r_dot, r_ddot) = low_snr_derivatives(&shapes[i].2, &shapes[k].2, ch);
                (i, k, 2.0 * r_dot * r_dot / -r_ddot / DB_PER_DOUBLING)
            })
        })
        .collect();
    let best = values.iter().map(|v| v.2).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let key = |&(i, k, _): &(usize, usize, f64)| {
        let (p1, a1, _) = shapes[i];
        let (p2, a2, _) = shapes[k];
        [a1.abs().max(a2.abs()), (p1 - 0.5).abs().max((p2 - 0.5).abs()), p1, a1, p2, a2]
    };
    let winner = values
        .iter()
        .filter(|v| v.2 >= best - tol)
        .min_by(|x, y| {
            key(x)
                .iter()
                .zip(key(y).iter())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("grid is non-empty");
    let (p1, a1, _) = shapes[winner.0];
    let (p2, a2, _) = shapes[winner.1];
    let proper = Covariance2::proper(1.0)?;
    Ok(WidebandGridSearch {
        argmax: [p1, a1, p2, a2],
        s0_max: winner.2,
        s0_proper: wideband_slope(&proper, &proper, ch)?.s0,
        points_per_axis: n,
        argmax_is_proper: within_one_step_of_proper(p1, a1, (n, n)) && within_one_step_of_proper(p2, a2, (n, n)),
    })
}

/// `L∞ = −1 − ½ log2 sin²(φ12 + Δτ) − ½ log2 sin²(φ21 − Δτ)` for the
/// rank-one pair at `Δτ`, with `S∞ = 1`.
pub fn high_snr_offset(dtau: Angle, ch: &ChannelParams) -> Result<HighSnrReport> {
    let s1 = (ch.phi12.0 + dtau.0).sin();
    let s2 = (ch.phi21.0 - dtau.0).sin();
    if s1.abs() <= SIN_FLOOR {
        return Err(Error::InfiniteOffset { user: 1 });
    }
    if s2.abs() <= SIN_FLOOR {
        return Err(Error::InfiniteOffset { user: 2 });
    }
    Ok(HighSnrReport { s_inf: 1.0, l_inf: -1.0 - (s1 * s1).log2() * 0.5 - (s2 * s2).log2() * 0.5, dtau_opt: dtau })
}

/// Smallest `L∞` over `Δτ`: `Δτ = −Δφ/2` when `cos φ̄ < 0`, else
/// `π/2 − Δφ/2`, giving `−1 − log2 sin²(φ̄/2)` or `−1 − log2 cos²(φ̄/2)`.
///
/// The offset is subtracted from `log2 γ`, so the smallest value is the best
/// one. Both values lie in `[−1, 0]`.
pub fn optimal_high_snr_offset(ch: &ChannelParams) -> HighSnrReport {
    let half_diff = 0.5 * ch.phase_diff();
    let half_sum = 0.5 * ch.phase_sum();
    let (dtau, l_inf) = if ch.phase_sum().cos() < 0.0 {
        (-half_diff, -1.0 - half_sum.sin().powi(2).log2())
    } else {
        (FRAC_PI_2 - half_diff, -1.0 - half_sum.cos().powi(2).log2())
    };
    HighSnrReport { s_inf: 1.0, l_inf, dtau_opt: Angle(dtau).normalized_half_turn() }
}
