//! Achievable rates in bits/s/Hz: log-det rates for arbitrary covariances and
//! the closed-form MMSE rates of rank-one strategies.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Covariance2, PowerConfig, User};
use crate::math::{det2, rotation_matrix, Angle, Mat2};

/// A rate pair `(R1, R2)` in bits/s/Hz.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    /// Round-off negatives down to −1e−12 are clamped to zero.
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1: clamp_rate(r1), r2: clamp_rate(r2) }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }

    pub fn min(&self) -> f64 {
        self.r1.min(self.r2)
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::One => self.r1,
            User::Two => self.r2,
        }
    }

    pub fn swapped(&self) -> Self {
        Self { r1: self.r2, r2: self.r1 }
    }

    /// Componentwise `self ≥ other − tol`.
    pub fn covers(&self, other: &RatePoint, tol: f64) -> bool {
        self.r1 >= other.r1 - tol && self.r2 >= other.r2 - tol
    }
}

fn clamp_rate(r: f64) -> f64 {
    if (-1e-12..0.0).contains(&r) {
        0.0
    } else {
        r
    }
}

fn bits(x_ln: f64) -> f64 {
    x_ln / LN_2
}

/// Rate of `user` when it transmits `own` and the other user transmits `other`.
pub fn user_rate(user: User, own: &Covariance2, other: &Covariance2, ch: &ChannelParams, pw: &PowerConfig) -> f64 {
    let g = ch.cross_gain(user);
    let j = rotation_matrix(ch.cross_phase(user));
    let floor = Mat2::diag(pw.half_noise(), pw.half_noise());
    let interference = floor + j.congruence(other.matrix()).scale(g);
    let total = interference + *own.matrix();
    clamp_rate(0.5 * bits((det2(&total) / det2(&interference)).ln()))
}

/// Log-det achievable rates of both users with Gaussian inputs and
/// interference treated as noise.
pub fn rate_pair(q1: &Covariance2, q2: &Covariance2, ch: &ChannelParams, pw: &PowerConfig) -> RatePoint {
    RatePoint::new(user_rate(User::One, q1, q2, ch, pw), user_rate(User::Two, q2, q1, ch, pw))
}

/// Rates at the proper Nash equilibrium, `R_i = log2(1 + γ/(1 + g_ik γ))`.
pub fn ne_rate_point(ch: &ChannelParams, pw: &PowerConfig) -> RatePoint {
    let snr = pw.snr();
    let rate = |g: f64| bits((snr / (1.0 + g * snr)).ln_1p());
    RatePoint::new(rate(ch.g12), rate(ch.g21))
}

/// `(log2(1+γ), 0)` and `(0, log2(1+γ))`.
pub fn single_user_points(pw: &PowerConfig) -> (RatePoint, RatePoint) {
    let r = bits(pw.snr().ln_1p());
    (RatePoint::new(r, 0.0), RatePoint::new(0.0, r))
}

/// SINRs of rank-one strategies with MMSE receivers as functions of
/// `Δτ = τ2 − τ1`:
///
/// `SINR_i = 2γ − 4 g_ik γ² cos²(φ_ik ± Δτ) / (1 + 2 g_ik γ)`
///
/// evaluated in the equivalent cancellation-free form
/// `2γ sin²(·) + 2γ cos²(·) / (1 + 2 g_ik γ)`, which is non-negative by
/// construction and stays accurate at very large γ.
pub fn rank_one_sinrs(dtau: Angle, ch: &ChannelParams, pw: &PowerConfig) -> (f64, f64) {
    let snr = pw.snr();
    let sinr = |g: f64, x: f64| {
        let (s, c) = x.sin_cos();
        2.0 * snr * s * s + 2.0 * snr * c * c / (1.0 + 2.0 * g * snr)
    };
    (sinr(ch.g12, ch.phi12.0 + dtau.0), sinr(ch.g21, ch.phi21.0 - dtau.0))
}

/// `½ log2(1 + SINR)`.
pub fn rate_from_sinr(sinr: f64) -> f64 {
    debug_assert!(sinr >= -1e-9, "negative SINR {sinr}");
    0.5 * bits(sinr.max(0.0).ln_1p())
}

pub fn rank_one_rates(dtau: Angle, ch: &ChannelParams, pw: &PowerConfig) -> RatePoint {
    let (s1, s2) = rank_one_sinrs(dtau, ch, pw);
    RatePoint::new(rate_from_sinr(s1), rate_from_sinr(s2))
}
