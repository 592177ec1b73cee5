//! Standard-form channel parameters and transmit covariances.
//!
//! In standard form both direct gains are 1 and only the cross links carry
//! parameters: `h_ik = √g_ik · e^{jφ_ik}`. A complex transmit symbol is
//! handled through its real composite `[Re x, Im x]`, whose covariance is a
//! real 2×2 PSD matrix `P·[[p, α], [α, 1−p]]`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{eig_sym2, is_symmetric, Angle, Mat2, SYM_TOL};

/// One of the two transmitter/receiver pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }
}

/// Cross-link gains and phases of a standard-form two-user interference channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub g12: f64,
    pub g21: f64,
    pub phi12: Angle,
    pub phi21: Angle,
}

impl ChannelParams {
    pub fn new(g12: f64, g21: f64, phi12: f64, phi21: f64) -> Result<Self> {
        for (name, g) in [("g12", g12), ("g21", g21)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {g} must be finite and >= 0")));
            }
        }
        for (name, phi) in [("phi12", phi12), ("phi21", phi21)] {
            if !phi.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {phi} must be finite")));
            }
        }
        Ok(Self { g12, g21, phi12: Angle(phi12), phi21: Angle(phi21) })
    }

    pub fn interference_free() -> Self {
        Self { g12: 0.0, g21: 0.0, phi12: Angle::ZERO, phi21: Angle::ZERO }
    }

    /// Power gain of the link interfering at `user`'s receiver.
    pub fn cross_gain(&self, user: User) -> f64 {
        match user {
            User::One => self.g12,
            User::Two => self.g21,
        }
    }

    /// Phase of the link interfering at `user`'s receiver.
    pub fn cross_phase(&self, user: User) -> Angle {
        match user {
            User::One => self.phi12,
            User::Two => self.phi21,
        }
    }

    /// φ̄ = φ12 + φ21.
    pub fn phase_sum(&self) -> f64 {
        self.phi12.0 + self.phi21.0
    }

    /// Δφ = φ12 − φ21.
    pub fn phase_diff(&self) -> f64 {
        self.phi12.0 - self.phi21.0
    }

    /// The same channel with the user labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { g12: self.g21, g21: self.g12, phi12: self.phi21, phi21: self.phi12 }
    }
}

/// Common transmit power `P` and receiver noise power `N` (both linear).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerConfig {
    pub p_total: f64,
    pub noise: f64,
}

impl PowerConfig {
    pub fn new(p_total: f64, noise: f64) -> Result<Self> {
        if !(p_total.is_finite() && p_total >= 0.0) {
            return Err(Error::InvalidParams(format!("power {p_total} must be finite and >= 0")));
        }
        if !(noise.is_finite() && noise > 0.0) {
            return Err(Error::InvalidParams(format!("noise {noise} must be finite and > 0")));
        }
        Ok(Self { p_total, noise })
    }

    /// `N = 1`, `P = γ`.
    pub fn from_snr(snr: f64) -> Result<Self> {
        Self::new(snr, 1.0)
    }

    /// `N = 1`, `P = 10^(snr_db/10)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidParams(format!("snr_db = {snr_db} must be finite")));
        }
        Self::from_snr(10f64.powf(snr_db / 10.0))
    }

    /// γ = P/N.
    pub fn snr(&self) -> f64 {
        self.p_total / self.noise
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr().log10()
    }

    /// Noise power per real dimension.
    pub fn half_noise(&self) -> f64 {
        0.5 * self.noise
    }
}

/// Transmit covariance of the real composite `[Re x, Im x]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance2 {
    mat: Mat2,
    power: f64,
}

impl Covariance2 {
    /// `P·[[p, α], [α, 1−p]]` with `|α| ≤ √(p(1−p))`.
    pub fn from_params(p: f64, alpha: f64, power: f64) -> Result<Self> {
        check_power(power)?;
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParams(format!("p = {p} must lie in [0, 1]")));
        }
        let bound = (p * (1.0 - p)).sqrt();
        if !(alpha.is_finite() && alpha.abs() <= bound + 1e-12) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} violates |alpha| <= sqrt(p(1-p)) = {bound}")));
        }
        Ok(Self { mat: Mat2::symmetric(p, alpha, 1.0 - p).scale(power), power })
    }

    /// `P·q qᵀ` with `q = [cos τ, sin τ]ᵀ`.
    pub fn rank_one(tau: Angle, power: f64) -> Result<Self> {
        check_power(power)?;
        let (s, c) = tau.0.sin_cos();
        Ok(Self { mat: Mat2::symmetric(c * c, c * s, s * s).scale(power), power })
    }

    /// `(P/2)·I`.
    pub fn proper(power: f64) -> Result<Self> {
        check_power(power)?;
        Ok(Self { mat: Mat2::diag(0.5 * power, 0.5 * power), power })
    }

    /// Validates an arbitrary matrix against the strategy set (symmetric, PSD, trace ≤ P).
    pub fn from_matrix(mat: Mat2, power: f64) -> Result<Self> {
        check_power(power)?;
        if !mat.is_finite() || !is_symmetric(&mat, SYM_TOL) {
            return Err(Error::InvalidParams(format!("{mat:?} is not a finite symmetric matrix")));
        }
        let (_, lmin) = eig_sym2(&mat)?;
        if lmin < -SYM_TOL * power.max(1.0) {
            return Err(Error::InvalidParams(format!("{mat:?} is not PSD (min eigenvalue {lmin:e})")));
        }
        if mat.trace() > power * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!("trace {} exceeds the power budget {power}", mat.trace())));
        }
        Ok(Self { mat, power })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.mat
    }

    /// Power budget `P` this covariance was built against.
    pub fn power(&self) -> f64 {
        self.power
    }

    /// Fraction of the budget on the real axis.
    pub fn p(&self) -> f64 {
        self.mat.a / self.power
    }

    /// Normalized real/imaginary correlation.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.mat.b + self.mat.c) / self.power
    }

    /// `Q / P`; unit trace for full-power covariances.
    pub fn normalized(&self) -> Covariance2 {
        Covariance2 { mat: self.mat.scale(1.0 / self.power), power: 1.0 }
    }

    /// Proper means scaled identity: `|α| ≤ tol` and `|p − (1−p)| ≤ 2·tol`.
    pub fn is_proper(&self, tol: f64) -> bool {
        let p = self.p();
        self.alpha().abs() <= tol && (p - (1.0 - p)).abs() <= 2.0 * tol
    }
}

fn check_power(power: f64) -> Result<()> {
    if power.is_finite() && power > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("power {power} must be finite and > 0")))
    }
}

/// On-disk scenario: `{"g12", "g21", "phi12", "phi21", "snr_db"}` with `N = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelScenario {
    pub g12: f64,
    pub g21: f64,
    pub phi12: f64,
    pub phi21: f64,
    pub snr_db: f64,
}

impl ChannelScenario {
    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.g12, self.g21, self.phi12, self.phi21)
    }

    pub fn power(&self) -> Result<PowerConfig> {
        PowerConfig::from_snr_db(self.snr_db)
    }
}

/// Gains log-uniform on [0.01, 10], phases uniform on (−π, π].
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelParams {
    let (lo, hi) = (0.01f64.ln(), 10f64.ln());
    let g12 = rng.gen_range(lo..=hi).exp();
    let g21 = rng.gen_range(lo..=hi).exp();
    let phi12 = -rng.gen_range(-PI..PI);
    let phi21 = -rng.gen_range(-PI..PI);
    ChannelParams { g12, g21, phi12: Angle(phi12), phi21: Angle(phi21) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::eig_sym2;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn covariance_examples() {
        let q = Covariance2::from_params(0.5, 0.0, 2.0).unwrap();
        assert_eq!(*q.matrix(), Mat2::IDENTITY);
        let q = Covariance2::from_params(1.0, 0.0, 1.0).unwrap();
        assert_eq!(*q.matrix(), Mat2::diag(1.0, 0.0));
        assert!(matches!(Covariance2::from_params(0.5, 0.6, 1.0), Err(Error::InvalidParams(_))));
        assert!(Covariance2::from_params(1.2, 0.0, 1.0).is_err());
        assert!(Covariance2::from_params(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn rank_one_examples() {
        let q = Covariance2::rank_one(Angle(0.0), 1.0).unwrap();
        assert_eq!(*q.matrix(), Mat2::diag(1.0, 0.0));
        let q = Covariance2::rank_one(Angle(FRAC_PI_4), 2.0).unwrap();
        assert!(q.matrix().max_abs_diff(&Mat2::new(1.0, 1.0, 1.0, 1.0)) < 1e-15);
        let (l1, l2) = eig_sym2(q.matrix()).unwrap();
        assert!((l1 - 2.0).abs() < 1e-14 && l2.abs() < 1e-14);
    }

    #[test]
    fn rank_one_is_the_boundary_of_the_parameter_set() {
        for k in 0..=400 {
            let tau = -PI + k as f64 * (2.0 * PI / 400.0);
            let (s, c) = tau.sin_cos();
            let via_params = Covariance2::from_params(c * c, c * s, 1.7).unwrap();
            let direct = Covariance2::rank_one(Angle(tau), 1.7).unwrap();
            assert!(direct.matrix().max_abs_diff(via_params.matrix()) < 1e-14);
            let flipped = Covariance2::rank_one(Angle(tau + PI), 1.7).unwrap();
            assert!(direct.matrix().max_abs_diff(flipped.matrix()) < 1e-15);
        }
    }

    #[test]
    fn properness() {
        let tol = 1e-3;
        assert!(Covariance2::proper(3.0).unwrap().is_proper(tol));
        for k in 0..64 {
            let q = Covariance2::rank_one(Angle(k as f64 * 0.1), 1.0).unwrap();
            assert!(!q.is_proper(0.24));
        }
        let near = Covariance2::from_params(0.5 + tol / 4.0, tol / 4.0, 1.0).unwrap();
        assert!(near.is_proper(tol));
        let far = Covariance2::from_params(0.5 + 4.0 * tol, 0.0, 1.0).unwrap();
        assert!(!far.is_proper(tol));
    }

    #[test]
    fn eigenvalues_stay_within_budget_on_parameter_grid() {
        let power = 3.0;
        let n = 200;
        for i in 0..n {
            let p = i as f64 / (n - 1) as f64;
            let bound = (p * (1.0 - p)).sqrt();
            for j in 0..n {
                let alpha = -bound + 2.0 * bound * j as f64 / (n - 1) as f64;
                let q = Covariance2::from_params(p, alpha, power).unwrap();
                let (l1, l2) = eig_sym2(q.matrix()).unwrap();
                assert!(l2 >= -1e-12 && l1 <= power * (1.0 + 1e-12), "p={p} alpha={alpha}");
                assert!((q.matrix().trace() - power).abs() <= 1e-12 * power);
            }
        }
    }

    #[test]
    fn from_matrix_validates() {
        assert!(Covariance2::from_matrix(Mat2::symmetric(0.5, 0.2, 0.5), 1.0).is_ok());
        assert!(Covariance2::from_matrix(Mat2::symmetric(0.5, 0.6, 0.5), 1.0).is_err());
        assert!(Covariance2::from_matrix(Mat2::new(0.5, 0.1, 0.0, 0.5), 1.0).is_err());
        assert!(Covariance2::from_matrix(Mat2::diag(0.7, 0.7), 1.0).is_err());
        // Sub-full-power strategies are admissible.
        assert!(Covariance2::from_matrix(Mat2::diag(0.1, 0.2), 1.0).is_ok());
    }

    #[test]
    fn channel_validation_and_phase_combinations() {
        assert!(ChannelParams::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, f64::NAN, 0.0, 0.0).is_err());
        let ch = ChannelParams::new(0.5, 2.0, 0.3, -0.7).unwrap();
        assert!((ch.phase_sum() + 0.4).abs() < 1e-15);
        assert!((ch.phase_diff() - 1.0).abs() < 1e-15);
        assert_eq!(ch.swapped().swapped(), ch);
    }

    #[test]
    fn power_config() {
        let pw = PowerConfig::from_snr_db(10.0).unwrap();
        assert!((pw.snr() - 10.0).abs() < 1e-12);
        assert_eq!(pw.half_noise(), 0.5);
        assert!(PowerConfig::new(1.0, 0.0).is_err());
    }

    #[test]
    fn scenario_json_schema() {
        let raw = r#"{"g12": 0.5, "g21": 1.0, "phi12": 0.3, "phi21": -0.7, "snr_db": 10}"#;
        let sc: ChannelScenario = serde_json::from_str(raw).unwrap();
        assert_eq!(sc.channel().unwrap(), ChannelParams::new(0.5, 1.0, 0.3, -0.7).unwrap());
        assert!((sc.power().unwrap().snr() - 10.0).abs() < 1e-12);
    }
}
