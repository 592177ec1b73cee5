//! The non-cooperative rate game: each user picks its own covariance to
//! maximize its own rate, treating the other's signal as noise.
//!
//! Best responses are found by exhaustive search over a `(p, u)` grid with
//! `α = u·√(p(1−p))`, which keeps every sample inside the PSD set.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelParams, Covariance2, PowerConfig, User};
use crate::error::{Error, Result};
use crate::rates::user_rate;

pub const MIN_GRID: usize = 16;
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestResponseResult {
    pub p: f64,
    pub alpha: f64,
    #[serde(skip)]
    pub argmax_cov: Covariance2,
    pub achieved_rate: f64,
    pub grid_resolution: (usize, usize),
}

impl BestResponseResult {
    /// One grid step in `p` and in `α` at the returned `p`.
    pub fn steps(&self) -> (f64, f64) {
        let (np, nu) = self.grid_resolution;
        let dp = 1.0 / (np - 1) as f64;
        let du = 2.0 / (nu - 1) as f64;
        (dp, du * (self.p * (1.0 - self.p)).sqrt())
    }

    /// Within one grid step of `(P/2)·I`.
    pub fn is_near_proper(&self) -> bool {
        within_one_step_of_proper(self.p, self.alpha, self.grid_resolution)
    }
}

/// `(p, α)` lies within one step of `(½, 0)` on an `np × nu` grid in `(p, u)`.
pub fn within_one_step_of_proper(p: f64, alpha: f64, (np, nu): (usize, usize)) -> bool {
    let dp = 1.0 / (np - 1) as f64;
    let du = 2.0 / (nu - 1) as f64;
    (p - 0.5).abs() <= dp * (1.0 + 1e-9) && alpha.abs() <= 0.5 * du * (1.0 + 1e-9) + 1e-15
}

pub(crate) fn grid_axis(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
}

fn check_grid(grid: (usize, usize)) -> Result<()> {
    if grid.0 < MIN_GRID || grid.1 < MIN_GRID {
        return Err(Error::InvalidGrid(format!(
            "best-response grid {}x{} is below the {MIN_GRID}x{MIN_GRID} minimum",
            grid.0, grid.1
        )));
    }
    Ok(())
}

/// Most-proper first: `(|α|, |p − ½|, p, α)`.
fn properness_order(a: &(f64, f64), b: &(f64, f64)) -> Ordering {
    let key = |x: &(f64, f64)| [x.1.abs(), (x.0 - 0.5).abs(), x.0, x.1];
    key(a).iter().zip(key(b).iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Best full-power response of `player` to a fixed `opponent` covariance.
///
/// Grid values within 1e−12 of the maximum count as ties and go to the most
/// proper candidate.
pub fn best_response(
    player: User,
    opponent: &Covariance2,
    ch: &ChannelParams,
    pw: &PowerConfig,
    grid: (usize, usize),
) -> Result<BestResponseResult> {
    check_grid(grid)?;
    let power = pw.p_total;
    let ps: Vec<f64> = grid_axis(grid.0, 0.0, 1.0).collect();
    let us: Vec<f64> = grid_axis(grid.1, -1.0, 1.0).collect();
    let evaluated: Vec<(f64, f64, f64)> = ps
        .par_iter()
        .flat_map_iter(|&p| {
            let bound = (p * (1.0 - p)).sqrt();
            us.iter().map(move |&u| {
                let alpha = u * bound + 0.0;
                let own = Covariance2::from_params(p, alpha, power).expect("grid point is feasible");
                (p, alpha, user_rate(player, &own, opponent, ch, pw))
            })
        })
        .collect();
    let best = evaluated.iter().map(|e| e.2).fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(1.0);
    let mut ties: Vec<(f64, f64)> = evaluated.iter().filter(|e| e.2 >= best - tol).map(|e| (e.0, e.1)).collect();
    ties.sort_by(properness_order);
    let (p, alpha) = ties[0];
    let argmax_cov = Covariance2::from_params(p, alpha, power)?;
    Ok(BestResponseResult {
        p,
        alpha,
        argmax_cov,
        achieved_rate: user_rate(player, &argmax_cov, opponent, ch, pw),
        grid_resolution: grid,
    })
}

/// True iff both users' best responses to `(P/2)·I` are proper up to one
/// grid step, i.e. proper signaling by both users is an equilibrium.
pub fn verify_nash(ch: &ChannelParams, pw: &PowerConfig, grid: (usize, usize)) -> Result<bool> {
    check_grid(grid)?;
    let proper = Covariance2::proper(pw.p_total)?;
    for player in [User::One, User::Two] {
        if !best_response(player, &proper, ch, pw, grid)?.is_near_proper() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::channel::random_channel;
    use crate::math::{eig_sym2, rotation_matrix, Angle, Mat2};
    use crate::rates::{ne_rate_point, rate_pair};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ch(g12: f64, g21: f64, p12: f64, p21: f64) -> ChannelParams {
        ChannelParams::new(g12, g21, p12, p21).unwrap()
    }

    fn snr(gamma: f64) -> PowerConfig {
        PowerConfig::from_snr(gamma).unwrap()
    }

    /// Water-filling over the eigenbasis of the interference-plus-noise
    /// covariance: the exact continuous best response.
    fn water_filling_rate(player: User, opponent: &Covariance2, c: &ChannelParams, pw: &PowerConfig) -> f64 {
        let j = rotation_matrix(c.cross_phase(player));
        let k =
            Mat2::diag(pw.half_noise(), pw.half_noise()) + j.congruence(opponent.matrix()).scale(c.cross_gain(player));
        let (k_hi, k_lo) = eig_sym2(&k).unwrap();
        let p = pw.p_total;
        let (a, b) = if p <= k_hi - k_lo {
            (k_lo + p, k_hi)
        } else {
            let level = 0.5 * (k_hi + k_lo + p);
            (level, level)
        };
        0.5 * ((a * b) / (k_hi * k_lo)).log2()
    }

    #[test]
    fn grid_below_minimum_is_rejected() {
        let c = ch(1.0, 1.0, 0.0, 0.0);
        let q = Covariance2::proper(1.0).unwrap();
        assert!(matches!(best_response(User::One, &q, &c, &snr(1.0), (15, 201)), Err(Error::InvalidGrid(_))));
        assert!(matches!(verify_nash(&c, &snr(1.0), (201, 8)), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn best_response_to_proper_is_proper() {
        let c = ch(1.0, 1.0, 0.0, 0.0);
        let pw = snr(1.0);
        let q = Covariance2::proper(pw.p_total).unwrap();
        let br = best_response(User::One, &q, &c, &pw, (201, 201)).unwrap();
        assert_eq!((br.p, br.alpha), (0.5, 0.0));
        assert!((br.achieved_rate - ne_rate_point(&c, &pw).r1).abs() < 1e-12);
    }

    #[test]
    fn no_interference_means_proper_for_any_opponent() {
        let c = ch(0.0, 0.0, 0.4, 1.1);
        let pw = snr(7.0);
        for opp in [
            Covariance2::rank_one(Angle(0.3), pw.p_total).unwrap(),
            Covariance2::from_params(0.9, 0.2, pw.p_total).unwrap(),
        ] {
            let br = best_response(User::Two, &opp, &c, &pw, (33, 33)).unwrap();
            assert_eq!((br.p, br.alpha), (0.5, 0.0));
        }
    }

    #[test]
    fn strong_rank_one_interference_matches_water_filling() {
        let c = ch(10.0, 1.0, 0.0, 0.0);
        let pw = snr(10.0);
        let opp = Covariance2::rank_one(Angle(0.0), pw.p_total).unwrap();
        let br = best_response(User::One, &opp, &c, &pw, (201, 201)).unwrap();
        let oracle = water_filling_rate(User::One, &opp, &c, &pw);
        assert!(br.achieved_rate <= oracle + 1e-12);
        assert!(oracle - br.achieved_rate < 1e-3, "{} vs {oracle}", br.achieved_rate);
        // All the power goes to the imaginary axis, away from the jammed real axis.
        assert!(br.p < 1e-9 && br.alpha == 0.0);
    }

    #[test]
    fn rotated_interference_is_avoided() {
        let c = ch(3.0, 1.0, 0.8, -0.2);
        let pw = snr(5.0);
        let opp = Covariance2::rank_one(Angle(1.2), pw.p_total).unwrap();
        let br = best_response(User::One, &opp, &c, &pw, (101, 101)).unwrap();
        let oracle = water_filling_rate(User::One, &opp, &c, &pw);
        assert!(br.achieved_rate <= oracle + 1e-12 && oracle - br.achieved_rate < 5e-3);
        assert!(!br.is_near_proper());
    }

    #[test]
    fn achieved_rate_matches_rate_pair() {
        let c = ch(0.5, 2.0, 0.3, -0.7);
        let pw = snr(10.0);
        let opp = Covariance2::from_params(0.25, -0.1, pw.p_total).unwrap();
        let br = best_response(User::Two, &opp, &c, &pw, (41, 41)).unwrap();
        let pair = rate_pair(&opp, &br.argmax_cov, &c, &pw);
        assert!((pair.r2 - br.achieved_rate).abs() <= 1e-12);
    }

    #[test]
    fn verify_nash_examples() {
        assert!(verify_nash(&ch(1.0, 1.0, 0.0, 0.0), &snr(1.0), (201, 201)).unwrap());
        assert!(verify_nash(&ch(2.0, 0.5, 0.7, -2.1), &snr(100.0), (201, 201)).unwrap());
        assert!(verify_nash(&ch(0.0, 0.0, 0.0, 0.0), &snr(1e3), (33, 33)).unwrap());
    }

    #[test]
    fn refinement_never_lowers_the_best_response() {
        let c = ch(4.0, 0.3, 2.0, 0.5);
        let pw = snr(20.0);
        let opp = Covariance2::rank_one(Angle(0.7), pw.p_total).unwrap();
        let mut last = f64::NEG_INFINITY;
        for n in [17, 33, 65, 129] {
            let br = best_response(User::One, &opp, &c, &pw, (n, n)).unwrap();
            assert!(br.achieved_rate >= last - 1e-12);
            last = br.achieved_rate;
        }
    }

    #[test]
    fn unilateral_deviation_from_proper_never_pays() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let c = random_channel(&mut rng);
            let pw = snr(10f64.powf(rng.gen_range(-2.0..3.0)));
            let proper = Covariance2::proper(pw.p_total).unwrap();
            let p = rng.gen_range(0.0..=1.0);
            let u: f64 = rng.gen_range(-1.0..=1.0);
            let scale = rng.gen_range(0.0..=1.0f64).max(1e-3);
            let dev = Covariance2::from_matrix(
                Mat2::symmetric(p, u * (p * (1.0 - p)).sqrt(), 1.0 - p).scale(scale * pw.p_total),
                pw.p_total,
            )
            .unwrap();
            let user = if rng.gen_bool(0.5) { User::One } else { User::Two };
            let base = user_rate(user, &proper, &proper, &c, &pw);
            assert!(user_rate(user, &dev, &proper, &c, &pw) <= base + 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn best_response_never_beats_water_filling(
            g in 0.0f64..10.0, phi in -PI..PI, tau in 0.0..PI, gamma in 0.1f64..100.0,
        ) {
            let c = ch(g, 1.0, phi, 0.0);
            let pw = snr(gamma);
            let opp = Covariance2::rank_one(Angle(tau), pw.p_total).unwrap();
            let br = best_response(User::One, &opp, &c, &pw, (17, 17)).unwrap();
            prop_assert!(br.achieved_rate <= water_filling_rate(User::One, &opp, &c, &pw) + 1e-12);
        }
    }
}
