//! Achievable rate regions and the operating points picked from them.
//!
//! The full-rank region is sampled by brute force on a `(p1, u1, p2, u2)`
//! grid (full power, `α = u√(p(1−p))`). Rank-one and ZF regions are 1-D
//! sweeps over `Δτ`. Time sharing is modeled by the upper-right convex hull.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Covariance2, PowerConfig, User};
use crate::error::{Error, Result};
use crate::game::grid_axis;
use crate::math::Angle;
use crate::rank_one::zf_rates;
use crate::rates::{ne_rate_point, rank_one_rates, rate_pair, single_user_points, RatePoint};

/// Default dominance tolerance in bits.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyTag {
    FullRank {
        p1: f64,
        alpha1: f64,
        p2: f64,
        alpha2: f64,
    },
    RankOne {
        dtau: Angle,
    },
    Zf {
        dtau: Angle,
    },
    /// A point on the segment between two hull vertices; `weight` is the
    /// time fraction spent at the vertex with the smaller `r1`.
    TimeShare {
        weight: f64,
    },
    Ne,
    SingleUser {
        user: u8,
    },
}

impl StrategyTag {
    /// Recomputes the rate point this tag stands for. `None` for time sharing.
    pub fn reproduce(&self, ch: &ChannelParams, pw: &PowerConfig) -> Option<RatePoint> {
        match *self {
            StrategyTag::FullRank { p1, alpha1, p2, alpha2 } => {
                let q1 = Covariance2::from_params(p1, alpha1, pw.p_total).ok()?;
                let q2 = Covariance2::from_params(p2, alpha2, pw.p_total).ok()?;
                Some(rate_pair(&q1, &q2, ch, pw))
            }
            StrategyTag::RankOne { dtau } => Some(rank_one_rates(dtau, ch, pw)),
            StrategyTag::Zf { dtau } => Some(zf_rates(dtau, ch, pw)),
            StrategyTag::TimeShare { .. } => None,
            StrategyTag::Ne => Some(ne_rate_point(ch, pw)),
            StrategyTag::SingleUser { user } => {
                let (a, b) = single_user_points(pw);
                Some(if user == 1 { a } else { b })
            }
        }
    }

    /// Up to four numeric parameters, zero-padded, for flat output.
    pub fn params(&self) -> [f64; 4] {
        match *self {
            StrategyTag::FullRank { p1, alpha1, p2, alpha2 } => [p1, alpha1, p2, alpha2],
            StrategyTag::RankOne { dtau } | StrategyTag::Zf { dtau } => [dtau.0, 0.0, 0.0, 0.0],
            StrategyTag::TimeShare { weight } => [weight, 0.0, 0.0, 0.0],
            StrategyTag::Ne => [0.0; 4],
            StrategyTag::SingleUser { user } => [f64::from(user), 0.0, 0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaggedPoint {
    pub rate: RatePoint,
    pub tag: StrategyTag,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RegionSample {
    pub points: Vec<TaggedPoint>,
}

impl RegionSample {
    pub fn rates(&self) -> Vec<RatePoint> {
        self.points.iter().map(|t| t.rate).collect()
    }

    pub fn max_sum(&self) -> Option<&TaggedPoint> {
        self.points.iter().fold(None, |best: Option<&TaggedPoint>, t| match best {
            Some(b) if b.rate.sum() >= t.rate.sum() => Some(b),
            _ => Some(t),
        })
    }

    /// Non-dominated subset, sorted by `r1`.
    pub fn pareto(&self, eps: f64) -> RegionSample {
        let rates = self.rates();
        RegionSample { points: pareto_indices(&rates, eps).into_iter().map(|i| self.points[i].clone()).collect() }
    }

    pub fn extend(&mut self, other: RegionSample) {
        self.points.extend(other.points);
    }
}

fn shapes(np: usize, nu: usize, power: f64) -> Vec<(f64, f64, Covariance2)> {
    let us: Vec<f64> = grid_axis(nu, -1.0, 1.0).collect();
    grid_axis(np, 0.0, 1.0)
        .flat_map(|p| {
            let bound = (p * (1.0 - p)).sqrt();
            us.clone().into_iter().map(move |u| {
                let alpha = u * bound + 0.0;
                (p, alpha, Covariance2::from_params(p, alpha, power).expect("grid shape is feasible"))
            })
        })
        .collect()
}

/// Brute-force sample of the full-power region on a `(p1, u1, p2, u2)` grid.
/// Points come out in lexicographic grid order.
pub fn full_rank_region(
    ch: &ChannelParams,
    pw: &PowerConfig,
    grid: (usize, usize, usize, usize),
) -> Result<RegionSample> {
    let (a, b, c, d) = grid;
    if a.min(b).min(c).min(d) < 8 {
        return Err(Error::InvalidGrid(format!("full-rank grid {a}x{b}x{c}x{d} needs at least 8 per axis")));
    }
    let first = shapes(a, b, pw.p_total);
    let second = shapes(c, d, pw.p_total);
    let points = first
        .par_iter()
        .flat_map_iter(|(p1, a1, q1)| {
            second.iter().map(move |(p2, a2, q2)| TaggedPoint {
                rate: rate_pair(q1, q2, ch, pw),
                tag: StrategyTag::FullRank { p1: *p1, alpha1: *a1, p2: *p2, alpha2: *a2 },
            })
        })
        .collect();
    Ok(RegionSample { points })
}

fn dtau_grid(n: usize, extra: &[Angle]) -> Vec<Angle> {
    let mut all: Vec<Angle> =
        (0..n).map(|k| Angle(PI * k as f64 / n as f64)).chain(extra.iter().map(|a| a.normalized_half_turn())).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    all.dedup();
    all
}

/// `n` uniform samples of `Δτ ∈ [0, π)` plus any `extra` angles, in
/// ascending `Δτ`.
pub fn rank_one_region_with(ch: &ChannelParams, pw: &PowerConfig, n: usize, extra: &[Angle]) -> Result<RegionSample> {
    if n < 8 {
        return Err(Error::InvalidGrid(format!("need at least 8 Δτ samples, got {n}")));
    }
    Ok(RegionSample {
        points: dtau_grid(n, extra)
            .into_iter()
            .map(|dtau| TaggedPoint { rate: rank_one_rates(dtau, ch, pw), tag: StrategyTag::RankOne { dtau } })
            .collect(),
    })
}

pub fn rank_one_region(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> Result<RegionSample> {
    rank_one_region_with(ch, pw, n, &[])
}

pub fn zf_region(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> Result<RegionSample> {
    if n < 8 {
        return Err(Error::InvalidGrid(format!("need at least 8 Δτ samples, got {n}")));
    }
    Ok(RegionSample {
        points: dtau_grid(n, &[])
            .into_iter()
            .map(|dtau| TaggedPoint { rate: zf_rates(dtau, ch, pw), tag: StrategyTag::Zf { dtau } })
            .collect(),
    })
}

/// NE and the two single-user corners.
pub fn proper_anchor_points(ch: &ChannelParams, pw: &PowerConfig) -> RegionSample {
    let (su1, su2) = single_user_points(pw);
    RegionSample {
        points: vec![
            TaggedPoint { rate: ne_rate_point(ch, pw), tag: StrategyTag::Ne },
            TaggedPoint { rate: su1, tag: StrategyTag::SingleUser { user: User::One.index() } },
            TaggedPoint { rate: su2, tag: StrategyTag::SingleUser { user: User::Two.index() } },
        ],
    }
}

fn by_r1(points: &[RatePoint]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| points[i].r1.total_cmp(&points[j].r1).then(points[i].r2.total_cmp(&points[j].r2)).then(i.cmp(&j))
}

/// Indices of points not dominated by any other, sorted by `(r1, r2)`.
///
/// `q` dominates `p` iff `q ≥ p − eps` in both coordinates and `q > p + eps`
/// in at least one. Two suffix-maximum scans answer both halves of that test
/// in `O(n log n)`.
pub fn pareto_indices(points: &[RatePoint], eps: f64) -> Vec<usize> {
    let n = points.len();
    let dominated_along = |key: fn(&RatePoint) -> f64, other: fn(&RatePoint) -> f64| -> Vec<bool> {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| key(&points[i]).total_cmp(&key(&points[j])));
        let sorted: Vec<f64> = order.iter().map(|&i| key(&points[i])).collect();
        let mut suffix = vec![f64::NEG_INFINITY; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1].max(other(&points[order[k]]));
        }
        points
            .iter()
            .map(|p| {
                let start = sorted.partition_point(|&v| v <= key(p) + eps);
                suffix[start] >= other(p) - eps
            })
            .collect()
    };
    let a = dominated_along(|p| p.r1, |p| p.r2);
    let b = dominated_along(|p| p.r2, |p| p.r1);
    let mut keep: Vec<usize> = (0..n).filter(|&i| !a[i] && !b[i]).collect();
    keep.sort_by(by_r1(points));
    keep
}

pub fn pareto_filter(points: &[RatePoint], eps: f64) -> Vec<RatePoint> {
    pareto_indices(points, eps).into_iter().map(|i| points[i]).collect()
}

fn cross(o: &RatePoint, a: &RatePoint, b: &RatePoint) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// Vertices of the upper-right convex hull of `points` together with the
/// axis anchors `(0, max r2)` and `(max r1, 0)`, sorted by `r1`. Collinear
/// points are dropped.
pub fn time_share_hull(points: &[RatePoint]) -> Vec<RatePoint> {
    if points.is_empty() {
        return Vec::new();
    }
    let max1 = points.iter().map(|p| p.r1).fold(f64::NEG_INFINITY, f64::max);
    let max2 = points.iter().map(|p| p.r2).fold(f64::NEG_INFINITY, f64::max);
    let mut all: Vec<RatePoint> = points.to_vec();
    all.push(RatePoint { r1: 0.0, r2: max2 });
    all.push(RatePoint { r1: max1, r2: 0.0 });
    all.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(b.r2.total_cmp(&a.r2)));
    all.dedup();
    let mut hull: Vec<RatePoint> = Vec::with_capacity(all.len());
    for p in all {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Height of the piecewise-linear hull at `r1`; `None` past its right end.
pub fn hull_height(hull: &[RatePoint], r1: f64) -> Option<f64> {
    let last = hull.last()?;
    if r1 > last.r1 {
        return None;
    }
    if r1 <= hull[0].r1 {
        return Some(hull[0].r2);
    }
    let k = hull.partition_point(|p| p.r1 < r1);
    let (a, b) = (hull[k - 1], hull[k]);
    if b.r1 == a.r1 {
        return Some(a.r2.max(b.r2));
    }
    let t = (r1 - a.r1) / (b.r1 - a.r1);
    Some(a.r2 + t * (b.r2 - a.r2))
}

/// Whether `p` lies inside the region under `hull`, allowing `slack` bits in
/// each coordinate.
pub fn hull_contains(hull: &[RatePoint], p: &RatePoint, slack: f64) -> bool {
    let Some(last) = hull.last() else { return false };
    if p.r1 > last.r1 + slack {
        return false;
    }
    let x = (p.r1 - slack).clamp(hull[0].r1, last.r1);
    hull_height(hull, x).is_some_and(|h| p.r2 <= h + slack)
}

/// A fairness point with the index of the nearest generating boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPick {
    pub rate: RatePoint,
    pub nearest: usize,
}

fn interpolate(a: &RatePoint, b: &RatePoint, t: f64) -> RatePoint {
    RatePoint { r1: a.r1 + t * (b.r1 - a.r1), r2: a.r2 + t * (b.r2 - a.r2) }
}

fn nearer(k: usize, t: f64) -> usize {
    if t <= 0.5 {
        k
    } else {
        k + 1
    }
}

/// Point of the interpolated boundary (sorted by `r1`, Pareto-filtered) with
/// `r1 = r2`. Without a diagonal crossing, the boundary point with the
/// largest `min(r1, r2)`.
pub fn max_min_pick(boundary: &[RatePoint]) -> Option<BoundaryPick> {
    let f = |p: &RatePoint| p.r1 - p.r2;
    if let Some(k) = boundary.iter().position(|p| f(p) == 0.0) {
        return Some(BoundaryPick { rate: boundary[k], nearest: k });
    }
    for (k, w) in boundary.windows(2).enumerate() {
        let (fa, fb) = (f(&w[0]), f(&w[1]));
        if fa.signum() != fb.signum() {
            let t = fa / (fa - fb);
            let mut rate = interpolate(&w[0], &w[1], t);
            let common = 0.5 * (rate.r1 + rate.r2);
            rate = RatePoint { r1: common, r2: common };
            return Some(BoundaryPick { rate, nearest: nearer(k, t) });
        }
    }
    boundary
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (k, p)| match best {
            Some((_, v)) if v >= p.min() => best,
            _ => Some((k, p.min())),
        })
        .map(|(k, _)| BoundaryPick { rate: boundary[k], nearest: k })
}

pub fn max_min_point(boundary: &[RatePoint]) -> Option<RatePoint> {
    max_min_pick(boundary).map(|p| p.rate)
}

/// Threat point of the proportional-fairness product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PfVariant {
    /// `(r1 − R1_NE)(r2 − R2_NE)`.
    #[default]
    Threat,
    /// `r1 · r2`.
    Plain,
}

fn pf_better(a: (f64, RatePoint), b: (f64, RatePoint)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.sum().total_cmp(&b.1.sum())).then(a.1.r1.total_cmp(&b.1.r1)).is_gt()
}

/// Maximizer of `(r1 − ne.r1)(r2 − ne.r2)` over boundary points and the
/// segments between them. Candidates with a negative factor are excluded.
pub fn proportional_fair_pick(boundary: &[RatePoint], ne: &RatePoint) -> Result<BoundaryPick> {
    const TOL: f64 = 1e-12;
    if boundary.iter().all(|p| p.r1 <= ne.r1 + TOL && p.r2 <= ne.r2 + TOL) {
        return Err(Error::NoImprovingPoint);
    }
    let score = |p: &RatePoint| {
        let (x, y) = (p.r1 - ne.r1, p.r2 - ne.r2);
        if x < 0.0 || y < 0.0 {
            f64::NEG_INFINITY
        } else {
            x * y
        }
    };
    let mut best: Option<(f64, RatePoint, usize)> = None;
    let mut offer = |rate: RatePoint, nearest: usize| {
        let s = score(&rate);
        if s == f64::NEG_INFINITY {
            return;
        }
        match best {
            Some((bs, br, _)) if !pf_better((s, rate), (bs, br)) => {}
            _ => best = Some((s, rate, nearest)),
        }
    };
    for (k, p) in boundary.iter().enumerate() {
        offer(*p, k);
    }
    for (k, w) in boundary.windows(2).enumerate() {
        let (x0, y0) = (w[0].r1 - ne.r1, w[0].r2 - ne.r2);
        let (d1, d2) = (w[1].r1 - w[0].r1, w[1].r2 - w[0].r2);
        let curv = d1 * d2;
        if curv < 0.0 {
            let t = -(x0 * d2 + y0 * d1) / (2.0 * curv);
            if t > 0.0 && t < 1.0 {
                offer(interpolate(&w[0], &w[1], t), nearer(k, t));
            }
        }
    }
    best.map(|(_, rate, nearest)| BoundaryPick { rate, nearest }).ok_or(Error::NoImprovingPoint)
}

pub fn proportional_fair_point(boundary: &[RatePoint], ne: &RatePoint, variant: PfVariant) -> Result<RatePoint> {
    let threat = match variant {
        PfVariant::Threat => *ne,
        PfVariant::Plain => RatePoint { r1: 0.0, r2: 0.0 },
    };
    proportional_fair_pick(boundary, &threat).map(|p| p.rate)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FairnessReport {
    pub max_min: RatePoint,
    pub prop_fair: RatePoint,
    pub ne: RatePoint,
    pub max_sum: RatePoint,
    /// `√((r1 − t1)(r2 − t2))` at `prop_fair` for the threat point `t` in
    /// use: the proportional-fairness value in bits.
    pub pf_gain: f64,
}

/// Fairness points of the time-sharing hull of `points`.
pub fn fairness_report(points: &[RatePoint], ne: RatePoint, variant: PfVariant) -> Result<FairnessReport> {
    let hull = time_share_hull(points);
    let max_min = max_min_point(&hull).ok_or(Error::NoImprovingPoint)?;
    let threat = match variant {
        PfVariant::Threat => ne,
        PfVariant::Plain => RatePoint { r1: 0.0, r2: 0.0 },
    };
    let prop_fair = proportional_fair_pick(&hull, &threat)?.rate;
    let pf_gain = ((prop_fair.r1 - threat.r1) * (prop_fair.r2 - threat.r2)).max(0.0).sqrt();
    let max_sum =
        hull.iter().copied().fold(RatePoint { r1: 0.0, r2: 0.0 }, |b, p| if p.sum() > b.sum() { p } else { b });
    Ok(FairnessReport { max_min, prop_fair, ne, max_sum, pf_gain })
}

/// Grid sizes for [`compare_fairness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionGrids {
    pub full_rank: usize,
    pub dtau_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FairnessComparison {
    pub improper: FairnessReport,
    pub proper: FairnessReport,
}

/// Improper region (full-rank grid, rank-one sweep, NE and single-user
/// corners, all with time sharing) against the proper time-share hull of
/// NE and the single-user corners.
pub fn improper_region(ch: &ChannelParams, pw: &PowerConfig, grids: RegionGrids) -> Result<RegionSample> {
    let n = grids.full_rank;
    let mut region = full_rank_region(ch, pw, (n, n, n, n))?.pareto(DEFAULT_EPS);
    region.extend(rank_one_region(ch, pw, grids.dtau_points)?);
    region.extend(proper_anchor_points(ch, pw));
    Ok(region.pareto(DEFAULT_EPS))
}

pub fn compare_fairness(
    ch: &ChannelParams,
    pw: &PowerConfig,
    grids: RegionGrids,
    variant: PfVariant,
) -> Result<FairnessComparison> {
    let ne = ne_rate_point(ch, pw);
    let improper = fairness_report(&improper_region(ch, pw, grids)?.rates(), ne, variant)?;
    let proper = fairness_report(&proper_anchor_points(ch, pw).rates(), ne, variant)?;
    Ok(FairnessComparison { improper, proper })
}
