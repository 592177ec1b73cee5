use std::f64::consts::PI;
use std::path::Path;

use improper_ic::asymptotics::{
    max_wideband_slope, optimal_high_snr_offset, proper_maximizes_wideband_slope, wideband_coupling, wideband_slope,
    wideband_slope_grid, ShapePair,
};
use improper_ic::rank_one::{nzf_pareto_points, zf_max_sum_rate};
use improper_ic::rates::{ne_rate_point, rank_one_rates};
use improper_ic::region::{
    compare_fairness, full_rank_region, proper_anchor_points, time_share_hull, zf_region, FairnessComparison,
    PfVariant, RegionGrids,
};
use improper_ic::verify::{self, Fault, Level};
use improper_ic::{Angle, ChannelParams, Covariance2, PowerConfig};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{emit, json_bytes, Csv};
use crate::scenario::Scenario;

pub const REGION_HEADER: [&str; 7] = ["source", "r1", "r2", "param1", "param2", "param3", "param4"];
pub const SWEEP_HEADER: [&str; 7] =
    ["snr_db", "ne_sum", "zf_sum", "rankone_max_sum", "fullrank_max_sum", "zf_asymptote", "l_inf"];

fn rank_one_max_sum(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> f64 {
    (0..n).map(|k| rank_one_rates(Angle(PI * k as f64 / n as f64), ch, pw).sum()).fold(f64::NEG_INFINITY, f64::max)
}

fn full_rank_max_sum(ch: &ChannelParams, pw: &PowerConfig, n: usize) -> Result<f64, CliError> {
    let region = full_rank_region(ch, pw, (n, n, n, n))?;
    Ok(region.max_sum().map_or(0.0, |t| t.rate.sum()))
}

pub fn region(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let (ch, pw, g) = (&s.channel, s.power(), &s.grids);
    let n = g.fullrank_grid;
    let mut csv = Csv::new(&REGION_HEADER);
    let mut tagged = |source: &str, points: &[improper_ic::region::TaggedPoint]| {
        for t in points {
            let [a, b, c, d] = t.tag.params();
            csv.row(Some(source), &[t.rate.r1, t.rate.r2, a, b, c, d]);
        }
    };

    // Only the non-dominated part of the n⁴ grid is written.
    let full = full_rank_region(ch, &pw, (n, n, n, n))?.pareto(g.eps_dominance);
    tagged("fullrank", &full.points);
    tagged("rankone", &improper_ic::region::rank_one_region(ch, &pw, g.dtau_points)?.points);
    tagged("zf", &zf_region(ch, &pw, g.dtau_points)?.points);
    let boundary = nzf_pareto_points(ch, &pw, g.boundary_points)?;
    for p in &boundary {
        let r = p.rates();
        csv.row(Some("nzf_boundary"), &[r.r1, r.r2, p.dtau.0, p.d_value, f64::from(p.b_choice), 0.0]);
    }
    let anchors = proper_anchor_points(ch, &pw);
    for (label, t) in ["ne", "su1", "su2"].iter().zip(&anchors.points) {
        let [a, b, c, d] = t.tag.params();
        csv.row(Some(label), &[t.rate.r1, t.rate.r2, a, b, c, d]);
    }
    for v in time_share_hull(&anchors.rates()) {
        csv.row(Some("proper_hull"), &[v.r1, v.r2, 0.0, 0.0, 0.0, 0.0]);
    }
    emit(out, &csv.into_bytes())
}

pub fn sweep_snr(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let ch = &s.channel;
    let offset = optimal_high_snr_offset(ch);
    let mut csv = Csv::new(&SWEEP_HEADER);
    for &db in &s.snr_list_db {
        let pw = PowerConfig::from_snr_db(db)?;
        let ne = ne_rate_point(ch, &pw).sum();
        let zf = zf_max_sum_rate(ch, &pw).rates().sum();
        let r1 = rank_one_max_sum(ch, &pw, s.grids.dtau_points);
        let full = full_rank_max_sum(ch, &pw, s.grids.fullrank_grid)?;
        let zf_asymptote = pw.snr().log2() - offset.l_inf - 1.0;
        csv.row(None, &[db, ne, zf, r1, full, zf_asymptote, offset.l_inf]);
    }
    emit(out, &csv.into_bytes())
}

#[derive(Serialize)]
struct AsymptoticsReport {
    s0_proper: f64,
    s0_argmax_params: ShapePair,
    s0_argmax: f64,
    s0_argmax_is_proper: bool,
    s0_supremum: f64,
    wideband_coupling: f64,
    proper_maximizes_s0: bool,
    ebn0_min_db: f64,
    s_inf: f64,
    l_inf_opt: f64,
    dtau_opt: f64,
    s0_grid_points_per_axis: usize,
}

pub fn asymptotics(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let ch = &s.channel;
    let proper = Covariance2::proper(1.0)?;
    let low = wideband_slope(&proper, &proper, ch)?;
    let grid = wideband_slope_grid(ch, s.grids.fullrank_grid)?;
    let high = optimal_high_snr_offset(ch);
    let report = AsymptoticsReport {
        s0_proper: low.s0,
        s0_argmax_params: grid.argmax,
        s0_argmax: grid.s0_max,
        s0_argmax_is_proper: grid.argmax_is_proper,
        s0_supremum: max_wideband_slope(ch),
        wideband_coupling: wideband_coupling(ch),
        proper_maximizes_s0: proper_maximizes_wideband_slope(ch),
        ebn0_min_db: low.ebn0_min_db,
        s_inf: high.s_inf,
        l_inf_opt: high.l_inf,
        dtau_opt: high.dtau_opt.0,
        s0_grid_points_per_axis: grid.points_per_axis,
    };
    emit(out, &json_bytes(&report))
}

#[derive(Serialize)]
struct FairnessOutput {
    snr_db: f64,
    pf_variant: PfVariant,
    #[serde(flatten)]
    comparison: FairnessComparison,
    max_min_gain: f64,
    pf_gain_difference: f64,
}

pub fn fairness(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let grids = RegionGrids { full_rank: s.grids.fullrank_grid, dtau_points: s.grids.dtau_points };
    let comparison = compare_fairness(&s.channel, &s.power(), grids, s.pf_variant)?;
    let report = FairnessOutput {
        snr_db: s.snr_db,
        pf_variant: s.pf_variant,
        max_min_gain: comparison.improper.max_min.min() - comparison.proper.max_min.min(),
        pf_gain_difference: comparison.improper.pf_gain - comparison.proper.pf_gain,
        comparison,
    };
    emit(out, &json_bytes(&report))
}

pub struct VerifyOptions {
    pub level: Level,
    pub machine_summary: bool,
    pub fault: Fault,
}

pub fn verify(s: &Scenario, opts: &VerifyOptions, out: Option<&Path>) -> Result<(), CliError> {
    let report = verify::run(Some((s.channel, s.power())), opts.level, s.seed.unwrap_or(0), opts.fault);
    let mut text = String::new();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{status} {:<24} cases={:<5} worst={:.3e} tol={:.1e}  {}\n",
            c.anchor, c.cases, c.worst, c.tolerance, c.description
        ));
        if !c.passed && !c.detail.is_empty() {
            text.push_str(&format!("     {}\n", c.detail));
        }
    }
    let failing = report.failing_anchors();
    text.push_str(&if failing.is_empty() {
        format!("all {} checks passed\n", report.checks.len())
    } else {
        format!("{} of {} checks failed: {}\n", failing.len(), report.checks.len(), failing.join(", "))
    });
    emit(out, text.as_bytes())?;
    if opts.machine_summary {
        eprint!("{}", String::from_utf8(json_bytes(&report)).expect("utf-8 json"));
    }
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failing))
    }
}
