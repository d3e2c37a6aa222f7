//! Optimal time allocation per pair, mode-selection thresholds, and the
//! joint mode-selection/time-allocation solver.
//!
//! Every pair shares one energy-transfer time `t_e`. For a fixed `t_e` a
//! cellular pair is best served by the downlink time that equalizes its
//! uplink and downlink rates, which has a closed form through `W-1`; the
//! D2D throughput is strictly concave in `t_e` with a closed-form maximizer
//! through `W0`. A pair prefers D2D above a single crossing point `t_e^th`,
//! so the `t_e` axis splits into at most `pairs + 1` subranges with a fixed
//! mode vector each, and the sum-throughput is concave on every one of them.

use std::cell::RefCell;
use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{golden_section_max, lambert_w0, lambert_wm1_from_log};
use crate::scenario::SystemParams;
use crate::throughput::{d2d_interior, PairLink};

/// Largest pair count the exhaustive oracle accepts.
pub const ORACLE_MAX_PAIRS: usize = 12;

/// Width of the band around `Y3 = 1` where the D2D closed form is 0/0.
const Y3_SINGULAR_BAND: f64 = 1e-9;
const MAX_NEWTON: usize = 60;

/// Communication mode of one pair. Serialized as the binary indicator
/// (`1` = D2D, `0` = cellular).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Mode {
    Cellular,
    D2d,
}

impl From<Mode> for u8 {
    fn from(m: Mode) -> u8 {
        match m {
            Mode::Cellular => 0,
            Mode::D2d => 1,
        }
    }
}

impl TryFrom<u8> for Mode {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Mode::Cellular),
            1 => Ok(Mode::D2d),
            other => Err(format!("mode indicator must be 0 or 1, got {other}")),
        }
    }
}

impl Mode {
    pub fn indicator(self) -> u8 {
        self.into()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cellular => "cellular",
            Mode::D2d => "d2d",
        }
    }
}

/// Derived quantities of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAnalysis {
    /// `sigma2 (1 - t_e) / (theta eta P0 rho H_T^2 t_e)` at `te_threshold`
    /// clamped into `[eps, 1 - eps]`.
    pub y1: f64,
    /// `1 + P0 phi H_R / sigma2`.
    pub y2: f64,
    /// `theta eta P0 H_T G / sigma2`.
    pub y3: f64,
    pub te_d2d_star: f64,
    /// 0 when D2D always wins, 1 when cellular always wins, otherwise the
    /// crossing point above which D2D wins.
    pub te_threshold: f64,
    /// Downlink share `t_d* / (1 - t_e)` at the same point as `y1`.
    pub frac_f: f64,
}

impl PairAnalysis {
    /// Whether the pair can prefer cellular mode for some `t_e`.
    pub fn ever_cellular(&self) -> bool {
        self.te_threshold > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxContext {
    /// Mean of the pairs' `y3`.
    pub y4: f64,
    /// D2D-optimal energy-transfer time of a pair whose `y3` equals `y4`.
    pub te_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub te_star: f64,
    pub modes: Vec<Mode>,
    /// Downlink time per pair, 0 for D2D pairs.
    pub td_star: Vec<f64>,
    pub tau_s: f64,
    pub per_pair_tau: Vec<f64>,
}

impl OptimizationResult {
    pub fn d2d_count(&self) -> usize {
        self.modes.iter().filter(|m| **m == Mode::D2d).count()
    }

    pub fn d2d_fraction(&self) -> f64 {
        self.d2d_count() as f64 / self.modes.len() as f64
    }

    /// `(uplink, downlink)` information-transfer times of every cellular pair.
    pub fn cellular_it_times(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.modes
            .iter()
            .zip(&self.td_star)
            .filter(|(m, _)| **m == Mode::Cellular)
            .map(|(_, &td)| (1.0 - self.te_star - td, td))
    }
}

/// Rate-balanced cellular operating point at a fixed `t_e`.
#[derive(Debug, Clone, Copy)]
struct CellularOptimum {
    td: f64,
    rate: f64,
    frac: f64,
    y1: f64,
}

fn check_open_unit(t_e: f64) -> Result<()> {
    if t_e > 0.0 && t_e < 1.0 {
        Ok(())
    } else {
        Err(Error::TimeDomain(format!("t_e = {t_e} must lie in (0, 1)")))
    }
}

fn cellular_optimum(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<CellularOptimum> {
    check_open_unit(t_e)?;
    let it = 1.0 - t_e;
    let y1 = it / (link.uplink_snr_factor(params) * t_e);
    // c = ln(Y2)
    let c = link.downlink_nats(params);
    let cy1 = c * y1;
    if !(cy1 > 0.0 && cy1.is_finite()) {
        return Err(Error::TimeDomain(format!(
            "degenerate rate balance at t_e = {t_e} (Y1 ln Y2 = {cy1})"
        )));
    }
    // W-1 argument is -Y1 ln(Y2) / Y2^(Y1 + 1); take it in log form since
    // Y2^(Y1 + 1) overflows for weak uplinks.
    let log_neg_arg = cy1.ln() - cy1 - c;
    let w = lambert_wm1_from_log(log_neg_arg)?;
    // q = -(W + Y1 ln Y2) solves q - ln(1 + q / (Y1 ln Y2)) = ln Y2.
    let q = -w - cy1;
    let frac = if cy1 > 1.0 {
        // s = q - ln Y2 is tiny against both terms here; solve
        // s = ln(1 + (c + s) / (Y1 ln Y2)) directly. The residual is convex
        // and increasing at the root, so Newton from the right is monotone.
        let s_max = c / (cy1 - 1.0);
        let mut s = q - c;
        if !(s > 0.0 && s <= s_max) {
            s = s_max;
        }
        for _ in 0..MAX_NEWTON {
            let g = s - ((c + s) / cy1).ln_1p();
            let step = g / (1.0 - 1.0 / (cy1 + c + s));
            if !step.is_finite() {
                break;
            }
            s -= step;
            if step.abs() <= f64::EPSILON * s {
                break;
            }
        }
        s / (c + s)
    } else {
        1.0 - c / q
    };
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::TimeDomain(format!(
            "downlink share {frac} outside (0, 1) at t_e = {t_e}"
        )));
    }
    let td = it * frac;
    Ok(CellularOptimum {
        td,
        rate: td * c / LN_2,
        frac,
        y1,
    })
}

/// Downlink time that equalizes uplink and downlink rates at `t_e`.
pub fn optimal_td(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<f64> {
    cellular_optimum(link, params, t_e).map(|c| c.td)
}

/// Best cellular throughput at `t_e`, i.e. with `t_d = optimal_td`.
pub fn optimal_cellular_rate(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<f64> {
    cellular_optimum(link, params, t_e).map(|c| c.rate)
}

/// `t_d* / (1 - t_e)`.
pub fn downlink_share(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<f64> {
    cellular_optimum(link, params, t_e).map(|c| c.frac)
}

/// Unconstrained maximizer of `(1 - t) log2(1 + y3 t / (1 - t))`.
///
/// With `W = W0((y3 - 1) / e)` the maximizer is
/// `[1 - y3 W / (W - y3 + 1)]^-1`. That quotient is 0/0 at `y3 = 1`; inside a
/// narrow band around it the same point is evaluated as
/// `(z - 1) / (z - 1 + y3)` with `z = e^(1 + W) = (y3 - 1) / W`.
fn d2d_argmax_unclamped(y3: f64) -> Result<f64> {
    let w = lambert_w0((y3 - 1.0) / E)?;
    if (y3 - 1.0).abs() < Y3_SINGULAR_BAND {
        let zm1 = (1.0 + w).exp_m1();
        return Ok(zm1 / (zm1 + y3));
    }
    Ok(1.0 / (1.0 - y3 * w / (w - y3 + 1.0)))
}

fn d2d_argmax(y3: f64, params: &SystemParams) -> Result<f64> {
    if y3.is_nan() || y3 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "y3",
            reason: format!("D2D SNR factor must be positive, got {y3}"),
        });
    }
    let t = d2d_argmax_unclamped(y3)?;
    let (lo, hi) = (params.eps, 1.0 - params.eps);
    Ok(if t.is_nan() { hi } else { t.clamp(lo, hi) })
}

/// Energy-transfer time maximizing the pair's D2D throughput, clamped to
/// `[eps, 1 - eps]`.
pub fn optimal_te_d2d(link: &PairLink, params: &SystemParams) -> Result<f64> {
    d2d_argmax(link.d2d_snr_factor(params), params)
}

/// D2D minus optimal-cellular throughput at `t_e`.
fn mode_gap(link: &PairLink, params: &SystemParams, t_e: f64) -> Result<f64> {
    Ok(d2d_interior(link, params, t_e) - cellular_optimum(link, params, t_e)?.rate)
}

fn crossing(link: &PairLink, params: &SystemParams) -> Result<f64> {
    let (mut lo, mut hi) = (params.eps, 1.0 - params.eps);
    // gap <= 0 at lo and >= 0 at hi; bisect down to adjacent floats
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mode_gap(link, params, mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (
        mode_gap(link, params, lo)?.abs(),
        mode_gap(link, params, hi)?.abs(),
    );
    Ok(if glo < ghi { lo } else { hi })
}

/// Classifies the pair as always-D2D (threshold 0), always-cellular
/// (threshold 1), or switching at an interior crossing point.
pub fn mode_threshold(link: &PairLink, params: &SystemParams) -> Result<PairAnalysis> {
    link.validate()?;
    let (lo, hi) = (params.eps, 1.0 - params.eps);
    let gap_lo = mode_gap(link, params, lo)?;
    let gap_hi = mode_gap(link, params, hi)?;
    let te_threshold = if gap_lo > 0.0 && gap_hi > 0.0 {
        0.0
    } else if gap_lo < 0.0 && gap_hi < 0.0 {
        1.0
    } else if gap_lo <= 0.0 && gap_hi >= 0.0 {
        crossing(link, params)?
    } else {
        return Err(Error::TimeDomain(format!(
            "D2D wins at t_e = {lo} but loses at t_e = {hi}; no single crossing to locate"
        )));
    };
    let t_ref = te_threshold.clamp(lo, hi);
    let cell = cellular_optimum(link, params, t_ref)?;
    Ok(PairAnalysis {
        y1: cell.y1,
        y2: 1.0 + link.downlink_snr(params),
        y3: link.d2d_snr_factor(params),
        te_d2d_star: optimal_te_d2d(link, params)?,
        te_threshold,
        frac_f: cell.frac,
    })
}

/// Mean-`y3` approximation of the common all-D2D energy-transfer time.
pub fn approx_te_d2d(links: &[PairLink], params: &SystemParams) -> Result<ApproxContext> {
    if links.is_empty() {
        return Err(Error::InvalidParameter {
            name: "links",
            reason: "need at least one pair".into(),
        });
    }
    let y4 = links.iter().map(|l| l.d2d_snr_factor(params)).sum::<f64>() / links.len() as f64;
    Ok(ApproxContext {
        y4,
        te_hat: d2d_argmax(y4, params)?,
    })
}

#[derive(Debug, Clone, Copy)]
enum ModePolicy<'a> {
    /// Per-pair better mode at the evaluated `t_e` (ties go to D2D).
    Best,
    Fixed(&'a [Mode]),
    All(Mode),
}

/// Per-pair throughputs, modes and downlink times at a fixed `t_e`.
fn assemble(
    links: &[PairLink],
    params: &SystemParams,
    t_e: f64,
    policy: ModePolicy<'_>,
) -> Result<OptimizationResult> {
    let mut modes = Vec::with_capacity(links.len());
    let mut td_star = Vec::with_capacity(links.len());
    let mut per_pair_tau = Vec::with_capacity(links.len());
    for (i, link) in links.iter().enumerate() {
        let d2d = d2d_interior(link, params, t_e);
        let wanted = match policy {
            ModePolicy::Fixed(m) => Some(m[i]),
            ModePolicy::All(m) => Some(m),
            ModePolicy::Best => None,
        };
        if wanted == Some(Mode::D2d) {
            modes.push(Mode::D2d);
            td_star.push(0.0);
            per_pair_tau.push(d2d);
            continue;
        }
        let cell = cellular_optimum(link, params, t_e).map_err(|e| Error::pair(i, e))?;
        if wanted.is_none() && cell.rate <= d2d {
            modes.push(Mode::D2d);
            td_star.push(0.0);
            per_pair_tau.push(d2d);
        } else {
            modes.push(Mode::Cellular);
            td_star.push(cell.td);
            per_pair_tau.push(cell.rate);
        }
    }
    Ok(OptimizationResult {
        te_star: t_e,
        modes,
        td_star,
        tau_s: per_pair_tau.iter().sum(),
        per_pair_tau,
    })
}

/// Sum-throughput at `t_e` with the given pairs in cellular mode and the
/// rest in D2D mode.
fn restricted_sum(
    links: &[PairLink],
    params: &SystemParams,
    cellular: &[bool],
    t_e: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, (link, &cell)) in links.iter().zip(cellular).enumerate() {
        total += if cell {
            cellular_optimum(link, params, t_e)
                .map_err(|e| Error::pair(i, e))?
                .rate
        } else {
            d2d_interior(link, params, t_e)
        };
    }
    Ok(total)
}

/// One golden-section search region of the joint solver.
#[derive(Debug, Clone)]
struct Subrange {
    lb: f64,
    ub: f64,
    cellular: Vec<bool>,
    /// The upper end comes from a D2D optimum rather than a threshold and
    /// may cut off the restricted maximizer.
    soft_upper: bool,
    /// Search over a wider region with the same mode vector whose result is
    /// clamped into `[lb, ub]`. By concavity this is the constrained
    /// maximizer, and it reproduces the fixed-mode baselines exactly.
    outer: Option<Box<Subrange>>,
}

impl Subrange {
    fn all_d2d(n: usize, lb: f64, ub: f64) -> Subrange {
        Subrange {
            lb,
            ub,
            cellular: vec![false; n],
            soft_upper: false,
            outer: None,
        }
    }

    fn all_cellular(n: usize, ub: f64) -> Subrange {
        Subrange {
            lb: 0.0,
            ub,
            cellular: vec![true; n],
            soft_upper: true,
            outer: None,
        }
    }

    fn clamped(self, lb: f64, ub: f64) -> Subrange {
        Subrange {
            lb,
            ub,
            cellular: self.cellular.clone(),
            soft_upper: false,
            outer: Some(Box::new(self)),
        }
    }
}

/// Maximizes the restricted sum over one subrange. A bracket that collapsed
/// to a point (coinciding thresholds, or a D2D bound below the threshold)
/// is evaluated at that point.
fn search_subrange(
    links: &[PairLink],
    params: &SystemParams,
    range: &Subrange,
) -> Result<(f64, f64)> {
    let (lo, hi) = (params.eps, 1.0 - params.eps);
    let lb = range.lb.clamp(lo, hi);
    let ub = range.ub.clamp(lo, hi);
    if let Some(outer) = &range.outer {
        let (t, v) = search_subrange(links, params, outer)?;
        let c = t.clamp(lb, ub.max(lb));
        if c == t {
            return Ok((t, v));
        }
        return restricted_sum(links, params, &range.cellular, c).map(|v| (c, v));
    }
    let failure = RefCell::new(None);
    let objective = |t: f64| match restricted_sum(links, params, &range.cellular, t) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let mut best = if ub > lb {
        golden_section_max(objective, lb, ub, params.xi)?
    } else {
        (lb, objective(lb))
    };
    if range.soft_upper && ub < hi && ub - best.0 <= params.xi {
        log::debug!(
            "maximizer {:.6} at the D2D-derived bound {:.6}; widening to {:.6}",
            best.0,
            ub,
            hi
        );
        best = golden_section_max(objective, lb, hi, params.xi)?;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(best)
}

fn link_quality(link: &PairLink) -> f64 {
    link.eta_t * link.h_t * link.g
}

fn require_pairs(links: &[PairLink], params: &SystemParams) -> Result<()> {
    params.validate()?;
    if links.is_empty() {
        return Err(Error::InvalidParameter {
            name: "links",
            reason: "need at least one pair".into(),
        });
    }
    for (i, l) in links.iter().enumerate() {
        l.validate().map_err(|e| Error::pair(i, e))?;
    }
    Ok(())
}

/// D2D optima of the weakest and strongest direct links; every per-pair D2D
/// maximizer lies between them.
fn d2d_bounds(links: &[PairLink], params: &SystemParams) -> Result<(f64, f64)> {
    let by_quality = |a: &&PairLink, b: &&PairLink| link_quality(a).total_cmp(&link_quality(b));
    let weakest = links.iter().min_by(by_quality).expect("non-empty");
    let strongest = links.iter().max_by(by_quality).expect("non-empty");
    Ok((
        optimal_te_d2d(strongest, params)?,
        optimal_te_d2d(weakest, params)?,
    ))
}

/// Joint mode selection and common energy-transfer time maximizing the
/// sum-throughput.
pub fn joint_optimize(links: &[PairLink], params: &SystemParams) -> Result<OptimizationResult> {
    require_pairs(links, params)?;
    let analyses = links
        .iter()
        .enumerate()
        .map(|(i, l)| mode_threshold(l, params).map_err(|e| Error::pair(i, e)))
        .collect::<Result<Vec<_>>>()?;

    // descending thresholds; always-cellular pairs (threshold 1) come first
    let mut order: Vec<usize> = (0..links.len()).collect();
    order.sort_by(|&a, &b| {
        analyses[b]
            .te_threshold
            .total_cmp(&analyses[a].te_threshold)
            .then(a.cmp(&b))
    });
    let n_cellular = analyses.iter().filter(|a| a.ever_cellular()).count();
    let (d2d_lb, d2d_ub) = d2d_bounds(links, params)?;
    let threshold = |rank: usize| analyses[order[rank]].te_threshold;
    let cellular_prefix = |len: usize| {
        let mut mask = vec![false; links.len()];
        for &i in &order[..len] {
            mask[i] = true;
        }
        mask
    };

    let n = links.len();
    let mut ranges = Vec::with_capacity(n_cellular + 1);
    if n_cellular == 0 {
        ranges.push(Subrange::all_d2d(n, d2d_lb, d2d_ub));
    } else if analyses.iter().all(|a| a.te_threshold >= 1.0) {
        // only pairs that never switch to D2D make the whole axis cellular
        ranges.push(Subrange::all_cellular(n, d2d_ub));
    } else {
        ranges.push(
            Subrange::all_d2d(n, d2d_lb, d2d_ub).clamped(threshold(0), d2d_ub.max(threshold(0))),
        );
        for rank in 0..n_cellular {
            if rank + 1 == n {
                ranges.push(Subrange::all_cellular(n, d2d_ub).clamped(0.0, threshold(rank)));
                continue;
            }
            let lb = if rank + 1 < n_cellular {
                threshold(rank + 1)
            } else {
                0.0
            };
            ranges.push(Subrange {
                lb,
                ub: threshold(rank),
                cellular: cellular_prefix(rank + 1),
                soft_upper: false,
                outer: None,
            });
        }
    }

    let mut best: Option<(f64, f64)> = None;
    for range in &ranges {
        let (t, v) = search_subrange(links, params, range)?;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((t, v));
        }
    }
    let (te_star, _) = best.expect("at least one subrange");
    assemble(links, params, te_star, ModePolicy::Best)
}

/// Best common `t_e` with every pair in D2D mode.
pub fn optimize_all_d2d(links: &[PairLink], params: &SystemParams) -> Result<OptimizationResult> {
    require_pairs(links, params)?;
    let (lb, ub) = d2d_bounds(links, params)?;
    let (t, _) = search_subrange(links, params, &Subrange::all_d2d(links.len(), lb, ub))?;
    assemble(links, params, t, ModePolicy::All(Mode::D2d))
}

/// Best common `t_e` with every pair in cellular mode and rate-balanced
/// downlink times.
pub fn optimize_all_cellular(
    links: &[PairLink],
    params: &SystemParams,
) -> Result<OptimizationResult> {
    require_pairs(links, params)?;
    let (_, ub) = d2d_bounds(links, params)?;
    let (t, _) = search_subrange(links, params, &Subrange::all_cellular(links.len(), ub))?;
    assemble(links, params, t, ModePolicy::All(Mode::Cellular))
}

/// All-D2D evaluation at a given common `t_e` (no search).
pub fn evaluate_all_d2d(
    links: &[PairLink],
    params: &SystemParams,
    t_e: f64,
) -> Result<OptimizationResult> {
    require_pairs(links, params)?;
    check_open_unit(t_e)?;
    assemble(links, params, t_e, ModePolicy::All(Mode::D2d))
}

/// Brute-force reference: every mode vector against a uniform `t_e` grid.
pub fn exhaustive_oracle(
    links: &[PairLink],
    params: &SystemParams,
    grid_step: f64,
) -> Result<OptimizationResult> {
    require_pairs(links, params)?;
    if links.len() > ORACLE_MAX_PAIRS {
        return Err(Error::TooManyPairs {
            max: ORACLE_MAX_PAIRS,
            got: links.len(),
        });
    }
    if !(grid_step > 0.0 && grid_step < 0.5) {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            reason: format!("must lie in (0, 0.5), got {grid_step}"),
        });
    }
    let points = (1.0 / grid_step).round() as usize;
    let grid: Vec<f64> = (1..points).map(|j| j as f64 * grid_step).collect();
    let mut d2d = Vec::with_capacity(links.len());
    let mut cell = Vec::with_capacity(links.len());
    for (i, link) in links.iter().enumerate() {
        d2d.push(
            grid.iter()
                .map(|&t| d2d_interior(link, params, t))
                .collect::<Vec<_>>(),
        );
        cell.push(
            grid.iter()
                .map(|&t| cellular_optimum(link, params, t).map(|c| c.rate))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::pair(i, e))?,
        );
    }

    let mut best = (f64::NEG_INFINITY, 0usize, 0u32);
    for mask in 0..(1u32 << links.len()) {
        for j in 0..grid.len() {
            let total: f64 = (0..links.len())
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        d2d[i][j]
                    } else {
                        cell[i][j]
                    }
                })
                .sum();
            if total > best.0 {
                best = (total, j, mask);
            }
        }
    }
    let (_, j, mask) = best;
    let modes: Vec<Mode> = (0..links.len())
        .map(|i| {
            if mask & (1 << i) != 0 {
                Mode::D2d
            } else {
                Mode::Cellular
            }
        })
        .collect();
    assemble(links, params, grid[j], ModePolicy::Fixed(&modes))
}
