//! Scalar kernels shared by every optimizer: the two real branches of the
//! Lambert W function and a golden-section maximizer.

use std::cell::Cell;
use std::f64::consts::E;

use crate::error::{Error, Result};

/// The branch point `-1/e` where `W0` and `W-1` meet at `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub value: f64,
}

impl BranchPoint {
    pub const fn new() -> Self {
        BranchPoint {
            value: -0.367_879_441_171_442_33,
        }
    }
}

impl Default for BranchPoint {
    fn default() -> Self {
        Self::new()
    }
}

/// `-1/e`.
pub const BRANCH_POINT: f64 = BranchPoint::new().value;

/// Arguments this far below the branch point are treated as rounding noise.
pub const BRANCH_CLAMP: f64 = 1e-12;

/// Interior-point ratio used by the golden-section update.
pub const GOLDEN_RATIO: f64 = 0.618;

const MAX_ITER: usize = 64;

thread_local! {
    static GS_CALLS: Cell<usize> = const { Cell::new(0) };
}

/// Number of `golden_section_max` invocations made on the current thread.
pub fn golden_section_calls() -> usize {
    GS_CALLS.with(|c| c.get())
}

fn clamp_to_branch(x: f64, branch: &'static str) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::LambertDomain { branch, x });
    }
    if x < BRANCH_POINT {
        if BRANCH_POINT - x <= BRANCH_CLAMP {
            return Ok(BRANCH_POINT);
        }
        return Err(Error::LambertDomain { branch, x });
    }
    Ok(x)
}

/// `p = sqrt(2 (e x + 1))`, evaluated as `sqrt(2 e (x + 1/e))` so that the
/// cancellation near the branch point happens in an exact subtraction.
fn branch_distance(x: f64) -> f64 {
    (2.0 * E * (x - BRANCH_POINT)).max(0.0).sqrt()
}

/// Halley refinement of `w e^w = x`.
fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Newton iteration on `w + ln|w| = target`, which is `w e^w = ±e^target`
/// written in a form that neither overflows nor underflows.
fn newton_log_form(target: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let g = w + w.abs().ln() - target;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Principal branch `W0(x)` for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let x = clamp_to_branch(x, "W0")?;
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > E {
        let l1 = x.ln();
        let l2 = l1.ln();
        let guess = l1 - l2 + l2 / l1;
        return Ok(newton_log_form(l1, guess));
    }
    let guess = if x < -0.25 {
        let p = branch_distance(x);
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p() * (1.0 - x.ln_1p() / (2.0 + x.ln_1p()))
    };
    Ok(halley(x, guess).max(-1.0))
}

/// Lower branch `W-1(x)` for `-1/e <= x < 0`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    let x = clamp_to_branch(x, "W-1")?;
    if x >= 0.0 {
        return Err(Error::LambertDomain { branch: "W-1", x });
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    if x < -0.25 {
        let p = branch_distance(x);
        let guess = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
        return Ok(halley(x, guess).min(-1.0));
    }
    Ok(wm1_far((-x).ln()))
}

/// `W-1(-exp(log_neg_x))`, for callers whose argument would underflow.
///
/// `log_neg_x` must be at most `-1` (the branch point), up to the usual
/// clamping tolerance.
pub fn lambert_wm1_from_log(log_neg_x: f64) -> Result<f64> {
    if log_neg_x.is_nan() {
        return Err(Error::LambertDomain {
            branch: "W-1",
            x: f64::NAN,
        });
    }
    if log_neg_x > -700.0 {
        return lambert_wm1(-log_neg_x.exp());
    }
    Ok(wm1_far(log_neg_x))
}

fn wm1_far(l1: f64) -> f64 {
    // asymptotic start: W ~ L1 - L2 + L2/L1 with L1 = ln(-x), L2 = ln(-L1)
    let l2 = (-l1).ln();
    let guess = (l1 - l2 + l2 / l1).min(-1.0 - 1e-3);
    newton_log_form(l1, guess).min(-1.0)
}

/// Golden-section maximization of a unimodal `f` on `[lb, ub]`.
///
/// The interior points move by the fixed ratio [`GOLDEN_RATIO`]; the loop
/// stops once the bracket is no wider than `xi` and the bracket midpoint is
/// returned together with `f` evaluated there.
pub fn golden_section_max<F>(f: F, lb: f64, ub: f64, xi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if lb.partial_cmp(&ub) != Some(std::cmp::Ordering::Less) || !lb.is_finite() || !ub.is_finite() {
        return Err(Error::InvalidInterval { lb, ub });
    }
    if xi.is_nan() || xi <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "xi",
            reason: format!("golden-section tolerance must be positive, got {xi}"),
        });
    }
    GS_CALLS.with(|c| c.set(c.get() + 1));

    let (mut tl, mut tu) = (lb, ub);
    let mut tp = tu - GOLDEN_RATIO * (tu - tl);
    let mut tq = tl + GOLDEN_RATIO * (tu - tl);
    let mut fp = f(tp);
    let mut fq = f(tq);
    while tu - tl > xi {
        if fp >= fq {
            tu = tq;
            tq = tp;
            fq = fp;
            tp = tu - GOLDEN_RATIO * (tu - tl);
            fp = f(tp);
        } else {
            tl = tp;
            tp = tq;
            fp = fq;
            tq = tl + GOLDEN_RATIO * (tu - tl);
            fq = f(tq);
        }
    }
    let t = 0.5 * (tu + tl);
    Ok((t, f(t)))
}
