//! Pairwise stochastic-order comparators.
//!
//! - ordinary stochastic order: sf_left(x) <= sf_right(x) everywhere;
//! - convex transform order F1 <=_c F2: Q_2(F_1(x)) convex;
//! - inverted-subadditive order F1 <=_{i-sb} F2:
//!   x -> 1/Q_2(F_1^-(1/x)) subadditive.
//!
//! Compositions route through survival functions and
//! survival-parameterized quantiles so the right tail keeps relative
//! precision, and are clipped to the probability window
//! [CLIP_EPS, 1 - CLIP_EPS] (plus the right side's atom at infinity)
//! because the transforms diverge at 0 and 1. Engaged clipping is
//! surfaced on the `clipped` flag of the check.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::defaults::CLIP_EPS;
use crate::dist::{DistId, Distribution};
use crate::error::Result;
use crate::numerics::{check_convex_points, check_subadditive, GridSpec, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderKind {
    #[serde(rename = "st")]
    St,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "i-sb")]
    ISb,
}

impl std::str::FromStr for OrderKind {
    type Err = crate::error::CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "st" => Ok(OrderKind::St),
            "c" => Ok(OrderKind::C),
            "i-sb" | "isb" => Ok(OrderKind::ISb),
            other => Err(crate::error::CoreError::Unsupported(format!(
                "unknown order `{other}` (expected st, c, or i-sb)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompositionPoint {
    pub x: f64,
    pub value: f64,
}

/// Result of one pairwise order comparison, with the sampled
/// composition curve kept as evidence.
#[derive(Debug, Clone, Serialize)]
pub struct OrderCheck {
    pub left: DistId,
    pub right: DistId,
    pub order: OrderKind,
    pub grid: GridSpec,
    pub clipped: bool,
    pub composition: Vec<CompositionPoint>,
    pub verdict: Verdict,
}

/// x lattice covering left's probability window, symmetrized when the
/// support extends below zero.
fn composition_lattice(left: &dyn Distribution, g: &GridSpec) -> Vec<f64> {
    let lo = left.quantile(CLIP_EPS);
    let hi = left.quantile_from_survival(left.atom_at_inf() + CLIP_EPS);
    let mut pts: Vec<f64> = Vec::with_capacity(2 * g.n_x);
    for x in g.x_lattice() {
        if x >= lo && x <= hi {
            pts.push(x);
        }
        if left.support().0 < 0.0 && -x >= lo && -x <= hi {
            pts.push(-x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn sample_curve<F: Fn(f64) -> f64>(pts: &[f64], v: F) -> Vec<CompositionPoint> {
    let stride = (pts.len() / 128).max(1);
    pts.iter()
        .step_by(stride)
        .map(|&x| CompositionPoint { x, value: v(x) })
        .collect()
}

/// left <=_st right iff sf_left <= sf_right pointwise.
pub fn leq_st(left: &dyn Distribution, right: &dyn Distribution, g: &GridSpec) -> Result<OrderCheck> {
    g.validate()?;
    let mut pts = g.x_lattice();
    if left.support().0 < 0.0 || right.support().0 < 0.0 {
        let mut neg: Vec<f64> = pts.iter().map(|x| -x).collect();
        neg.extend_from_slice(&pts);
        neg.sort_by(f64::total_cmp);
        pts = neg;
    }
    let residual = |x: f64| left.survival(x) - right.survival(x);
    let mut worst = (f64::NEG_INFINITY, pts[0]);
    for &x in &pts {
        let r = residual(x);
        if r > worst.0 {
            worst = (r, x);
        }
    }
    let verdict = Verdict::from_scan(worst.0, Witness::X { x: worst.1 }, g.tol);
    Ok(OrderCheck {
        left: left.id(),
        right: right.id(),
        order: OrderKind::St,
        grid: *g,
        clipped: false,
        composition: sample_curve(&pts, residual),
        verdict,
    })
}

/// left <=_c right iff Q_right(F_left(x)) is convex on the clipped window.
pub fn leq_c(left: &dyn Distribution, right: &dyn Distribution, g: &GridSpec) -> Result<OrderCheck> {
    g.validate()?;
    let clipped = AtomicBool::new(false);
    let s_lo = right.atom_at_inf() + CLIP_EPS;
    let comp = |x: f64| {
        let s = left.survival(x);
        let sc = s.clamp(s_lo, 1.0 - CLIP_EPS);
        if sc != s {
            clipped.store(true, Ordering::Relaxed);
        }
        right.quantile_from_survival(sc)
    };
    let pts = composition_lattice(left, g);
    let verdict = check_convex_points(comp, &pts, g)?;
    Ok(OrderCheck {
        left: left.id(),
        right: right.id(),
        order: OrderKind::C,
        grid: *g,
        clipped: clipped.load(Ordering::Relaxed),
        composition: sample_curve(&pts, comp),
        verdict,
    })
}

/// left <=_{i-sb} right iff 1/Q_right(F_left^-(1/x)) is subadditive.
/// Both sides must put no mass at or below the origin; the order rules
/// out supports that straddle it.
pub fn leq_isb(
    left: &dyn Distribution,
    right: &dyn Distribution,
    g: &GridSpec,
) -> Result<OrderCheck> {
    g.validate()?;
    if left.cdf(0.0) > g.tol || right.cdf(0.0) > g.tol {
        return Ok(OrderCheck {
            left: left.id(),
            right: right.id(),
            order: OrderKind::ISb,
            grid: *g,
            clipped: false,
            composition: Vec::new(),
            verdict: Verdict::not_applicable(),
        });
    }
    let clipped = AtomicBool::new(false);
    let comp = |x: f64| {
        // the literal composition keeps full precision: small values of
        // F^-(1/x) are exactly representable, and 1/Q damps the rounding
        // of u near 1 (where Q is huge) back below tolerance
        let u = left.cdf_left(1.0 / x);
        let uc = u.clamp(CLIP_EPS, 1.0 - CLIP_EPS);
        if uc != u {
            clipped.store(true, Ordering::Relaxed);
        }
        let q = right.quantile(uc);
        if q.is_infinite() {
            0.0
        } else {
            1.0 / q
        }
    };
    let verdict = check_subadditive(comp, g)?;
    Ok(OrderCheck {
        left: left.id(),
        right: right.id(),
        order: OrderKind::ISb,
        grid: *g,
        clipped: clipped.load(Ordering::Relaxed),
        composition: sample_curve(&g.x_lattice(), comp),
        verdict,
    })
}

pub fn check_order(
    kind: OrderKind,
    left: &dyn Distribution,
    right: &dyn Distribution,
    g: &GridSpec,
) -> Result<OrderCheck> {
    match kind {
        OrderKind::St => leq_st(left, right, g),
        OrderKind::C => leq_c(left, right, g),
        OrderKind::ISb => leq_isb(left, right, g),
    }
}

/// Both directions supported forces near-equality of the CDFs.
pub fn st_antisymmetry_gap(
    left: &dyn Distribution,
    right: &dyn Distribution,
    g: &GridSpec,
) -> f64 {
    g.x_lattice()
        .iter()
        .map(|&x| (left.cdf(x) - right.cdf(x)).abs())
        .fold(0.0, f64::max)
}
