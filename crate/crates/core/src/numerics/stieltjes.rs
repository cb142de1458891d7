//! Riemann-Stieltjes integration against a distribution function.
//!
//! The integral over (a, b] splits into an exact sum over the
//! integrator's jumps and a quantile-spaced midpoint quadrature of the
//! continuous part: integrating g(Q(u)) du over the probability
//! segments that remain once the jump intervals are removed. Equal
//! probability increments put cells where the measure lives, so heavy
//! tails need no special casing. The quadrature grid is refined until
//! two successive estimates agree.

use crate::defaults::{QUAD_CELLS, QUAD_MAX_REFINES, QUAD_REFINE_TOL};
use crate::dist::Distribution;
use crate::error::{CoreError, Result};

fn check_finite(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CoreError::Evaluation {
            context: "stieltjes_integral",
            x,
        })
    }
}

/// Integrate `integrand` dF over (a, b] for the distribution `d`.
/// `b` may be +inf, in which case the mass at infinity (if any) is
/// excluded: the integral runs over the finite part of the support.
pub fn stieltjes_integral<F>(integrand: F, d: &dyn Distribution, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    stieltjes_integral_with_breaks(integrand, d, a, b, &[])
}

/// As `stieltjes_integral`, with extra segment boundaries at the given
/// t-values. Callers that know where their integrand has kinks or fast
/// variation (convolution arguments crossing a support edge) pass them
/// here so each feature gets its own quadrature cells.
pub(crate) fn stieltjes_integral_with_breaks<F>(
    integrand: F,
    d: &dyn Distribution,
    a: f64,
    b: f64,
    breaks: &[f64],
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(a <= b) {
        return Err(CoreError::InvalidGrid(format!(
            "integration bounds must satisfy a <= b, got ({a}, {b})"
        )));
    }
    let u_lo = if a == f64::NEG_INFINITY { 0.0 } else { d.cdf(a) };
    let u_hi = if b == f64::INFINITY {
        1.0 - d.atom_at_inf()
    } else {
        d.cdf(b)
    };
    if u_hi <= u_lo {
        return Ok(0.0);
    }

    // exact jump terms, and their probability intervals in u-space
    let mut jump_sum = 0.0;
    let mut jump_intervals: Vec<(f64, f64)> = Vec::new();
    for j in d.jumps() {
        if j.x > a && j.x <= b {
            jump_sum += check_finite(integrand(j.x), j.x)? * j.mass;
            let hi = d.cdf(j.x).min(u_hi);
            let lo = (d.cdf(j.x) - j.mass).max(u_lo);
            if hi > lo {
                jump_intervals.push((lo, hi));
            }
        }
    }
    jump_intervals.sort_by(|p, q| p.0.total_cmp(&q.0));

    // complement of the jump intervals inside [u_lo, u_hi]; slivers of
    // rounding width between adjacent jump levels are dropped
    let mut segments: Vec<(f64, f64)> = Vec::new();
    let mut cursor = u_lo;
    for &(lo, hi) in &jump_intervals {
        if lo - cursor > 1e-13 {
            segments.push((cursor, lo));
        }
        cursor = cursor.max(hi);
    }
    if u_hi - cursor > 1e-13 {
        segments.push((cursor, u_hi));
    }

    // split segments at the caller's breakpoints
    if !breaks.is_empty() {
        let mut cuts: Vec<f64> = breaks
            .iter()
            .filter(|t| t.is_finite() && **t > a && **t < b)
            .map(|&t| d.cdf(t))
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut split: Vec<(f64, f64)> = Vec::with_capacity(segments.len() + cuts.len());
        for &(lo, hi) in &segments {
            let mut start = lo;
            for &c in cuts.iter().filter(|c| **c > lo && **c < hi) {
                if c - start > 1e-13 {
                    split.push((start, c));
                    start = c;
                }
            }
            if hi - start > 1e-13 {
                split.push((start, hi));
            }
        }
        segments = split;
    }

    let cont_mass: f64 = segments.iter().map(|&(lo, hi)| hi - lo).sum();
    if cont_mass <= 1e-12 {
        return Ok(jump_sum);
    }

    let quad = |cells: usize| -> Result<f64> {
        let mut total = 0.0;
        for &(lo, hi) in &segments {
            let len = hi - lo;
            let n = ((cells as f64 * len / cont_mass).ceil() as usize).max(16);
            let du = len / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let u = lo + (i as f64 + 0.5) * du;
                let t = d.quantile(u);
                acc += check_finite(integrand(t), t)?;
            }
            total += acc * du;
        }
        Ok(total)
    };

    let mut cells = QUAD_CELLS;
    let mut prev = quad(cells)?;
    for _ in 0..QUAD_MAX_REFINES {
        cells *= 2;
        let next = quad(cells)?;
        if (next - prev).abs() < QUAD_REFINE_TOL {
            return Ok(jump_sum + next);
        }
        prev = next;
    }
    let last = prev;
    let prev = quad(cells / 2)?;
    Err(CoreError::Accuracy { last, prev })
}
