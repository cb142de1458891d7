//! Grid construction, verdicts, and the shape-property kernels.
//!
//! Every statement this crate checks is of the form "for every x (and
//! theta, or y) some residual is nonpositive". Those statements are
//! analytic; we only ever evaluate them on lattices, so a passing
//! verdict means *supported on the grid*, never proved. A `GridSpec`
//! is therefore part of every verdict's contract.

mod shape;
mod stieltjes;

pub use shape::{
    check_anti_star_shaped, check_concave, check_convex, check_star_shaped, check_subadditive,
};
pub(crate) use shape::check_convex_points;
pub(crate) use stieltjes::stieltjes_integral_with_breaks;
pub use stieltjes::stieltjes_integral;

use crate::error::{CoreError, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

/// Evaluation lattice for x and theta plus the violation tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_x: usize,
    pub spacing: Spacing,
    /// Size of the uniform theta lattice on the open interval (0, 1).
    pub theta_points: usize,
    pub tol: f64,
    /// Cap on (x, y) pairs for two-variable scans; beyond it the scan
    /// subsamples with a deterministic low-discrepancy sequence.
    pub pair_budget: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo > 0.0 && self.x_lo < self.x_hi && self.x_hi.is_finite()) {
            return Err(CoreError::InvalidGrid(format!(
                "need 0 < x_lo < x_hi finite, got [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if self.n_x < 2 {
            return Err(CoreError::InvalidGrid("n_x must be >= 2".into()));
        }
        if self.theta_points < 1 {
            return Err(CoreError::InvalidGrid("theta_points must be >= 1".into()));
        }
        if self.tol < 0.0 {
            return Err(CoreError::InvalidGrid("tol must be nonnegative".into()));
        }
        if self.pair_budget == 0 {
            return Err(CoreError::InvalidGrid("pair_budget must be positive".into()));
        }
        Ok(())
    }

    /// The x lattice, log- or linearly spaced on [x_lo, x_hi].
    pub fn x_lattice(&self) -> Vec<f64> {
        let n = self.n_x;
        match self.spacing {
            Spacing::Log => {
                let (a, b) = (self.x_lo.ln(), self.x_hi.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
            Spacing::Linear => (0..n)
                .map(|i| self.x_lo + (self.x_hi - self.x_lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Uniform theta lattice excluding 0 and 1: i/(n+1) for i = 1..=n.
    pub fn theta_lattice(&self) -> Vec<f64> {
        let n = self.theta_points;
        (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
    }

    /// Same grid restricted to [lo, hi]; used to honor quantile-range
    /// clipping without changing the lattice geometry elsewhere.
    pub fn clipped_to(&self, lo: f64, hi: f64) -> GridSpec {
        let mut g = *self;
        g.x_lo = g.x_lo.max(lo);
        g.x_hi = g.x_hi.min(hi);
        if !(g.x_lo < g.x_hi) {
            // degenerate window; keep a sliver so lattices stay well formed
            g.x_hi = g.x_lo * (1.0 + 1e-9);
        }
        g
    }

    /// Deterministic seed for subsampling, derived from the grid itself
    /// so repeated scans of one grid pick identical pairs.
    pub fn hash_seed(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x1000_0000_01b3);
        };
        mix(self.x_lo.to_bits());
        mix(self.x_hi.to_bits());
        mix(self.n_x as u64);
        mix(self.theta_points as u64);
        mix(self.tol.to_bits());
        mix(self.pair_budget as u64);
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Supported,
    Violated,
    NotApplicable,
}

/// Location of the worst violation found by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    X { x: f64 },
    XTheta { x: f64, theta: f64 },
    Pair { x: f64, y: f64 },
}

/// Three-valued outcome of a grid scan.
///
/// `worst_residual` is the largest violation measure seen, normalized
/// by the local value scale (max(1, |values|)) so that tolerances stay
/// meaningful when compositions grow large. Residuals of CDF-valued
/// scans are unaffected by the normalization.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn from_scan(worst: f64, witness: Witness, tol: f64) -> Verdict {
        if worst > tol {
            Verdict {
                status: Status::Violated,
                worst_residual: worst,
                witness: Some(witness),
            }
        } else {
            Verdict {
                status: Status::Supported,
                worst_residual: worst,
                witness: None,
            }
        }
    }

    pub fn not_applicable() -> Verdict {
        Verdict {
            status: Status::NotApplicable,
            worst_residual: 0.0,
            witness: None,
        }
    }

    pub fn is_supported(&self) -> bool {
        self.status == Status::Supported
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }
}

/// Normalize a residual by the magnitude of the values that produced it.
#[inline]
pub(crate) fn scaled(residual: f64, values: &[f64]) -> f64 {
    let mut scale = 1.0f64;
    for v in values {
        scale = scale.max(v.abs());
    }
    residual / scale
}

/// Index pairs for two-variable scans: the full upper triangle when it
/// fits the budget, otherwise short-stride local pairs plus an R2
/// low-discrepancy sample of the index square.
pub(crate) fn pair_indices(n: usize, budget: usize, seed: u64) -> Vec<(usize, usize)> {
    let full = n * (n + 1) / 2;
    let mut pairs = Vec::with_capacity(budget.min(full));
    if full <= budget {
        for i in 0..n {
            for j in i..n {
                pairs.push((i, j));
            }
        }
        return pairs;
    }
    for &step in &[1usize, 2, 3, 5, 8, 13, 21, 34] {
        if pairs.len() + n >= budget {
            break;
        }
        for i in 0..n.saturating_sub(step) {
            pairs.push((i, i + step));
        }
    }
    // R2 sequence over the index square (plastic-constant rotation)
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_2;
    let offset = (seed % 9973) as f64;
    let mut k = 0u64;
    while pairs.len() < budget {
        let t = offset + k as f64;
        let u = (0.5 + t * A1).fract();
        let v = (0.5 + t * A2).fract();
        let i = ((u * n as f64) as usize).min(n - 1);
        let j = ((v * n as f64) as usize).min(n - 1);
        pairs.push((i.min(j), i.max(j)));
        k += 1;
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_endpoints_and_size() {
        let g = crate::defaults::classify_grid();
        let xs = g.x_lattice();
        assert_eq!(xs.len(), 2001);
        assert!((xs[0] - 1e-6).abs() < 1e-18);
        assert!((xs[2000] - 1e6).abs() < 1e-4);
        // the midpoint of the log lattice is exactly 1
        assert!((xs[1000] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_lattice_excludes_endpoints_and_hits_half() {
        let g = crate::defaults::classify_grid();
        let th = g.theta_lattice();
        assert_eq!(th.len(), 199);
        assert!(th[0] > 0.0 && th[198] < 1.0);
        assert!((th[0] - 0.005).abs() < 1e-15);
        assert!((th[99] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_validation_rejects_bad_windows() {
        let mut g = crate::defaults::classify_grid();
        g.x_lo = -1.0;
        assert!(g.validate().is_err());
        let mut g = crate::defaults::classify_grid();
        g.n_x = 1;
        assert!(g.validate().is_err());
    }

    #[test]
    fn pair_budget_is_respected_and_deterministic() {
        let a = pair_indices(2001, 1000, 7);
        let b = pair_indices(2001, 1000, 7);
        assert_eq!(a.len(), 1000);
        assert_eq!(a, b);
        let c = pair_indices(10, 1000, 7);
        assert_eq!(c.len(), 55); // full upper triangle
    }
}
