//! Default resolution contract shared by the library, the CLI and the
//! acceptance suite. The CLI reproduces these exactly when no overrides
//! are given.

use crate::numerics::{GridSpec, Spacing};

/// Lower end of the default evaluation window.
pub const X_LO: f64 = 1e-6;
/// Upper end of the default evaluation window.
pub const X_HI: f64 = 1e6;
/// Points in the default log lattice for classification scans.
pub const N_X: usize = 2001;
/// Uniform theta lattice size on (0, 1): {0.005, 0.010, ..., 0.995}.
pub const THETA_POINTS: usize = 199;
/// Violation tolerance for grid verdicts.
pub const TOL: f64 = 1e-9;
/// Cap on (x, y) pairs scanned by two-variable shape checks.
pub const PAIR_BUDGET: usize = 200_000;

/// Compositions through quantiles are clipped to the probability range
/// [CLIP_EPS, 1 - CLIP_EPS]; the transforms diverge at 0 and 1.
pub const CLIP_EPS: f64 = 1e-9;
/// Tolerance for CDF limit probes in validation. Heavy tails approach
/// their limits arbitrarily slowly, so this is looser than `TOL`.
pub const LIMIT_TOL: f64 = 1e-6;

/// Initial cell count for quantile-spaced Stieltjes quadrature.
pub const QUAD_CELLS: usize = 20_000;
/// Successive-estimate agreement required of the quadrature refinement.
pub const QUAD_REFINE_TOL: f64 = 1e-8;
/// Maximum number of grid doublings before reporting an accuracy error.
pub const QUAD_MAX_REFINES: usize = 6;

/// Dominance gap threshold. The exact-convolution path targets 1e-6
/// absolute accuracy, so gaps below this cannot be resolved.
pub const GAP_TOL: f64 = 1e-6;
/// Points in the default dominance evaluation lattice.
pub const DOMINANCE_N_X: usize = 201;

/// Default Monte Carlo sample count.
pub const MC_SAMPLES: usize = 100_000;
/// Default DKW band level.
pub const MC_ALPHA: f64 = 0.01;
/// Default RNG seed.
pub const SEED: u64 = 42;

/// Truncated-mean cutoffs: one per decade from 1e2 to 1e10.
pub fn mean_cutoffs() -> Vec<f64> {
    (2..=10).map(|k| 10f64.powi(k)).collect()
}

/// The 2001 x 199 log lattice used by classification and order checks.
pub fn classify_grid() -> GridSpec {
    GridSpec {
        x_lo: X_LO,
        x_hi: X_HI,
        n_x: N_X,
        spacing: Spacing::Log,
        theta_points: THETA_POINTS,
        tol: TOL,
        pair_budget: PAIR_BUDGET,
    }
}

/// Coarser lattice for dominance gap curves; each gap point costs a
/// full convolution quadrature.
pub fn dominance_grid() -> GridSpec {
    GridSpec {
        n_x: DOMINANCE_N_X,
        ..classify_grid()
    }
}
