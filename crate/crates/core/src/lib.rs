//! Numerical verification toolkit for heavy-tailed distribution
//! classes, stochastic orders, and the dominance of a random variable
//! by convex combinations of its independent copies.
//!
//! The crate is organized around five pieces:
//!
//! - [`dist`]: the distribution abstraction and catalog (CDF, survival,
//!   generalized inverse, sampling, jumps, mass at +infinity);
//! - [`numerics`]: grids, verdicts, shape-property kernels
//!   (subadditivity, midpoint concavity/convexity, star-shapedness) and
//!   Riemann-Stieltjes integration;
//! - [`classifiers`]: membership predicates for the heavy-tail classes
//!   and the implication-chain consistency report;
//! - [`orders`]: pairwise comparators for the ordinary stochastic
//!   order, the convex transform order, and the inverted-subadditive
//!   order;
//! - [`dominance`]: verification of X <=_st theta_1 X_1 + ... +
//!   theta_n X_n by exact convolution (n = 2) and Monte Carlo (any n).
//!
//! Every verdict is relative to a [`GridSpec`]: "supported" always
//! means supported on that grid, never proved.

pub mod classifiers;
pub mod defaults;
pub mod dist;
pub mod dominance;
pub mod error;
pub mod numerics;
pub mod orders;

pub use dist::{parse_dist_spec, sample, validate_distribution, Dist, DistId, Distribution, Jump};
pub use error::{CoreError, Result};
pub use numerics::{GridSpec, Spacing, Status, Verdict, Witness};
