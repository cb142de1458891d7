//! Property tests for the shape kernels and the distribution contract.

use heavytail::defaults;
use heavytail::dist::catalog::{Burr, Frechet, GeneralizedPareto, LogLogistic, Pareto};
use heavytail::numerics::{
    check_concave, check_convex, check_subadditive, stieltjes_integral, GridSpec,
};
use heavytail::{Distribution, Status};
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec {
        x_lo: 1e-3,
        x_hi: 1e3,
        n_x: 201,
        theta_points: 19,
        pair_budget: 20_000,
        ..defaults::classify_grid()
    }
}

/// Piecewise-linear concave function through the origin: decreasing
/// positive slopes on a fixed breakpoint ladder.
fn concave_pl(slopes: &[f64]) -> impl Fn(f64) -> f64 + Sync + '_ {
    move |x: f64| {
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (i, &s) in slopes.iter().enumerate() {
            let knot = 4.0f64.powi(i as i32 + 1) * 1e-3;
            if x <= knot {
                return acc + s * (x - prev);
            }
            acc += s * (knot - prev);
            prev = knot;
        }
        acc + slopes.last().unwrap() * 0.25 * (x - prev)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonnegative_concave_functions_are_subadditive(
        raw in prop::collection::vec(0.05f64..10.0, 4..10)
    ) {
        // sort slopes decreasing so the piecewise-linear curve is concave
        let mut slopes = raw;
        slopes.sort_by(|a, b| b.total_cmp(a));
        let v = concave_pl(&slopes);
        let verdict = check_subadditive(v, &grid()).unwrap();
        prop_assert_eq!(verdict.status, Status::Supported);
    }

    #[test]
    fn curved_quadratics_are_concave_xor_convex(
        a in prop::sample::select(vec![-3.0f64, -0.7, -0.01, 0.01, 0.7, 3.0]),
        b in -5.0f64..5.0,
        c in -5.0f64..5.0,
    ) {
        let v = |x: f64| a * x * x + b * x + c;
        let g = grid();
        let concave = check_concave(v, &g).unwrap();
        let convex = check_convex(v, &g).unwrap();
        if a > 0.0 {
            prop_assert_eq!(convex.status, Status::Supported);
            prop_assert_eq!(concave.status, Status::Violated);
        } else {
            prop_assert_eq!(concave.status, Status::Supported);
            prop_assert_eq!(convex.status, Status::Violated);
        }
    }

    #[test]
    fn stieltjes_matches_simpson_change_of_variables(
        c0 in -2.0f64..2.0,
        c1 in -1.0f64..1.0,
        hi in 3.0f64..40.0,
    ) {
        let d = Pareto;
        let f = move |t: f64| c0 + c1 * (1.0 + t).ln();
        let v = stieltjes_integral(f, &d, 1.0, hi).unwrap();
        let (u0, u1) = (d.cdf(1.0), d.cdf(hi));
        let n = 20_000;
        let h = (u1 - u0) / n as f64;
        let mut acc = f(d.quantile(u0)) + f(d.quantile(u1));
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(d.quantile(u0 + i as f64 * h));
        }
        acc *= h / 3.0;
        prop_assert!((v - acc).abs() <= 1e-6, "{} vs {}", v, acc);
    }

    #[test]
    fn quantile_galois_sandwich(u in 1e-6f64..0.999_999) {
        let dists: Vec<Box<dyn Distribution>> = vec![
            Box::new(Pareto),
            Box::new(Frechet),
            Box::new(Burr::new(0.5, 1.5).unwrap()),
            Box::new(LogLogistic::new(0.8).unwrap()),
            Box::new(GeneralizedPareto::new(1.5).unwrap()),
        ];
        for d in &dists {
            let q = d.quantile(u);
            prop_assert!(q.is_finite());
            prop_assert!(d.cdf_left(q) <= u + 1e-9, "{}: F-(Q) > u", d.name());
            prop_assert!(d.cdf(q) >= u - 1e-9, "{}: F(Q) < u", d.name());
        }
    }

    #[test]
    fn survival_and_cdf_are_complementary(x in 1e-6f64..1e6) {
        for d in heavytail::dist::catalog::default_catalog() {
            let s = d.survival(x) + d.cdf(x);
            prop_assert!((s - 1.0).abs() <= 1e-12, "{} at {x}: {s}", d.name());
        }
    }
}
