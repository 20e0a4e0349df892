//! Relative L2 error and per-case test sets.

use rayon::prelude::*;

use crate::network::{forward_scalar1, MlpSpec, ParamVector};
use crate::problems::ProblemSpec;
use crate::{Error, Result};

/// ‖predicted − exact‖₂ / ‖exact‖₂.
pub fn relative_l2(predicted: &[f64], exact: &[f64]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != exact.len() {
        return Err(Error::DimensionMismatch { expected: exact.len(), got: predicted.len() });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, e) in predicted.iter().zip(exact) {
        num += (p - e) * (p - e);
        den += e * e;
    }
    if den == 0.0 {
        return Err(Error::ZeroExactNorm);
    }
    Ok((num / den).sqrt())
}

/// Evaluation grid plus reference values.
pub struct TestSet {
    pub points: Vec<Vec<f64>>,
    pub exact: Vec<f64>,
}

/// Number of points per axis on gridded test sets.
pub const GRID_N: usize = 201;

/// Seeded point count for the high-dimensional case.
pub const HIGHDIM_TEST_POINTS: usize = 10_000;

/// 2-D cases (steady or space-time) get a 201×201 uniform grid including the
/// box faces; the 10-D case gets seeded uniform points.
pub fn build_test_set(problem: &ProblemSpec, seed: u64) -> TestSet {
    let points: Vec<Vec<f64>> = if problem.dimension == 2 {
        let (x_lo, x_hi) = problem.domain.bounds[0];
        let (y_lo, y_hi) = problem.domain.bounds[1];
        let mut pts = Vec::with_capacity(GRID_N * GRID_N);
        for i in 0..GRID_N {
            let x = x_lo + (x_hi - x_lo) * i as f64 / (GRID_N - 1) as f64;
            for j in 0..GRID_N {
                let y = y_lo + (y_hi - y_lo) * j as f64 / (GRID_N - 1) as f64;
                pts.push(vec![x, y]);
            }
        }
        pts
    } else {
        let mut rng = crate::rng::seeded_rng(seed);
        (0..HIGHDIM_TEST_POINTS).map(|_| problem.domain.sample(&mut rng)).collect()
    };
    let exact: Vec<f64> = points.par_iter().map(|p| (problem.exact_u)(p)).collect();
    TestSet { points, exact }
}

/// Network predictions over a test set, evaluated in parallel.
pub fn predict(spec: &MlpSpec, params: &ParamVector, test: &TestSet) -> Result<Vec<f64>> {
    test.points
        .par_iter()
        .map(|p| forward_scalar1(spec, params, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_burgers, make_highdim, make_single_peak};
    use approx::assert_relative_eq;

    #[test]
    fn relative_l2_examples() {
        assert_eq!(relative_l2(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(relative_l2(&[2.0, 4.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_relative_eq!(
            relative_l2(&[1.0, 2.0], &[1.0, 1.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-15
        );
        assert!(matches!(relative_l2(&[1.0], &[0.0]), Err(Error::ZeroExactNorm)));
        assert!(relative_l2(&[], &[]).is_err());
    }

    #[test]
    fn relative_l2_is_scale_covariant() {
        let mut rng = crate::rng::seeded_rng(8);
        use rand::Rng;
        let p: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let e: Vec<f64> = (0..40).map(|_| rng.gen_range(0.5..2.0)).collect();
        let base = relative_l2(&p, &e).unwrap();
        for alpha in [-3.0, 0.25, 7.5] {
            let ps: Vec<f64> = p.iter().map(|v| alpha * v).collect();
            let es: Vec<f64> = e.iter().map(|v| alpha * v).collect();
            assert_relative_eq!(relative_l2(&ps, &es).unwrap(), base, max_relative = 1e-12);
        }
    }

    #[test]
    fn single_peak_test_set_shape() {
        let problem = make_single_peak();
        let ts = build_test_set(&problem, 0);
        assert_eq!(ts.points.len(), 40_401);
        // the peak lands exactly on a grid node
        let idx = ts
            .points
            .iter()
            .position(|p| p[0] == 0.5 && p[1] == 0.5)
            .expect("grid contains (0.5, 0.5)");
        assert_eq!(ts.exact[idx], 1.0);
    }

    #[test]
    fn highdim_test_set_is_seeded() {
        let problem = make_highdim();
        let a = build_test_set(&problem, 5);
        let b = build_test_set(&problem, 5);
        assert_eq!(a.points, b.points);
        assert_eq!(a.points.len(), HIGHDIM_TEST_POINTS);
        let c = build_test_set(&problem, 6);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn burgers_grid_includes_final_time_row() {
        let problem = make_burgers();
        let ts = build_test_set(&problem, 0);
        let t1: Vec<usize> = (0..ts.points.len()).filter(|&i| ts.points[i][1] == 1.0).collect();
        assert_eq!(t1.len(), GRID_N);
        // the t=1 values come from the reference oracle
        for &i in t1.iter().step_by(40) {
            let x = ts.points[i][0];
            assert_eq!(ts.exact[i], crate::problems::burgers_reference(x, 1.0));
        }
    }
}
