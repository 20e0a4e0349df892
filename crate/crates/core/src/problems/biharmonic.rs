//! Fourth-order biharmonic problem Δ²u = f on [−1,1]² with
//! u = e^{−10(x²+y²)}, boundary data u = g and Δu = h on the box edges.
//! f and h are the printed closed forms for this solution:
//!   f = [160000(x²+y²)² − 64000(x²+y²) + 3200]·e^{−10(x²+y²)}
//!   h = [400(x²+y²) − 40]·e^{−10(x²+y²)}

use std::sync::Arc;

use crate::deriv::{DerivativeBasis, Jet};

use super::poisson::gaussian_jet;
use super::{BoundaryCondition, BoundaryOp, Domain, FaceSet, PointFn, ProblemSpec, ResidualForm};

const DECAY: f64 = 10.0;

fn r2_of(p: &[f64]) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

fn exact(p: &[f64]) -> f64 {
    (-DECAY * r2_of(p)).exp()
}

fn forcing(p: &[f64]) -> f64 {
    let r2 = r2_of(p);
    (160_000.0 * r2 * r2 - 64_000.0 * r2 + 3200.0) * (-DECAY * r2).exp()
}

/// The Δu boundary target.
pub fn laplacian_target(p: &[f64]) -> f64 {
    let r2 = r2_of(p);
    (400.0 * r2 - 40.0) * (-DECAY * r2).exp()
}

pub fn make_biharmonic() -> ProblemSpec {
    let basis =
        DerivativeBasis::closure(2, &[vec![4, 0], vec![0, 4], vec![2, 2]]).unwrap();
    let x4 = basis.index_of(&[4, 0]).unwrap();
    let y4 = basis.index_of(&[0, 4]).unwrap();
    let x2y2 = basis.index_of(&[2, 2]).unwrap();
    let exact_fn: PointFn = Arc::new(exact);
    ProblemSpec {
        name: "biharmonic",
        dimension: 2,
        domain: Domain::new(vec![(-1.0, 1.0), (-1.0, 1.0)]),
        basis,
        residual: ResidualForm::Biharmonic { x4, y4, x2y2 },
        forcing: Arc::new(forcing),
        exact_u: Arc::clone(&exact_fn),
        exact_jet: Arc::new(|jets: &[Jet<f64>]| gaussian_jet(jets, &[0.0, 0.0], DECAY)),
        boundary: vec![
            BoundaryCondition {
                op: BoundaryOp::Value,
                faces: FaceSet::AllFaces,
                target: exact_fn,
            },
            BoundaryCondition {
                op: BoundaryOp::Laplacian,
                faces: FaceSet::AllFaces,
                target: Arc::new(laplacian_target),
            },
        ],
        time_axis: None,
    }
}
