//! Ten-dimensional Poisson problem −Δu = f on [−1,1]¹⁰ with the sharply
//! decaying exact solution u = e^{−10‖x‖²}. The manufactured forcing is
//! f = (2ad − 4a²r²)u with a = 10, d = 10.

use std::sync::Arc;

use crate::deriv::{DerivativeBasis, Jet};

use super::poisson::gaussian_jet;
use super::{BoundaryCondition, BoundaryOp, Domain, FaceSet, PointFn, ProblemSpec, ResidualForm};

pub const DIM: usize = 10;
const DECAY: f64 = 10.0;

fn exact(p: &[f64]) -> f64 {
    let r2: f64 = p.iter().map(|x| x * x).sum();
    (-DECAY * r2).exp()
}

fn forcing(p: &[f64]) -> f64 {
    let r2: f64 = p.iter().map(|x| x * x).sum();
    (2.0 * DECAY * DIM as f64 - 4.0 * DECAY * DECAY * r2) * (-DECAY * r2).exp()
}

pub fn make_highdim() -> ProblemSpec {
    let mut requested = Vec::with_capacity(DIM);
    for axis in 0..DIM {
        let mut idx = vec![0u8; DIM];
        idx[axis] = 2;
        requested.push(idx);
    }
    let basis = DerivativeBasis::closure(DIM, &requested).unwrap();
    let second: Vec<usize> = (0..DIM).map(|a| basis.second_deriv(a).unwrap()).collect();
    let exact_fn: PointFn = Arc::new(exact);
    ProblemSpec {
        name: "high-dimension",
        dimension: DIM,
        domain: Domain::new(vec![(-1.0, 1.0); DIM]),
        basis,
        residual: ResidualForm::NegLaplacian { second },
        forcing: Arc::new(forcing),
        exact_u: Arc::clone(&exact_fn),
        exact_jet: Arc::new(|jets: &[Jet<f64>]| gaussian_jet(jets, &[0.0; DIM], DECAY)),
        boundary: vec![BoundaryCondition {
            op: BoundaryOp::Value,
            faces: FaceSet::AllFaces,
            target: exact_fn,
        }],
        time_axis: None,
    }
}
