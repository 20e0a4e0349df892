//! One-dimensional wave equation u_tt = 3·u_xx on [−5,5]×[0,6]. The exact
//! solution is four sech packets travelling at speed √3; the initial data is
//! its t = 0 trace with zero initial velocity, and the ends are pinned to 0.

use std::sync::Arc;

use crate::deriv::{DerivativeBasis, Jet};

use super::{BoundaryCondition, BoundaryOp, Domain, FaceSet, ProblemSpec, ResidualForm};

pub const SPEED_SQ: f64 = 3.0;

fn sech(v: f64) -> f64 {
    1.0 / v.cosh()
}

/// Exact solution: a superposition of outward-propagating sech packets.
pub fn exact(x: f64, t: f64) -> f64 {
    let s = SPEED_SQ.sqrt();
    0.5 * sech(2.0 * (x - s * t)) - 0.5 * sech(2.0 * (x - 10.0 + s * t))
        + 0.5 * sech(2.0 * (x + s * t))
        - 0.5 * sech(2.0 * (x + 10.0 - s * t))
}

fn packet(x: &Jet<f64>, t: &Jet<f64>, x_shift: f64, t_sign: f64, weight: f64) -> Jet<f64> {
    let basis = x.basis();
    let s = SPEED_SQ.sqrt();
    let arg = (x.clone() + t.scale(t_sign * s) - Jet::constant(basis, 0.0, x_shift)).scale(2.0);
    arg.sech().scale(weight)
}

fn exact_jet(jets: &[Jet<f64>]) -> Jet<f64> {
    let (x, t) = (&jets[0], &jets[1]);
    packet(x, t, 0.0, -1.0, 0.5)
        + packet(x, t, 10.0, 1.0, -0.5)
        + packet(x, t, 0.0, 1.0, 0.5)
        + packet(x, t, -10.0, -1.0, -0.5)
}

pub fn make_wave() -> ProblemSpec {
    let basis = DerivativeBasis::closure(2, &[vec![2, 0], vec![0, 2]]).unwrap();
    let u_xx = basis.second_deriv(0).unwrap();
    let u_tt = basis.second_deriv(1).unwrap();
    ProblemSpec {
        name: "wave",
        dimension: 2,
        domain: Domain::new(vec![(-5.0, 5.0), (0.0, 6.0)]),
        basis,
        residual: ResidualForm::Wave { speed_sq: SPEED_SQ, u_tt, u_xx },
        forcing: Arc::new(|_| 0.0),
        exact_u: Arc::new(|p: &[f64]| exact(p[0], p[1])),
        exact_jet: Arc::new(exact_jet),
        boundary: vec![
            BoundaryCondition {
                op: BoundaryOp::Value,
                faces: FaceSet::InitialTime,
                target: Arc::new(|p: &[f64]| exact(p[0], 0.0)),
            },
            BoundaryCondition {
                op: BoundaryOp::TimeDerivative,
                faces: FaceSet::InitialTime,
                target: Arc::new(|_| 0.0),
            },
            BoundaryCondition {
                op: BoundaryOp::Value,
                faces: FaceSet::SpatialEnds,
                target: Arc::new(|_| 0.0),
            },
        ],
        time_axis: Some(1),
    }
}
