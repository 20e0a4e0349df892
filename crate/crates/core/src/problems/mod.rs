//! The benchmark PDEs as data: domain box, residual operator over jets,
//! boundary/initial conditions, exact solutions and manufactured forcings.

pub mod biharmonic;
pub mod burgers;
pub mod highdim;
pub mod poisson;
pub mod wave;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::deriv::{DerivativeBasis, Jet, Scalar};
use crate::{Error, Result};

pub use biharmonic::make_biharmonic;
pub use burgers::{burgers_reference, burgers_reference_n, make_burgers};
pub use highdim::make_highdim;
pub use poisson::{make_dual_peak, make_single_peak};
pub use wave::make_wave;

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type JetFn = Arc<dyn Fn(&[Jet<f64>]) -> Jet<f64> + Send + Sync>;

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        assert!(bounds.iter().all(|(lo, hi)| lo < hi), "degenerate domain box");
        Self { bounds }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.bounds.len()
            && point.iter().zip(&self.bounds).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn clamp(&self, point: &mut [f64]) {
        for (x, (lo, hi)) in point.iter_mut().zip(&self.bounds) {
            *x = x.clamp(*lo, *hi);
        }
    }

    /// One uniform point; coordinates drawn in axis order.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect()
    }
}

/// Boundary operators appearing in the benchmark set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryOp {
    /// u = g (Dirichlet, also initial values).
    Value,
    /// Δu = h (the biharmonic auxiliary condition).
    Laplacian,
    /// ∂u/∂t = g on the initial face.
    TimeDerivative,
}

/// Which faces a boundary condition lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSet {
    /// Every face of the box (elliptic problems).
    AllFaces,
    /// The two ends of the spatial axis (time-dependent 1-D problems).
    SpatialEnds,
    /// The t = t_lo face.
    InitialTime,
}

/// One declared boundary condition.
pub struct BoundaryCondition {
    pub op: BoundaryOp,
    pub faces: FaceSet,
    pub target: PointFn,
}

/// Sampled points for one boundary condition.
#[derive(Debug, Clone)]
pub struct BoundaryBatch {
    pub points: Vec<Vec<f64>>,
    pub op: BoundaryOp,
    pub targets: Vec<f64>,
}

/// Residual operators, with coefficient positions resolved against the
/// problem's derivative basis at construction time.
#[derive(Debug, Clone)]
pub enum ResidualForm {
    /// −Δu − f.
    NegLaplacian { second: Vec<usize> },
    /// u_t + u·u_x − ν·u_xx.
    Burgers { nu: f64, u_x: usize, u_t: usize, u_xx: usize },
    /// u_tt − c²·u_xx.
    Wave { speed_sq: f64, u_tt: usize, u_xx: usize },
    /// Δ²u − f.
    Biharmonic { x4: usize, y4: usize, x2y2: usize },
}

impl ResidualForm {
    /// Residual from raw jet coefficients.
    pub fn eval_coeffs(&self, c: &[f64], forcing: f64) -> f64 {
        match self {
            ResidualForm::NegLaplacian { second } => {
                let mut lap = 0.0;
                for &i in second {
                    lap += c[i];
                }
                -lap - forcing
            }
            ResidualForm::Burgers { nu, u_x, u_t, u_xx } => {
                c[*u_t] + c[0] * c[*u_x] - nu * c[*u_xx]
            }
            ResidualForm::Wave { speed_sq, u_tt, u_xx } => c[*u_tt] - speed_sq * c[*u_xx],
            ResidualForm::Biharmonic { x4, y4, x2y2 } => {
                c[*x4] + 2.0 * c[*x2y2] + c[*y4] - forcing
            }
        }
    }

    /// ∂residual/∂coefficients, accumulated into `out` (which is zeroed).
    pub fn adjoint_coeffs(&self, c: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        match self {
            ResidualForm::NegLaplacian { second } => {
                for &i in second {
                    out[i] = -1.0;
                }
            }
            ResidualForm::Burgers { nu, u_x, u_t, u_xx } => {
                out[*u_t] = 1.0;
                out[0] += c[*u_x];
                out[*u_x] += c[0];
                out[*u_xx] = -nu;
            }
            ResidualForm::Wave { speed_sq, u_tt, u_xx } => {
                out[*u_tt] = 1.0;
                out[*u_xx] = -speed_sq;
            }
            ResidualForm::Biharmonic { x4, y4, x2y2 } => {
                out[*x4] = 1.0;
                out[*x2y2] = 2.0;
                out[*y4] = 1.0;
            }
        }
    }

    /// Generic evaluation on a jet; the reference path for tests and the
    /// tape-recorded gradient route.
    pub fn eval_jet<S: Scalar>(&self, u: &Jet<S>, forcing: S) -> S {
        let c = u.coeffs();
        match self {
            ResidualForm::NegLaplacian { second } => {
                let mut lap = S::lift(forcing, 0.0);
                for &i in second {
                    lap = lap + c[i];
                }
                -lap - forcing
            }
            ResidualForm::Burgers { nu, u_x, u_t, u_xx } => {
                c[*u_t] + c[0] * c[*u_x] - S::lift(forcing, *nu) * c[*u_xx]
            }
            ResidualForm::Wave { speed_sq, u_tt, u_xx } => {
                c[*u_tt] - S::lift(forcing, *speed_sq) * c[*u_xx]
            }
            ResidualForm::Biharmonic { x4, y4, x2y2 } => {
                c[*x4] + S::lift(forcing, 2.0) * c[*x2y2] + c[*y4] - forcing
            }
        }
    }
}

/// A benchmark PDE: everything the trainer, samplers and harness need.
pub struct ProblemSpec {
    pub name: &'static str,
    pub dimension: usize,
    pub domain: Domain,
    pub basis: Arc<DerivativeBasis>,
    pub residual: ResidualForm,
    /// Forcing f(x); identically zero for the homogeneous cases.
    pub forcing: PointFn,
    /// Exact solution (or reference oracle for Burgers).
    pub exact_u: PointFn,
    /// Exact solution evaluated in jet arithmetic, for residual identities.
    pub exact_jet: JetFn,
    pub boundary: Vec<BoundaryCondition>,
    /// Index of the time axis, when the problem is time-dependent.
    pub time_axis: Option<usize>,
}

impl ProblemSpec {
    /// Residual of the exact solution at a point, via the jet engine: the
    /// manufactured-solution identity makes this (near) zero.
    pub fn residual_of_exact(&self, point: &[f64]) -> Result<f64> {
        let jets = crate::deriv::seed_coordinates(point, &self.basis)?;
        let u = (self.exact_jet)(&jets);
        Ok(self.residual.eval_coeffs(u.coeffs(), (self.forcing)(point)))
    }

    fn faces(&self, set: FaceSet) -> Vec<(usize, bool)> {
        match set {
            FaceSet::AllFaces => {
                let mut faces = Vec::with_capacity(2 * self.dimension);
                for axis in 0..self.dimension {
                    faces.push((axis, false));
                    faces.push((axis, true));
                }
                faces
            }
            FaceSet::SpatialEnds => vec![(0, false), (0, true)],
            FaceSet::InitialTime => {
                vec![(self.time_axis.expect("initial face on a steady problem"), false)]
            }
        }
    }

    fn face_point(&self, axis: usize, upper: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut p = self.domain.sample(rng);
        let (lo, hi) = self.domain.bounds[axis];
        p[axis] = if upper { hi } else { lo };
        p
    }
}

/// Sample boundary batches for a problem.
///
/// Steady problems: every declared condition independently receives `count`
/// points split evenly across its faces (remainders go to the earliest
/// faces). Time-dependent problems: the initial face takes half of `count`
/// (shared by all initial-face conditions), the spatial ends split the rest.
pub fn sample_boundary(
    problem: &ProblemSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<BoundaryBatch>> {
    if count == 0 {
        return Err(Error::EmptyInput { context: "boundary sample".into() });
    }
    let mut rng = crate::rng::seeded_rng(seed);
    let mut batches = Vec::new();

    if problem.time_axis.is_some() {
        let initial_count = count / 2;
        let spatial_total = count - initial_count;

        let initial_points: Vec<Vec<f64>> = {
            let faces = problem.faces(FaceSet::InitialTime);
            (0..initial_count)
                .map(|_| problem.face_point(faces[0].0, faces[0].1, &mut rng))
                .collect()
        };
        for cond in problem.boundary.iter().filter(|c| c.faces == FaceSet::InitialTime) {
            let targets = initial_points.iter().map(|p| (cond.target)(p)).collect();
            batches.push(BoundaryBatch {
                points: initial_points.clone(),
                op: cond.op,
                targets,
            });
        }

        for cond in problem.boundary.iter().filter(|c| c.faces == FaceSet::SpatialEnds) {
            let faces = problem.faces(FaceSet::SpatialEnds);
            let mut points = Vec::with_capacity(spatial_total);
            for (i, &(axis, upper)) in faces.iter().enumerate() {
                let share =
                    spatial_total / faces.len() + usize::from(i < spatial_total % faces.len());
                for _ in 0..share {
                    points.push(problem.face_point(axis, upper, &mut rng));
                }
            }
            let targets = points.iter().map(|p| (cond.target)(p)).collect();
            batches.push(BoundaryBatch { points, op: cond.op, targets });
        }
    } else {
        for cond in &problem.boundary {
            let faces = problem.faces(cond.faces);
            let mut points = Vec::with_capacity(count);
            for (i, &(axis, upper)) in faces.iter().enumerate() {
                let share = count / faces.len() + usize::from(i < count % faces.len());
                for _ in 0..share {
                    points.push(problem.face_point(axis, upper, &mut rng));
                }
            }
            let targets = points.iter().map(|p| (cond.target)(p)).collect();
            batches.push(BoundaryBatch { points, op: cond.op, targets });
        }
    }
    Ok(batches)
}

/// All six cases, for sweep-style iteration.
pub fn all_cases() -> Vec<ProblemSpec> {
    vec![
        make_single_peak(),
        make_dual_peak(),
        make_burgers(),
        make_wave(),
        make_highdim(),
        make_biharmonic(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_peak_boundary_allocation() {
        let p = make_single_peak();
        let batches = sample_boundary(&p, 400, 3).unwrap();
        assert_eq!(batches.len(), 1);
        let b = &batches[0];
        assert_eq!(b.points.len(), 400);
        // 100 per edge, exactly on the face
        for axis in 0..2 {
            for upper in [false, true] {
                let bound = if upper { 1.0 } else { -1.0 };
                let n = b.points.iter().filter(|pt| pt[axis] == bound).count();
                assert_eq!(n, 100);
            }
        }
        // targets are the exact solution on the edge
        for (pt, t) in b.points.iter().zip(&b.targets) {
            assert_eq!(*t, (p.exact_u)(pt));
        }
    }

    #[test]
    fn burgers_boundary_allocation() {
        let p = make_burgers();
        let batches = sample_boundary(&p, 400, 1).unwrap();
        // IC batch + Dirichlet batch
        assert_eq!(batches.len(), 2);
        let ic = &batches[0];
        assert_eq!(ic.op, BoundaryOp::Value);
        assert_eq!(ic.points.len(), 200);
        for (pt, t) in ic.points.iter().zip(&ic.targets) {
            assert_eq!(pt[1], 0.0);
            assert_eq!(*t, -(std::f64::consts::PI * pt[0]).sin());
        }
        let dir = &batches[1];
        assert_eq!(dir.points.len(), 200);
        let left = dir.points.iter().filter(|pt| pt[0] == -1.0).count();
        let right = dir.points.iter().filter(|pt| pt[0] == 1.0).count();
        assert_eq!((left, right), (100, 100));
        assert!(dir.targets.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn boundary_sampling_is_deterministic() {
        let p = make_dual_peak();
        let a = sample_boundary(&p, 40, 9).unwrap();
        let b = sample_boundary(&p, 40, 9).unwrap();
        assert_eq!(a[0].points, b[0].points);
        let c = sample_boundary(&p, 40, 10).unwrap();
        assert_ne!(a[0].points, c[0].points);
    }

    #[test]
    fn biharmonic_has_two_terms_with_count_each() {
        let p = make_biharmonic();
        let batches = sample_boundary(&p, 100, 5).unwrap();
        assert_eq!(batches.len(), 2);
        assert_eq!(batches[0].op, BoundaryOp::Value);
        assert_eq!(batches[1].op, BoundaryOp::Laplacian);
        assert_eq!(batches[0].points.len(), 100);
        assert_eq!(batches[1].points.len(), 100);
    }

    #[test]
    fn wave_initial_conditions_share_points() {
        let p = make_wave();
        let batches = sample_boundary(&p, 400, 2).unwrap();
        assert_eq!(batches.len(), 3);
        assert_eq!(batches[0].op, BoundaryOp::Value);
        assert_eq!(batches[1].op, BoundaryOp::TimeDerivative);
        assert_eq!(batches[0].points, batches[1].points);
        assert!(batches[1].targets.iter().all(|&t| t == 0.0));
        assert_eq!(batches[2].points.len(), 200);
    }

    #[test]
    fn domain_clamp_and_contains() {
        let d = Domain::new(vec![(-1.0, 1.0), (0.0, 2.0)]);
        let mut p = vec![1.5, -0.3];
        d.clamp(&mut p);
        assert_eq!(p, vec![1.0, 0.0]);
        assert!(d.contains(&p));
        assert!(!d.contains(&[1.1, 0.5]));
    }
}
