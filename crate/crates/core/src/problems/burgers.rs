//! Viscous Burgers' equation u_t + u·u_x = ν·u_xx on [−1,1]×[0,1] with
//! u(x,0) = −sin(πx), homogeneous Dirichlet ends, ν = 0.01/π.
//!
//! There is no closed-form solution; the reference oracle evaluates the
//! Cole–Hopf representation by Gauss–Hermite quadrature. With the heat
//! kernel substitution η = x − 2√(νt)z,
//!
//!   u(x,t) = −Σᵢ wᵢ g(ηᵢ) sin(πηᵢ) / Σᵢ wᵢ g(ηᵢ),
//!   g(η) = exp[(1 − cos(πη)) / (2νπ)],
//!
//! with the largest exponent subtracted from numerator and denominator to
//! keep everything in range.

use std::f64::consts::PI;
use std::sync::Arc;
use std::sync::OnceLock;

use crate::deriv::{DerivativeBasis, Jet};

use super::{BoundaryCondition, BoundaryOp, Domain, FaceSet, PointFn, ProblemSpec, ResidualForm};

pub const VISCOSITY: f64 = 0.01 / PI;

/// Default quadrature size for reference values.
pub const DEFAULT_NODES: usize = 64;

/// Quadrature size for the jet-mode oracle; residual identities need the
/// integral's derivatives resolved much more finely than its values.
pub const JET_NODES: usize = 320;

/// Orthonormal Hermite recurrence: returns (h_n(z), h_n'(z)).
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let pim4 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j as f64 - 1.0) / j as f64).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Gauss–Hermite nodes and weights for ∫ e^{−z²} f(z) dz ≈ Σ wᵢ f(zᵢ).
///
/// Positive roots are bracketed by a sign scan at a quarter of the minimal
/// root spacing and polished by safeguarded Newton, then mirrored, so no
/// root can be skipped at large n. Nodes are exactly symmetric and sorted
/// ascending.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let zmax = (2.0 * n as f64 + 1.0).sqrt();
    let step = PI / (4.0 * zmax);

    let mut positive = Vec::with_capacity(n / 2 + 1);
    let mut prev_z = if n % 2 == 0 { 0.0 } else { step * 0.5 };
    let mut prev_v = hermite_orthonormal(n, prev_z).0;
    let mut z = prev_z + step;
    while z < zmax + 0.5 {
        let v = hermite_orthonormal(n, z).0;
        if prev_v == 0.0 {
            positive.push(prev_z);
        } else if v.signum() != prev_v.signum() {
            // safeguarded Newton inside [prev_z, z]
            let (mut lo, mut hi) = (prev_z, z);
            let sign_lo = prev_v.signum();
            let mut root = 0.5 * (lo + hi);
            for _ in 0..60 {
                let (p, dp) = hermite_orthonormal(n, root);
                if p.signum() == sign_lo {
                    lo = root;
                } else {
                    hi = root;
                }
                let newton = root - p / dp;
                let next =
                    if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                if (next - root).abs() <= 1e-15 * root.abs().max(1.0) {
                    root = next;
                    break;
                }
                root = next;
            }
            positive.push(root);
        }
        prev_z = z;
        prev_v = v;
        z += step;
    }
    assert_eq!(positive.len(), n / 2, "root scan miscounted Hermite roots");

    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let m = n / 2;
    for (j, &r) in positive.iter().enumerate() {
        let pp = hermite_orthonormal(n, r).1;
        let weight = 2.0 / (pp * pp);
        // ascending: negative mirror first, positive in the upper half
        x[m + j + n % 2] = r;
        w[m + j + n % 2] = weight;
        x[m - 1 - j] = -r;
        w[m - 1 - j] = weight;
    }
    if n % 2 == 1 {
        let pp = hermite_orthonormal(n, 0.0).1;
        x[m] = 0.0;
        w[m] = 2.0 / (pp * pp);
    }
    (x, w)
}

fn cached_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let map = RULES.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut guard = map.lock().unwrap();
    guard.entry(n).or_insert_with(|| Box::leak(Box::new(gauss_hermite(n))))
}

/// Initial condition −sin(πx).
pub fn initial_condition(x: f64) -> f64 {
    -(PI * x).sin()
}

/// Reference solution with an explicit quadrature size.
pub fn burgers_reference_n(x: f64, t: f64, nodes: usize) -> f64 {
    if t <= 0.0 {
        return initial_condition(x);
    }
    let (z, w) = cached_rule(nodes);
    let c = 2.0 * (VISCOSITY * t).sqrt();
    let scale = 1.0 / (2.0 * VISCOSITY * PI);

    let mut max_a = f64::NEG_INFINITY;
    let mut etas = Vec::with_capacity(nodes);
    for &zi in z {
        let eta = x - c * zi;
        let a = (1.0 - (PI * eta).cos()) * scale;
        max_a = max_a.max(a);
        etas.push((eta, a));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&wi, &(eta, a)) in w.iter().zip(&etas) {
        let g = (a - max_a).exp();
        num += wi * g * (PI * eta).sin();
        den += wi * g;
    }
    -num / den
}

/// Reference solution at (x, t) with the pinned 64-node rule; t = 0 returns
/// the initial condition directly.
pub fn burgers_reference(x: f64, t: f64) -> f64 {
    burgers_reference_n(x, t, DEFAULT_NODES)
}

/// Reference solution as a jet in (x, t), differentiating the quadrature
/// formula itself. Valid for t > 0.
pub fn burgers_reference_jet(
    point: &[f64],
    basis: &Arc<DerivativeBasis>,
    nodes: usize,
) -> crate::Result<Jet<f64>> {
    let jets = crate::deriv::seed_coordinates(point, basis)?;
    Ok(burgers_jet_from_coords(&jets, nodes))
}

fn burgers_jet_from_coords(jets: &[Jet<f64>], nodes: usize) -> Jet<f64> {
    let basis = jets[0].basis();
    let (x, t) = (&jets[0], &jets[1]);
    let (z, w) = cached_rule(nodes);
    let scale = 1.0 / (2.0 * VISCOSITY * PI);

    // c = 2√(νt)
    let c = t.scale(VISCOSITY).sqrt().scale(2.0);

    // first pass over plain values to find the exponent shift
    let (xv, tv) = (x.value(), t.value());
    let cv = 2.0 * (VISCOSITY * tv).sqrt();
    let mut max_a = f64::NEG_INFINITY;
    for &zi in z {
        let eta = xv - cv * zi;
        max_a = max_a.max((1.0 - (PI * eta).cos()) * scale);
    }

    let mut num = Jet::constant(basis, 0.0, 0.0);
    let mut den = Jet::constant(basis, 0.0, 0.0);
    for (&zi, &wi) in z.iter().zip(w) {
        let eta = x.clone() - c.scale(zi);
        let pe = eta.scale(PI);
        let a = (Jet::constant(basis, 0.0, 1.0) - pe.cos()).scale(scale);
        let g = (a - Jet::constant(basis, 0.0, max_a)).exp();
        num = num + g.clone().scale(wi) * pe.sin();
        den = den + g.scale(wi);
    }
    -(num.try_div(&den).expect("positive quadrature denominator"))
}

/// Burgers' problem definition.
pub fn make_burgers() -> ProblemSpec {
    let basis = DerivativeBasis::closure(2, &[vec![2, 0], vec![0, 1]]).unwrap();
    let u_x = basis.first_deriv(0).unwrap();
    let u_t = basis.first_deriv(1).unwrap();
    let u_xx = basis.second_deriv(0).unwrap();
    let exact: PointFn = Arc::new(|p: &[f64]| burgers_reference(p[0], p[1]));
    ProblemSpec {
        name: "burgers",
        dimension: 2,
        domain: Domain::new(vec![(-1.0, 1.0), (0.0, 1.0)]),
        basis,
        residual: ResidualForm::Burgers { nu: VISCOSITY, u_x, u_t, u_xx },
        forcing: Arc::new(|_| 0.0),
        exact_u: exact,
        exact_jet: Arc::new(|jets| burgers_jet_from_coords(jets, JET_NODES)),
        boundary: vec![
            BoundaryCondition {
                op: BoundaryOp::Value,
                faces: FaceSet::InitialTime,
                target: Arc::new(|p: &[f64]| initial_condition(p[0])),
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

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn quadrature_rule_integrates_known_moments() {
        for n in [16, 64, 256] {
            let (z, w) = gauss_hermite(n);
            let total: f64 = w.iter().sum();
            assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-12);
            let second: f64 = z.iter().zip(&w).map(|(zi, wi)| wi * zi * zi).sum();
            assert_relative_eq!(second, PI.sqrt() / 2.0, max_relative = 1e-12);
            // ∫ e^{−z²} cos z dz = √π e^{−1/4}
            let cosint: f64 = z.iter().zip(&w).map(|(zi, wi)| wi * zi.cos()).sum();
            assert_relative_eq!(cosint, PI.sqrt() * (-0.25f64).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn nodes_are_symmetric() {
        let (z, w) = gauss_hermite(64);
        for i in 0..32 {
            assert_eq!(z[i], -z[63 - i]);
            assert_eq!(w[i], w[63 - i]);
        }
    }

    #[test]
    fn initial_condition_values() {
        assert_relative_eq!(initial_condition(0.5), -1.0);
        assert_eq!(burgers_reference(0.5, 0.0), -1.0);
    }

    #[test]
    fn odd_symmetry() {
        let mut rng = crate::rng::seeded_rng(7);
        for _ in 0..50 {
            let x = rng.gen_range(-1.0..1.0);
            let t = rng.gen_range(0.0..1.0);
            let a = burgers_reference(x, t);
            let b = burgers_reference(-x, t);
            assert!((a + b).abs() < 1e-10, "u({x},{t})={a}, u({},{t})={b}", -x);
        }
        for &t in &[0.1, 0.5, 1.0] {
            assert!(burgers_reference(0.0, t).abs() < 1e-10);
        }
    }

    // value at (−0.5, 0.1) stays within 1e-4 of the refined 256-node rule
    #[test]
    fn refinement_consistency_at_spot() {
        let a = burgers_reference_n(-0.5, 0.1, 64);
        let b = burgers_reference_n(-0.5, 0.1, 256);
        assert!((a - b).abs() < 1e-4, "64-node {a} vs 256-node {b}");
    }

    #[test]
    fn matches_initial_condition_on_grid() {
        for i in 0..=100 {
            let x = -1.0 + 2.0 * i as f64 / 100.0;
            let diff = (burgers_reference(x, 0.0) - initial_condition(x)).abs();
            assert!(diff < 1e-6);
        }
    }

    #[test]
    fn small_time_limit_approaches_initial_condition() {
        for i in 1..20 {
            let x = -0.95 + 0.1 * i as f64;
            let u = burgers_reference(x, 1e-8);
            assert!((u - initial_condition(x)).abs() < 1e-3, "at x={x}");
        }
    }

    #[test]
    fn reference_jet_matches_reference_values_and_fd() {
        let basis = DerivativeBasis::closure(2, &[vec![2, 0], vec![0, 1]]).unwrap();
        let (x0, t0) = (-0.3, 0.4);
        let jet = burgers_reference_jet(&[x0, t0], &basis, 320).unwrap();
        let v64 = burgers_reference_n(x0, t0, 320);
        assert_relative_eq!(jet.value(), v64, max_relative = 1e-12);

        let h = 1e-5;
        let fd_x = (burgers_reference_n(x0 + h, t0, 320) - burgers_reference_n(x0 - h, t0, 320))
            / (2.0 * h);
        let got_x = jet.coeff(&[1, 0]).unwrap();
        assert!((got_x - fd_x).abs() <= 1e-5 * fd_x.abs().max(1.0));

        let fd_t = (burgers_reference_n(x0, t0 + h, 320) - burgers_reference_n(x0, t0 - h, 320))
            / (2.0 * h);
        let got_t = jet.coeff(&[0, 1]).unwrap();
        assert!((got_t - fd_t).abs() <= 1e-5 * fd_t.abs().max(1.0));
    }

    #[test]
    fn residual_identity_away_from_shock() {
        let p = make_burgers();
        let mut rng = crate::rng::seeded_rng(3);
        for _ in 0..10 {
            let pt = [rng.gen_range(-1.0..1.0), rng.gen_range(0.05..0.6)];
            let r = p.residual_of_exact(&pt).unwrap();
            assert!(r.abs() < 1e-5, "residual {r} at {pt:?}");
        }
    }
}
