//! Derivative stacks f(v), f'(v), ..., f''''(v) for the elementary functions
//! jets can pass through. tanh and sech derivatives come from the closed
//! recurrences tanh' = 1 − tanh², sech' = −sech·tanh, expanded once into
//! coefficient tables at first use; every order is then exact.

use std::sync::OnceLock;

use super::basis::MAX_ORDER;
use super::scalar::Scalar;

/// Number of stacked derivatives: value + orders 1..=4.
pub const STACK: usize = MAX_ORDER + 1;

/// One extra order: the reverse sweep through a composition needs the
/// derivative of the composition factor itself, which reaches order 5.
pub const STACK_EXT: usize = MAX_ORDER + 2;

/// Coefficients of d^k/dv^k tanh(v) as a polynomial in t = tanh(v).
/// Built by repeated differentiation: p_{k+1}(t) = p_k'(t) · (1 − t²).
fn tanh_polys() -> &'static [Vec<f64>; STACK_EXT] {
    static POLYS: OnceLock<[Vec<f64>; STACK_EXT]> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys: [Vec<f64>; STACK_EXT] = Default::default();
        polys[0] = vec![0.0, 1.0]; // p_0(t) = t
        for k in 1..STACK_EXT {
            let prev = polys[k - 1].clone();
            // q = prev' ; next = q - t^2 * q
            let mut q = vec![0.0; prev.len().saturating_sub(1).max(1)];
            for (j, &c) in prev.iter().enumerate().skip(1) {
                q[j - 1] += c * j as f64;
            }
            let mut next = vec![0.0; q.len() + 2];
            for (j, &c) in q.iter().enumerate() {
                next[j] += c;
                next[j + 2] -= c;
            }
            polys[k] = next;
        }
        polys
    })
}

/// tanh derivative stack including order 5, for reverse sweeps.
pub fn tanh_derivs_ext<S: Scalar>(v: S) -> [S; STACK_EXT] {
    let t = v.tanh();
    let polys = tanh_polys();
    std::array::from_fn(|k| eval_poly(&polys[k], t))
}

/// Terms of d^k/dv^k sech(v) as sums of c · sech^a(v) · tanh^b(v).
/// Differentiation maps s^a t^b to −a·s^a·t^{b+1} + b·s^{a+2}·t^{b−1}.
fn sech_terms() -> &'static [Vec<(u8, u8, f64)>; STACK] {
    static TERMS: OnceLock<[Vec<(u8, u8, f64)>; STACK]> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut all: [Vec<(u8, u8, f64)>; STACK] = Default::default();
        all[0] = vec![(1, 0, 1.0)];
        for k in 1..STACK {
            let mut next: Vec<(u8, u8, f64)> = Vec::new();
            let mut push = |a: u8, b: u8, c: f64| {
                if let Some(e) = next.iter_mut().find(|e| e.0 == a && e.1 == b) {
                    e.2 += c;
                } else {
                    next.push((a, b, c));
                }
            };
            for &(a, b, c) in &all[k - 1] {
                push(a, b + 1, -c * f64::from(a));
                if b > 0 {
                    push(a + 2, b - 1, c * f64::from(b));
                }
            }
            all[k] = next;
        }
        all
    })
}

fn eval_poly<S: Scalar>(coeffs: &[f64], x: S) -> S {
    let mut acc = S::lift(x, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * x + S::lift(x, c);
    }
    acc
}

pub fn tanh_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let t = v.tanh();
    let polys = tanh_polys();
    std::array::from_fn(|k| eval_poly(&polys[k], t))
}

pub fn exp_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let e = v.exp();
    [e; STACK]
}

pub fn sin_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let s = v.sin();
    let c = v.cos();
    [s, c, -s, -c, s]
}

pub fn cos_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let s = v.sin();
    let c = v.cos();
    [c, -s, -c, s, c]
}

pub fn sech_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let s = v.sech();
    let t = v.tanh();
    let terms = sech_terms();
    std::array::from_fn(|k| {
        let mut acc = S::lift(v, 0.0);
        for &(a, b, c) in &terms[k] {
            let mut term = S::lift(v, c);
            for _ in 0..a {
                term = term * s;
            }
            for _ in 0..b {
                term = term * t;
            }
            acc = acc + term;
        }
        acc
    })
}

/// Derivatives of √v; caller guarantees v > 0.
pub fn sqrt_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let r = v.sqrt();
    let half = S::lift(v, 0.5);
    let d1 = half / r;
    let d2 = S::lift(v, -0.25) / (r * v);
    let d3 = S::lift(v, 0.375) / (r * v * v);
    let d4 = S::lift(v, -0.9375) / (r * v * v * v);
    [r, d1, d2, d3, d4]
}

/// Derivatives of 1/v; caller guarantees v ≠ 0. d^k = (−1)^k k! / v^{k+1}.
pub fn recip_derivs<S: Scalar>(v: S) -> [S; STACK] {
    let r = S::lift(v, 1.0) / v;
    let mut out = [r; STACK];
    let mut sign = 1.0;
    let mut fact = 1.0;
    let mut pow = r;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            sign = -sign;
            fact *= k as f64;
            pow = pow * r;
        }
        *slot = pow * S::lift(v, sign * fact);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd4<F: Fn(f64) -> f64>(f: F, x: f64) -> [f64; STACK] {
        let h1 = 1e-6;
        let h2 = 1e-4;
        let h3 = 1e-3;
        let h4 = 1e-2;
        [
            f(x),
            (f(x + h1) - f(x - h1)) / (2.0 * h1),
            (f(x + h2) - 2.0 * f(x) + f(x - h2)) / (h2 * h2),
            (f(x + 2.0 * h3) - 2.0 * f(x + h3) + 2.0 * f(x - h3) - f(x - 2.0 * h3))
                / (2.0 * h3 * h3 * h3),
            (f(x + 2.0 * h4) - 4.0 * f(x + h4) + 6.0 * f(x) - 4.0 * f(x - h4) + f(x - 2.0 * h4))
                / (h4 * h4 * h4 * h4),
        ]
    }

    fn check<F: Fn(f64) -> f64>(analytic: [f64; STACK], f: F, x: f64) {
        let fd = fd4(&f, x);
        let tols = [1e-12, 1e-7, 1e-5, 1e-3, 1e-2];
        for k in 0..STACK {
            let scale = fd[k].abs().max(1.0);
            assert!(
                (analytic[k] - fd[k]).abs() <= tols[k] * scale,
                "order {k}: analytic {} vs fd {}",
                analytic[k],
                fd[k]
            );
        }
    }

    #[test]
    fn tanh_stack_matches_finite_differences() {
        for &x in &[0.0, 0.3, -1.1, 2.0] {
            check(tanh_derivs(x), f64::tanh, x);
        }
    }

    #[test]
    fn tanh_stack_at_zero_is_known_series() {
        let d = tanh_derivs(0.0f64);
        assert_relative_eq!(d[0], 0.0);
        assert_relative_eq!(d[1], 1.0);
        assert_relative_eq!(d[2], 0.0);
        assert_relative_eq!(d[3], -2.0);
        assert_relative_eq!(d[4], 0.0);
    }

    #[test]
    fn sech_stack_matches_finite_differences() {
        for &x in &[0.0, 0.5, -1.3] {
            check(sech_derivs(x), |v| 1.0 / v.cosh(), x);
        }
    }

    #[test]
    fn sqrt_and_recip_stacks_match_finite_differences() {
        check(sqrt_derivs(2.3), f64::sqrt, 2.3);
        check(recip_derivs(1.7), |v| 1.0 / v, 1.7);
        check(recip_derivs(-0.8), |v| 1.0 / v, -0.8);
    }

    #[test]
    fn trig_and_exp_stacks_match_finite_differences() {
        check(sin_derivs(0.7), f64::sin, 0.7);
        check(cos_derivs(-0.4), f64::cos, -0.4);
        check(exp_derivs(0.9), f64::exp, 0.9);
    }
}
