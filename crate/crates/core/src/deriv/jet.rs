//! Jets: a value plus the partial derivatives tracked by a
//! [`DerivativeBasis`], propagated through arithmetic by the Leibniz rule and
//! through elementary functions by truncated Taylor composition.
//!
//! Coefficients are raw derivative values (not divided by factorials), so
//! residual operators can read them off directly.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::basis::{DerivativeBasis, MAX_ORDER};
use super::elem;
use super::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Jet<S> {
    basis: Arc<DerivativeBasis>,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn new(basis: Arc<DerivativeBasis>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Self { basis, coeffs })
    }

    /// A constant: value `c`, all derivatives zero.
    pub fn constant(basis: &Arc<DerivativeBasis>, ctx: S, c: f64) -> Self {
        let mut coeffs = vec![S::lift(ctx, 0.0); basis.len()];
        coeffs[0] = S::lift(ctx, c);
        Self { basis: Arc::clone(basis), coeffs }
    }

    /// Wrap an already-lifted scalar as a constant jet.
    pub fn from_scalar(basis: &Arc<DerivativeBasis>, ctx: S, s: S) -> Self {
        let mut coeffs = vec![S::lift(ctx, 0.0); basis.len()];
        coeffs[0] = s;
        Self { basis: Arc::clone(basis), coeffs }
    }

    pub fn basis(&self) -> &Arc<DerivativeBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    /// Coefficient for a multi-index, if tracked.
    pub fn coeff(&self, idx: &[u8]) -> Option<S> {
        self.basis.index_of(idx).map(|i| self.coeffs[i])
    }

    fn same_basis(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis
    }

    fn assert_same_basis(&self, other: &Self) {
        assert!(self.same_basis(other), "jet basis mismatch");
    }

    pub fn scale(&self, c: f64) -> Self {
        let ctx = self.coeffs[0];
        let f = S::lift(ctx, c);
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|&x| x * f).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch);
        }
        Ok(self.clone() + other.clone())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch);
        }
        Ok(self.clone() * other.clone())
    }

    /// Division; fails when the divisor's value is zero.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        if !self.same_basis(other) {
            return Err(Error::BasisMismatch);
        }
        if other.coeffs[0].value() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.clone() * other.compose(&elem::recip_derivs(other.coeffs[0])))
    }

    /// Compose a univariate function given its derivative stack at this
    /// jet's value: out = Σ_k f⁽ᵏ⁾(v)/k! · (self − v)ᵏ, truncated to the
    /// basis. Exact on downward-closed bases.
    pub fn compose(&self, derivs: &[S; elem::STACK]) -> Self {
        let ctx = self.coeffs[0];
        let n = self.coeffs.len();
        let table = self.basis.product_table();

        // w = self with the value channel zeroed
        let mut w = self.coeffs.clone();
        w[0] = S::lift(ctx, 0.0);

        // Horner over w with Taylor-normalized coefficients
        let inv_fact = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        let mut acc = vec![S::lift(ctx, 0.0); n];
        acc[0] = derivs[MAX_ORDER] * S::lift(ctx, inv_fact[MAX_ORDER]);
        let mut tmp = vec![S::lift(ctx, 0.0); n];
        for k in (0..MAX_ORDER).rev() {
            for slot in tmp.iter_mut() {
                *slot = S::lift(ctx, 0.0);
            }
            for e in table {
                tmp[e.out] = tmp[e.out] + S::lift(ctx, e.coeff) * acc[e.left] * w[e.right];
            }
            tmp[0] = derivs[k] * S::lift(ctx, inv_fact[k]);
            std::mem::swap(&mut acc, &mut tmp);
        }
        Self { basis: Arc::clone(&self.basis), coeffs: acc }
    }

    pub fn tanh(&self) -> Self {
        self.compose(&elem::tanh_derivs(self.coeffs[0]))
    }

    pub fn exp(&self) -> Self {
        self.compose(&elem::exp_derivs(self.coeffs[0]))
    }

    pub fn sin(&self) -> Self {
        self.compose(&elem::sin_derivs(self.coeffs[0]))
    }

    pub fn cos(&self) -> Self {
        self.compose(&elem::cos_derivs(self.coeffs[0]))
    }

    /// 1 / cosh.
    pub fn sech(&self) -> Self {
        self.compose(&elem::sech_derivs(self.coeffs[0]))
    }

    /// Square root; caller guarantees a positive value.
    pub fn sqrt(&self) -> Self {
        self.compose(&elem::sqrt_derivs(self.coeffs[0]))
    }
}

impl Jet<f64> {
    /// Check all coefficients are finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Seed coordinate jets for a point: jet i carries value `point[i]`, a unit
/// first derivative along axis i, and zeros elsewhere.
pub fn seed_coordinates(point: &[f64], basis: &Arc<DerivativeBasis>) -> Result<Vec<Jet<f64>>> {
    seed_coordinates_in(0.0, point, basis)
}

/// Generic seeding; `ctx` fixes the scalar context (e.g. a tape).
pub fn seed_coordinates_in<S: Scalar>(
    ctx: S,
    point: &[f64],
    basis: &Arc<DerivativeBasis>,
) -> Result<Vec<Jet<S>>> {
    if point.len() != basis.dimension() {
        return Err(Error::DimensionMismatch { expected: basis.dimension(), got: point.len() });
    }
    let mut jets = Vec::with_capacity(point.len());
    for (axis, &x) in point.iter().enumerate() {
        let mut coeffs = vec![S::lift(ctx, 0.0); basis.len()];
        coeffs[0] = S::lift(ctx, x);
        if let Some(i) = basis.first_deriv(axis) {
            coeffs[i] = S::lift(ctx, 1.0);
        }
        jets.push(Jet { basis: Arc::clone(basis), coeffs });
    }
    Ok(jets)
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Jet<S>) -> Jet<S> {
        self.assert_same_basis(&rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect();
        Jet { basis: self.basis, coeffs }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Jet<S>) -> Jet<S> {
        self.assert_same_basis(&rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect();
        Jet { basis: self.basis, coeffs }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        let coeffs = self.coeffs.iter().map(|&a| -a).collect();
        Jet { basis: self.basis, coeffs }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Jet<S>) -> Jet<S> {
        self.assert_same_basis(&rhs);
        let ctx = self.coeffs[0];
        let mut coeffs = vec![S::lift(ctx, 0.0); self.coeffs.len()];
        for e in self.basis.product_table() {
            coeffs[e.out] =
                coeffs[e.out] + S::lift(ctx, e.coeff) * self.coeffs[e.left] * rhs.coeffs[e.right];
        }
        Jet { basis: self.basis, coeffs }
    }
}

impl<'a, S: Scalar> Add<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &'a Jet<S>) -> Jet<S> {
        self.clone() + rhs.clone()
    }
}

impl<'a, S: Scalar> Sub<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &'a Jet<S>) -> Jet<S> {
        self.clone() - rhs.clone()
    }
}

impl<'a, S: Scalar> Mul<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &'a Jet<S>) -> Jet<S> {
        self.clone() * rhs.clone()
    }
}
