//! The scalar abstraction jets and networks are generic over: plain `f64`
//! for evaluation, [`Var`](super::tape::Var) for tape-recorded gradients.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Lift a constant into the same context as `ctx` (for tape scalars the
    /// constant lands on `ctx`'s tape).
    fn lift(ctx: Self, c: f64) -> Self;

    /// The primal value, for branching and diagnostics.
    fn value(self) -> f64;

    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// 1 / cosh(x).
    fn sech(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn lift(_ctx: Self, c: f64) -> Self {
        c
    }

    fn value(self) -> f64 {
        self
    }

    fn tanh(self) -> Self {
        f64::tanh(self)
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn sin(self) -> Self {
        f64::sin(self)
    }

    fn cos(self) -> Self {
        f64::cos(self)
    }

    fn sech(self) -> Self {
        1.0 / f64::cosh(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}
