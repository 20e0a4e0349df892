//! Reverse-mode tape over scalars. Operations on [`Var`] append nodes with
//! precomputed local partials; [`Tape::backward`] runs one reverse sweep and
//! returns the gradient with respect to the registered parameters.
//!
//! A tape is single-owner while recording (it is not `Sync`); independent
//! tapes can run on separate threads.

use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Operation kinds, kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Leaf,
    Const,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Tanh,
    Exp,
    Sin,
    Cos,
    Sech,
    Sqrt,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    kind: OpKind,
    value: f64,
    parents: [u32; 2],
    partials: [f64; 2],
}

#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
    params: RefCell<Vec<u32>>,
}

/// A value recorded on a tape. Copyable; arithmetic appends nodes.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    id: u32,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.borrow().is_empty()
    }

    fn push(&self, node: Node) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let id = nodes.len() as u32;
        nodes.push(node);
        id
    }

    /// Record a parameter leaf; its adjoint appears in [`backward`](Self::backward).
    pub fn param(&self, value: f64) -> Var<'_> {
        let id = self.push(Node {
            kind: OpKind::Leaf,
            value,
            parents: [NONE, NONE],
            partials: [0.0, 0.0],
        });
        self.params.borrow_mut().push(id);
        Var { tape: self, id }
    }

    /// Register every entry of a slice as a parameter leaf.
    pub fn params(&self, values: &[f64]) -> Vec<Var<'_>> {
        values.iter().map(|&v| self.param(v)).collect()
    }

    /// A constant; participates in arithmetic but receives no adjoint.
    pub fn constant(&self, value: f64) -> Var<'_> {
        let id = self.push(Node {
            kind: OpKind::Const,
            value,
            parents: [NONE, NONE],
            partials: [0.0, 0.0],
        });
        Var { tape: self, id }
    }

    /// Reverse sweep from `output`: returns ∂output/∂param for every
    /// registered parameter, in registration order. Parameters the output
    /// does not depend on get 0.
    pub fn backward(&self, output: Var<'_>) -> Result<Vec<f64>> {
        self.backward_id(output.id)
    }

    pub fn backward_id(&self, output: u32) -> Result<Vec<f64>> {
        let nodes = self.nodes.borrow();
        if output as usize >= nodes.len() {
            return Err(Error::InvalidNodeId(output));
        }
        let mut adjoint = vec![0.0f64; nodes.len()];
        adjoint[output as usize] = 1.0;
        for i in (0..nodes.len()).rev() {
            let a = adjoint[i];
            if a == 0.0 {
                continue;
            }
            let n = &nodes[i];
            for k in 0..2 {
                if n.parents[k] != NONE {
                    adjoint[n.parents[k] as usize] += n.partials[k] * a;
                }
            }
        }
        Ok(self.params.borrow().iter().map(|&id| adjoint[id as usize]).collect())
    }

    pub fn value_of(&self, id: u32) -> Result<f64> {
        self.nodes
            .borrow()
            .get(id as usize)
            .map(|n| n.value)
            .ok_or(Error::InvalidNodeId(id))
    }
}

impl<'t> Var<'t> {
    pub fn id(self) -> u32 {
        self.id
    }

    fn node_value(self) -> f64 {
        self.tape.nodes.borrow()[self.id as usize].value
    }

    fn unary(self, kind: OpKind, value: f64, partial: f64) -> Var<'t> {
        let id = self.tape.push(Node {
            kind,
            value,
            parents: [self.id, NONE],
            partials: [partial, 0.0],
        });
        Var { tape: self.tape, id }
    }

    fn binary(self, rhs: Var<'t>, kind: OpKind, value: f64, pl: f64, pr: f64) -> Var<'t> {
        debug_assert!(std::ptr::eq(self.tape, rhs.tape), "vars from different tapes");
        let id = self.tape.push(Node {
            kind,
            value,
            parents: [self.id, rhs.id],
            partials: [pl, pr],
        });
        Var { tape: self.tape, id }
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Var<'t>) -> Var<'t> {
        let v = self.node_value() + rhs.node_value();
        self.binary(rhs, OpKind::Add, v, 1.0, 1.0)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Var<'t>) -> Var<'t> {
        let v = self.node_value() - rhs.node_value();
        self.binary(rhs, OpKind::Sub, v, 1.0, -1.0)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Var<'t>) -> Var<'t> {
        let (a, b) = (self.node_value(), rhs.node_value());
        self.binary(rhs, OpKind::Mul, a * b, b, a)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Var<'t>) -> Var<'t> {
        let (a, b) = (self.node_value(), rhs.node_value());
        self.binary(rhs, OpKind::Div, a / b, 1.0 / b, -a / (b * b))
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Var<'t> {
        let v = self.node_value();
        self.unary(OpKind::Neg, -v, -1.0)
    }
}

impl<'t> Scalar for Var<'t> {
    fn lift(ctx: Self, c: f64) -> Self {
        ctx.tape.constant(c)
    }

    fn value(self) -> f64 {
        self.node_value()
    }

    fn tanh(self) -> Self {
        let t = self.node_value().tanh();
        self.unary(OpKind::Tanh, t, 1.0 - t * t)
    }

    fn exp(self) -> Self {
        let e = self.node_value().exp();
        self.unary(OpKind::Exp, e, e)
    }

    fn sin(self) -> Self {
        let v = self.node_value();
        self.unary(OpKind::Sin, v.sin(), v.cos())
    }

    fn cos(self) -> Self {
        let v = self.node_value();
        self.unary(OpKind::Cos, v.cos(), -v.sin())
    }

    fn sech(self) -> Self {
        let v = self.node_value();
        let s = 1.0 / v.cosh();
        self.unary(OpKind::Sech, s, -s * v.tanh())
    }

    fn sqrt(self) -> Self {
        let r = self.node_value().sqrt();
        self.unary(OpKind::Sqrt, r, 0.5 / r)
    }
}
