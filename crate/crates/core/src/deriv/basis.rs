//! Multi-index derivative bases.
//!
//! A basis fixes which partial derivatives a [`Jet`](super::Jet) carries.
//! Bases must be downward closed (every componentwise sub-index of a tracked
//! index is tracked); that is exactly the closure the chain and Leibniz rules
//! need, and it makes truncated products exact on the tracked set.

use std::collections::HashMap;
use std::sync::Arc;

use crate::{Error, Result};

/// Highest supported total derivative order.
pub const MAX_ORDER: usize = 4;

/// Per-coordinate derivative orders, e.g. `[2, 1]` for a third derivative
/// taken twice in x and once in y.
pub type MultiIndex = Vec<u8>;

fn total_order(idx: &[u8]) -> usize {
    idx.iter().map(|&o| o as usize).sum()
}

/// One term of the Leibniz expansion for a tracked index: the product rule
/// writes `coeff * a[left] * b[right]` into `out`.
#[derive(Debug, Clone, Copy)]
pub struct ProductEntry {
    pub out: usize,
    pub left: usize,
    pub right: usize,
    pub coeff: f64,
}

/// An ordered, downward-closed set of multi-indices with the lookup and
/// product tables jet arithmetic needs. Construct once per problem and share
/// via `Arc`.
#[derive(Debug)]
pub struct DerivativeBasis {
    dimension: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    product: Vec<ProductEntry>,
    /// Product entries whose right factor is not the value channel; the
    /// composition Horner loop multiplies by a jet with a zero value, so
    /// the skipped entries contribute nothing there.
    product_fwd: Vec<ProductEntry>,
    max_total_order: usize,
}

impl DerivativeBasis {
    /// Build a basis from an explicit index set. The set must contain the
    /// zero index and be downward closed; indices above [`MAX_ORDER`] are
    /// rejected.
    pub fn new(dimension: usize, multi_indices: &[MultiIndex]) -> Result<Arc<Self>> {
        for idx in multi_indices {
            Self::check_index(dimension, idx)?;
        }
        let mut indices: Vec<MultiIndex> = multi_indices.to_vec();
        indices.sort_by(|a, b| (total_order(a), a.clone()).cmp(&(total_order(b), b.clone())));
        indices.dedup();

        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, idx)| (idx.clone(), i))
            .collect();

        if !lookup.contains_key(&vec![0u8; dimension]) {
            return Err(Error::BasisNotClosed(vec![0u8; dimension]));
        }
        for idx in &indices {
            for sub in sub_indices(idx) {
                if !lookup.contains_key(&sub) {
                    return Err(Error::BasisNotClosed(sub));
                }
            }
        }

        let product = build_product_table(&indices, &lookup);
        let product_fwd = product.iter().copied().filter(|e| e.right != 0).collect();
        let max_total_order = indices.iter().map(|i| total_order(i)).max().unwrap_or(0);
        Ok(Arc::new(Self { dimension, indices, lookup, product, product_fwd, max_total_order }))
    }

    /// Build the downward closure of the requested indices and construct the
    /// basis from it. This is the usual entry point: ask for the derivatives
    /// a residual consumes and get the chain-rule closure for free.
    pub fn closure(dimension: usize, requested: &[MultiIndex]) -> Result<Arc<Self>> {
        let mut all: Vec<MultiIndex> = vec![vec![0u8; dimension]];
        for idx in requested {
            Self::check_index(dimension, idx)?;
            for sub in sub_indices(idx) {
                all.push(sub);
            }
            all.push(idx.clone());
        }
        Self::new(dimension, &all)
    }

    fn check_index(dimension: usize, idx: &[u8]) -> Result<()> {
        if idx.len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, got: idx.len() });
        }
        let order = total_order(idx);
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of tracked coefficients. Index 0 is always the value.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Position of a multi-index within the coefficient vector.
    pub fn index_of(&self, idx: &[u8]) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    /// Position of the first derivative along `axis`.
    pub fn first_deriv(&self, axis: usize) -> Option<usize> {
        let mut idx = vec![0u8; self.dimension];
        idx[axis] = 1;
        self.index_of(&idx)
    }

    /// Position of the pure second derivative along `axis`.
    pub fn second_deriv(&self, axis: usize) -> Option<usize> {
        let mut idx = vec![0u8; self.dimension];
        idx[axis] = 2;
        self.index_of(&idx)
    }

    pub(crate) fn product_table(&self) -> &[ProductEntry] {
        &self.product
    }

    pub(crate) fn forward_product_table(&self) -> &[ProductEntry] {
        &self.product_fwd
    }

    /// Largest total order tracked; bounds the composition depth.
    pub fn max_total_order(&self) -> usize {
        self.max_total_order
    }
}

impl PartialEq for DerivativeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.indices == other.indices
    }
}

/// All strict componentwise sub-indices of `idx` (the zero index included).
fn sub_indices(idx: &[u8]) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; idx.len()];
    loop {
        if cur.as_slice() != idx {
            out.push(cur.clone());
        }
        // odometer over the box [0, idx]
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            if cur[k] < idx[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

fn binom(n: u8, k: u8) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

/// Leibniz coefficient: product of per-coordinate binomials.
fn leibniz_coeff(alpha: &[u8], beta: &[u8]) -> f64 {
    alpha.iter().zip(beta).map(|(&a, &b)| binom(a, b)).product()
}

fn build_product_table(
    indices: &[MultiIndex],
    lookup: &HashMap<MultiIndex, usize>,
) -> Vec<ProductEntry> {
    let mut table = Vec::new();
    for (out, alpha) in indices.iter().enumerate() {
        let mut subs = sub_indices(alpha);
        subs.push(alpha.clone());
        for beta in subs {
            let gamma: MultiIndex = alpha.iter().zip(&beta).map(|(&a, &b)| a - b).collect();
            let left = lookup[&beta];
            let right = lookup[&gamma];
            table.push(ProductEntry { out, left, right, coeff: leibniz_coeff(alpha, &beta) });
        }
    }
    table
}
