//! Structural forward/backward passes used by the training loops.
//!
//! The generic tape in [`crate::deriv::tape`] is the reference gradient
//! path; recording every jet coefficient of a wide network is too slow for
//! full-batch training, so these routines walk the layer structure directly.
//! Tests pin them against the tape path and finite differences.
//!
//! Jet storage is coefficient-major: a layer of `n` neurons keeps `K` slices
//! of length `n`, one per tracked multi-index. The affine maps then run as
//! contiguous dot products and axpy updates, and only the per-neuron tanh
//! composition gathers across slices. The value slice reproduces plain
//! scalar evaluation bit for bit (same accumulation order).

use std::sync::Arc;

use crate::deriv::basis::ProductEntry;
use crate::deriv::elem::{tanh_derivs_ext, STACK_EXT};
use crate::deriv::DerivativeBasis;
use crate::{Error, Result};

use super::{Activation, LayerLayout, MlpSpec, ParamVector};

/// Hard cap on basis size for the stack-allocated per-neuron scratch.
pub const MAX_BASIS: usize = 32;

const INV_FACT: [f64; STACK_EXT] = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];

/// Reusable per-thread workspace for jet-mode forward/backward sweeps.
/// `activations[l]` are the jets entering layer `l`; `deriv_jets[l]` hold
/// tanh' composed with the pre-activations of hidden layer `l`, which is
/// the factor the chain rule multiplies adjoints by.
pub struct JetWorkspace {
    basis: Arc<DerivativeBasis>,
    activations: Vec<Vec<f64>>,
    deriv_jets: Vec<Vec<f64>>,
    output: Vec<f64>,
    adj_cur: Vec<f64>,
    adj_next: Vec<f64>,
}

impl JetWorkspace {
    pub fn new(spec: &MlpSpec, basis: Arc<DerivativeBasis>) -> Self {
        let k = basis.len();
        assert!(k <= MAX_BASIS, "basis larger than the supported maximum");
        let widths = spec.widths();
        let activations = widths.iter().map(|w| vec![0.0; w * k]).collect();
        let deriv_jets = widths[1..widths.len() - 1].iter().map(|w| vec![0.0; w * k]).collect();
        let max_w = *widths.iter().max().unwrap();
        Self {
            basis,
            activations,
            deriv_jets,
            output: vec![0.0; k],
            adj_cur: vec![0.0; max_w * k],
            adj_next: vec![0.0; max_w * k],
        }
    }

    pub fn basis(&self) -> &Arc<DerivativeBasis> {
        &self.basis
    }

    /// Output jet coefficients of the most recent forward pass.
    pub fn output(&self) -> &[f64] {
        &self.output
    }
}

/// z_k = W·a_k for every coefficient slice, bias into the value slice.
fn affine_jets(
    values: &[f64],
    layer: LayerLayout,
    k: usize,
    input: &[f64],
    out: &mut [f64],
) {
    let (rows, cols) = (layer.rows, layer.cols);
    for kk in 0..k {
        let a = &input[kk * cols..(kk + 1) * cols];
        let z = &mut out[kk * rows..(kk + 1) * rows];
        for o in 0..rows {
            let wrow = &values[layer.w_offset + o * cols..layer.w_offset + (o + 1) * cols];
            z[o] = crate::network::dot8(0.0, wrow, a);
        }
    }
    let z0 = &mut out[..rows];
    for (o, z) in z0.iter_mut().enumerate() {
        *z += values[layer.b_offset + o];
    }
}

/// Truncated-Taylor Horner on a per-neuron coefficient stack: computes both
/// the activation jet and the tanh'∘z factor in one pass. `rounds` is the
/// basis's maximum total order; higher terms vanish on the tracked set.
#[inline]
fn compose_neuron(
    z: &[f64; MAX_BASIS],
    k: usize,
    rounds: usize,
    table: &[ProductEntry],
    h_out: &mut [f64; MAX_BASIS],
    g_out: &mut [f64; MAX_BASIS],
) {
    let d = tanh_derivs_ext(z[0]);
    let mut acc = [0.0f64; MAX_BASIS];
    let mut tmp = [0.0f64; MAX_BASIS];

    // activation value stack: coeffs[j] = d[j]/j!
    acc[..k].fill(0.0);
    acc[0] = d[rounds] * INV_FACT[rounds];
    for j in (0..rounds).rev() {
        tmp[..k].fill(0.0);
        for e in table {
            tmp[e.out] += e.coeff * acc[e.left] * z[e.right];
        }
        tmp[0] = d[j] * INV_FACT[j];
        std::mem::swap(&mut acc, &mut tmp);
    }
    h_out[..k].copy_from_slice(&acc[..k]);

    // chain factor: coeffs[j] = d[j+1]/j!
    acc[..k].fill(0.0);
    acc[0] = d[rounds + 1] * INV_FACT[rounds];
    for j in (0..rounds).rev() {
        tmp[..k].fill(0.0);
        for e in table {
            tmp[e.out] += e.coeff * acc[e.left] * z[e.right];
        }
        tmp[0] = d[j + 1] * INV_FACT[j];
        std::mem::swap(&mut acc, &mut tmp);
    }
    g_out[..k].copy_from_slice(&acc[..k]);
}

/// Jet-mode forward pass storing everything the backward sweep needs;
/// the output jet lands in `ws.output()`.
pub fn forward_jet_traced(
    spec: &MlpSpec,
    params: &ParamVector,
    point: &[f64],
    ws: &mut JetWorkspace,
) -> Result<()> {
    if spec.activation == Activation::Relu {
        return Err(Error::ReluInJetMode);
    }
    if point.len() != spec.input_dim {
        return Err(Error::DimensionMismatch { expected: spec.input_dim, got: point.len() });
    }
    let JetWorkspace { basis, activations, deriv_jets, output, .. } = ws;
    let k = basis.len();
    let rounds = basis.max_total_order();
    let fwd_table = basis.forward_product_table();
    let dim = point.len();

    // seed coordinate jets (coefficient-major)
    let input = &mut activations[0];
    input.fill(0.0);
    for (axis, &x) in point.iter().enumerate() {
        input[axis] = x;
        if let Some(fd) = basis.first_deriv(axis) {
            input[fd * dim + axis] = 1.0;
        }
    }

    let layouts = params.layers();
    let n_layers = layouts.len();
    let mut zl = [0.0f64; MAX_BASIS];
    let mut hl = [0.0f64; MAX_BASIS];
    let mut gl = [0.0f64; MAX_BASIS];
    for (l, &layer) in layouts.iter().enumerate() {
        let (head, tail) = activations.split_at_mut(l + 1);
        let input = &head[l];
        let next = &mut tail[0];
        affine_jets(&params.values, layer, k, input, next);
        if l + 1 < n_layers {
            let rows = layer.rows;
            let g_all = &mut deriv_jets[l];
            for o in 0..rows {
                for kk in 0..k {
                    zl[kk] = next[kk * rows + o];
                }
                compose_neuron(&zl, k, rounds, fwd_table, &mut hl, &mut gl);
                for kk in 0..k {
                    next[kk * rows + o] = hl[kk];
                    g_all[kk * rows + o] = gl[kk];
                }
            }
        }
    }
    output.copy_from_slice(&activations[n_layers]);
    Ok(())
}

/// Backward sweep: accumulate `d(Σ_α adjoint[α] · out[α]) / dθ` into `grad`.
/// Must follow a [`forward_jet_traced`] call with the same workspace.
pub fn backward_jet_traced(
    spec: &MlpSpec,
    params: &ParamVector,
    out_adjoint: &[f64],
    ws: &mut JetWorkspace,
    grad: &mut [f64],
) {
    debug_assert_eq!(spec.output_dim, 1);
    let JetWorkspace { basis, activations, deriv_jets, adj_cur, adj_next, .. } = ws;
    let k = basis.len();
    let table = basis.product_table();
    let layouts = params.layers();
    let n_layers = layouts.len();

    adj_cur[..k].copy_from_slice(out_adjoint);

    let mut hbar = [0.0f64; MAX_BASIS];
    let mut gl = [0.0f64; MAX_BASIS];
    let mut zbar = [0.0f64; MAX_BASIS];
    for l in (0..n_layers).rev() {
        let layer = layouts[l];
        let (rows, cols) = (layer.rows, layer.cols);
        let input = &activations[l];

        if l + 1 < n_layers {
            // adjoint through tanh: z̄ = (tanh'∘z) ⊛ᵀ h̄
            let g_all = &deriv_jets[l];
            for o in 0..rows {
                for kk in 0..k {
                    hbar[kk] = adj_cur[kk * rows + o];
                    gl[kk] = g_all[kk * rows + o];
                }
                zbar[..k].fill(0.0);
                for e in table {
                    zbar[e.right] += e.coeff * gl[e.left] * hbar[e.out];
                }
                for kk in 0..k {
                    adj_cur[kk * rows + o] = zbar[kk];
                }
            }
        }

        // adjoint through the affine map
        let need_input_adj = l > 0;
        if need_input_adj {
            adj_next[..cols * k].fill(0.0);
        }
        for o in 0..rows {
            grad[layer.b_offset + o] += adj_cur[o];
        }
        for kk in 0..k {
            let zbar_k = &adj_cur[kk * rows..(kk + 1) * rows];
            let a_k = &input[kk * cols..(kk + 1) * cols];
            for o in 0..rows {
                let zb = zbar_k[o];
                if zb == 0.0 {
                    continue;
                }
                let wrow = layer.w_offset + o * cols;
                let grow = &mut grad[wrow..wrow + cols];
                for (g, ai) in grow.iter_mut().zip(a_k) {
                    *g += zb * ai;
                }
            }
            if need_input_adj {
                let abar_k = &mut adj_next[kk * cols..(kk + 1) * cols];
                for o in 0..rows {
                    let zb = zbar_k[o];
                    if zb == 0.0 {
                        continue;
                    }
                    let wrow = &params.values[layer.w_offset + o * cols..layer.w_offset + (o + 1) * cols];
                    for (ab, w) in abar_k.iter_mut().zip(wrow) {
                        *ab += zb * w;
                    }
                }
            }
        }
        if need_input_adj {
            std::mem::swap(adj_cur, adj_next);
        }
    }
}

/// Scalar-mode workspace for the Q-network (relu or tanh, vector output).
pub struct ScalarWorkspace {
    activations: Vec<Vec<f64>>,
    pre_acts: Vec<Vec<f64>>,
    adj_cur: Vec<f64>,
    adj_next: Vec<f64>,
}

impl ScalarWorkspace {
    pub fn new(spec: &MlpSpec) -> Self {
        let widths = spec.widths();
        let max_w = *widths.iter().max().unwrap();
        Self {
            activations: widths.iter().map(|w| vec![0.0; *w]).collect(),
            pre_acts: widths[1..].iter().map(|w| vec![0.0; *w]).collect(),
            adj_cur: vec![0.0; max_w],
            adj_next: vec![0.0; max_w],
        }
    }

    pub fn output(&self) -> &[f64] {
        self.activations.last().unwrap()
    }
}

/// Plain forward pass caching activations for [`backward_scalar_traced`].
pub fn forward_scalar_traced(
    spec: &MlpSpec,
    params: &ParamVector,
    input: &[f64],
    ws: &mut ScalarWorkspace,
) {
    ws.activations[0][..input.len()].copy_from_slice(input);
    let layouts = params.layers();
    let n_layers = layouts.len();
    for (l, &layer) in layouts.iter().enumerate() {
        let (head, tail) = ws.activations.split_at_mut(l + 1);
        let a = &head[l];
        let next = &mut tail[0];
        for o in 0..layer.rows {
            let wrow = &params.values
                [layer.w_offset + o * layer.cols..layer.w_offset + (o + 1) * layer.cols];
            let mut acc = crate::network::dot8(0.0, wrow, a);
            acc += params.values[layer.b_offset + o];
            ws.pre_acts[l][o] = acc;
            next[o] = if l + 1 < n_layers {
                match spec.activation {
                    Activation::Tanh => acc.tanh(),
                    Activation::Relu => acc.max(0.0),
                }
            } else {
                acc
            };
        }
    }
}

/// Accumulate `d(Σ_j adjoint[j] · out[j]) / dθ` into `grad` after a
/// [`forward_scalar_traced`] call.
pub fn backward_scalar_traced(
    spec: &MlpSpec,
    params: &ParamVector,
    out_adjoint: &[f64],
    ws: &mut ScalarWorkspace,
    grad: &mut [f64],
) {
    let layouts = params.layers();
    let n_layers = layouts.len();
    ws.adj_cur[..out_adjoint.len()].copy_from_slice(out_adjoint);

    for l in (0..n_layers).rev() {
        let layer = layouts[l];
        if l + 1 < n_layers {
            for o in 0..layer.rows {
                let dact = match spec.activation {
                    Activation::Tanh => {
                        let t = ws.activations[l + 1][o];
                        1.0 - t * t
                    }
                    Activation::Relu => {
                        if ws.pre_acts[l][o] > 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                };
                ws.adj_cur[o] *= dact;
            }
        }
        let a = &ws.activations[l];
        if l > 0 {
            ws.adj_next[..layer.cols].fill(0.0);
        }
        for o in 0..layer.rows {
            let zbar = ws.adj_cur[o];
            if zbar == 0.0 {
                continue;
            }
            grad[layer.b_offset + o] += zbar;
            let wrow_off = layer.w_offset + o * layer.cols;
            for i in 0..layer.cols {
                grad[wrow_off + i] += zbar * a[i];
                if l > 0 {
                    ws.adj_next[i] += params.values[wrow_off + i] * zbar;
                }
            }
        }
        if l > 0 {
            std::mem::swap(&mut ws.adj_cur, &mut ws.adj_next);
        }
    }
}
