//! Fully-connected networks: the PDE solution surrogate (tanh, jet-capable)
//! and the Q-network (relu, scalar only). Parameters live in one flat vector
//! with a per-layer layout so optimizers and snapshots stay trivial.

pub mod trace;

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use crate::deriv::{DerivativeBasis, Jet, Scalar, Tape, Var};
use crate::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "pinnbench-params v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

/// Architecture of a multilayer perceptron with a linear output layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(
        input_dim: usize,
        hidden_sizes: Vec<usize>,
        output_dim: usize,
        activation: Activation,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden_sizes.is_empty() {
            return Err(Error::InvalidConfig(
                "mlp needs positive input/output dims and at least one hidden layer".into(),
            ));
        }
        if hidden_sizes.iter().any(|&h| h == 0) {
            return Err(Error::InvalidConfig("hidden layer sizes must be positive".into()));
        }
        Ok(Self { input_dim, hidden_sizes, output_dim, activation })
    }

    /// Widths of every layer including input and output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_sizes.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden_sizes);
        w.push(self.output_dim);
        w
    }

    pub fn layer_layouts(&self) -> Vec<LayerLayout> {
        let widths = self.widths();
        let mut layouts = Vec::with_capacity(widths.len() - 1);
        let mut offset = 0;
        for pair in widths.windows(2) {
            let (cols, rows) = (pair[0], pair[1]);
            layouts.push(LayerLayout { rows, cols, w_offset: offset, b_offset: offset + rows * cols });
            offset += rows * cols + rows;
        }
        layouts
    }

    pub fn param_count(&self) -> usize {
        self.widths().windows(2).map(|p| p[0] * p[1] + p[1]).sum()
    }
}

/// Where one layer's weights (row-major `[rows][cols]`) and biases sit in the
/// flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerLayout {
    pub rows: usize,
    pub cols: usize,
    pub w_offset: usize,
    pub b_offset: usize,
}

/// Flat parameter storage plus its layer layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
    layers: Vec<LayerLayout>,
}

impl ParamVector {
    pub fn zeros(spec: &MlpSpec) -> Self {
        Self { values: vec![0.0; spec.param_count()], layers: spec.layer_layouts() }
    }

    pub fn from_values(spec: &MlpSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.param_count() {
            return Err(Error::DimensionMismatch {
                expected: spec.param_count(),
                got: values.len(),
            });
        }
        Ok(Self { values, layers: spec.layer_layouts() })
    }

    pub fn layers(&self) -> &[LayerLayout] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Write a versioned text snapshot: magic line, architecture line, count,
    /// then one full-precision value per line.
    pub fn save(&self, spec: &MlpSpec, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{SNAPSHOT_MAGIC}")?;
        let hidden: Vec<String> = spec.hidden_sizes.iter().map(|h| h.to_string()).collect();
        let act = match spec.activation {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        };
        writeln!(
            w,
            "input {} hidden {} output {} activation {act}",
            spec.input_dim,
            hidden.join(","),
            spec.output_dim
        )?;
        writeln!(w, "{}", self.values.len())?;
        for v in &self.values {
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }

    /// Read a snapshot saved by [`save`](Self::save); the architecture in the
    /// header must match `spec`.
    pub fn load(spec: &MlpSpec, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::SnapshotFormat("truncated snapshot".into()))
        };
        let magic = next()?;
        if magic.trim() != SNAPSHOT_MAGIC {
            return Err(Error::SnapshotFormat(format!("bad magic line {magic:?}")));
        }
        let header = next()?;
        let expected_hidden: Vec<String> =
            spec.hidden_sizes.iter().map(|h| h.to_string()).collect();
        let act = match spec.activation {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        };
        let expect = format!(
            "input {} hidden {} output {} activation {act}",
            spec.input_dim,
            expected_hidden.join(","),
            spec.output_dim
        );
        if header.trim() != expect {
            return Err(Error::SnapshotFormat(format!(
                "architecture mismatch: snapshot {header:?}, expected {expect:?}"
            )));
        }
        let count: usize = next()?
            .trim()
            .parse()
            .map_err(|e| Error::SnapshotFormat(format!("bad count line: {e}")))?;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let line = next()?;
            values.push(
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::SnapshotFormat(format!("bad value {line:?}: {e}")))?,
            );
        }
        Self::from_values(spec, values)
    }
}

/// Glorot-uniform weights, zero biases, deterministic per seed.
pub fn init_params(spec: &MlpSpec, seed: u64) -> ParamVector {
    let mut rng = crate::rng::seeded_rng(seed);
    let mut params = ParamVector::zeros(spec);
    for layer in params.layers.clone() {
        let limit = (6.0 / (layer.cols + layer.rows) as f64).sqrt();
        for idx in 0..layer.rows * layer.cols {
            params.values[layer.w_offset + idx] = (rng.gen::<f64>() * 2.0 - 1.0) * limit;
        }
    }
    params
}

fn activate<S: Scalar>(act: Activation, x: S) -> S {
    match act {
        Activation::Tanh => x.tanh(),
        Activation::Relu => {
            if x.value() > 0.0 {
                x
            } else {
                S::lift(x, 0.0)
            }
        }
    }
}

/// Eight-lane dot product. Independent accumulator chains let the f64 case
/// vectorize; every forward path in the crate uses this same operation
/// order, which is what keeps jet-mode and scalar-mode values bit-identical.
#[inline]
pub(crate) fn dot8<S: Scalar>(ctx: S, w: &[S], a: &[S]) -> S {
    let zero = S::lift(ctx, 0.0);
    let mut acc = [zero; 8];
    let wc = w.chunks_exact(8);
    let ac = a.chunks_exact(8);
    let (wrem, arem) = (wc.remainder(), ac.remainder());
    for (w8, a8) in wc.zip(ac) {
        for j in 0..8 {
            acc[j] = acc[j] + w8[j] * a8[j];
        }
    }
    for (wj, aj) in wrem.iter().zip(arem) {
        acc[0] = acc[0] + *wj * *aj;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))
}

/// MLP evaluation over any scalar type; `params` and `input` must already
/// live in the same scalar context.
pub fn forward_generic<S: Scalar>(spec: &MlpSpec, params: &[S], input: &[S]) -> Vec<S> {
    let ctx = params[0];
    let layouts = spec.layer_layouts();
    let n_layers = layouts.len();
    let mut act: Vec<S> = input.to_vec();
    for (l, layer) in layouts.iter().enumerate() {
        let mut next = Vec::with_capacity(layer.rows);
        for o in 0..layer.rows {
            let wrow = &params[layer.w_offset + o * layer.cols..layer.w_offset + (o + 1) * layer.cols];
            let mut acc = dot8(ctx, wrow, &act);
            acc = acc + params[layer.b_offset + o];
            if l + 1 < n_layers {
                acc = activate(spec.activation, acc);
            }
            next.push(acc);
        }
        act = next;
    }
    act
}

/// Plain evaluation at a point.
pub fn forward_scalar(spec: &MlpSpec, params: &ParamVector, point: &[f64]) -> Result<Vec<f64>> {
    if point.len() != spec.input_dim {
        return Err(Error::DimensionMismatch { expected: spec.input_dim, got: point.len() });
    }
    if !params.all_finite() {
        return Err(Error::NonFinite { context: "network parameters".into() });
    }
    Ok(forward_generic(spec, &params.values, point))
}

/// Scalar-output convenience for the solution surrogate.
pub fn forward_scalar1(spec: &MlpSpec, params: &ParamVector, point: &[f64]) -> Result<f64> {
    let out = forward_scalar(spec, params, point)?;
    Ok(out[0])
}

/// Jet-mode evaluation: feed coordinate jets through the network and get the
/// output value with every tracked partial. tanh only.
pub fn forward_jet<S: Scalar>(
    spec: &MlpSpec,
    params: &[S],
    inputs: &[Jet<S>],
) -> Result<Jet<S>> {
    if spec.activation == Activation::Relu {
        return Err(Error::ReluInJetMode);
    }
    if inputs.len() != spec.input_dim {
        return Err(Error::DimensionMismatch { expected: spec.input_dim, got: inputs.len() });
    }
    if spec.output_dim != 1 {
        return Err(Error::InvalidConfig("jet forward expects a scalar output".into()));
    }
    let basis = inputs[0].basis();
    for j in inputs.iter().skip(1) {
        if !Arc::ptr_eq(j.basis(), basis) && **j.basis() != **basis {
            return Err(Error::BasisMismatch);
        }
    }
    let ctx = params[0];
    let layouts = spec.layer_layouts();
    let n_layers = layouts.len();
    let k = basis.len();
    let mut act: Vec<Jet<S>> = inputs.to_vec();
    let mut column: Vec<S> = Vec::new();
    for (l, layer) in layouts.iter().enumerate() {
        let mut next = Vec::with_capacity(layer.rows);
        for o in 0..layer.rows {
            let wrow =
                &params[layer.w_offset + o * layer.cols..layer.w_offset + (o + 1) * layer.cols];
            let mut coeffs = Vec::with_capacity(k);
            for c in 0..k {
                column.clear();
                column.extend(act.iter().map(|j| j.coeffs()[c]));
                coeffs.push(dot8(ctx, wrow, &column));
            }
            coeffs[0] = coeffs[0] + params[layer.b_offset + o];
            let mut acc = Jet::new(Arc::clone(basis), coeffs)?;
            if l + 1 < n_layers {
                acc = acc.tanh();
            }
            next.push(acc);
        }
        act = next;
    }
    Ok(act.remove(0))
}

/// Jet-mode evaluation from raw f64 parameters at a plain point.
pub fn forward_jet_f64(
    spec: &MlpSpec,
    params: &ParamVector,
    basis: &Arc<DerivativeBasis>,
    point: &[f64],
) -> Result<Jet<f64>> {
    let jets = crate::deriv::seed_coordinates(point, basis)?;
    forward_jet(spec, &params.values, &jets)
}

/// Record a loss over all parameters on a fresh tape and return its gradient.
pub fn param_gradient<F>(params: &ParamVector, record: F) -> Result<Vec<f64>>
where
    F: for<'t> FnOnce(&'t Tape, &[Var<'t>]) -> Result<Var<'t>>,
{
    let tape = Tape::new();
    let vars = tape.params(&params.values);
    let loss = record(&tape, &vars)?;
    tape.backward(loss)
}
