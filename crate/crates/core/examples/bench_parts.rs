use pinnbench_core::deriv::elem::tanh_derivs_ext;
use pinnbench_core::deriv::DerivativeBasis;
use pinnbench_core::network::trace::{backward_jet_traced, forward_jet_traced, JetWorkspace};
use pinnbench_core::network::{init_params, Activation, MlpSpec};
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let basis = DerivativeBasis::closure(2, &[vec![2, 0], vec![0, 2]]).unwrap();
    let mlp = MlpSpec::new(2, vec![32, 64, 64, 32], 1, Activation::Tanh).unwrap();
    let params = init_params(&mlp, 0);
    let mut ws = JetWorkspace::new(&mlp, Arc::clone(&basis));
    let point = [0.3, -0.4];
    let n = 20_000;

    let t0 = Instant::now();
    for _ in 0..n {
        forward_jet_traced(&mlp, &params, &point, &mut ws).unwrap();
    }
    let fwd = t0.elapsed().as_secs_f64() / n as f64;

    let mut grad = vec![0.0; params.len()];
    let adj = vec![1.0; basis.len()];
    let t0 = Instant::now();
    for _ in 0..n {
        backward_jet_traced(&mlp, &params, &adj, &mut ws, &mut grad);
    }
    let bwd = t0.elapsed().as_secs_f64() / n as f64;

    let t0 = Instant::now();
    let mut acc = 0.0;
    for i in 0..n * 192 {
        let d = tanh_derivs_ext(0.1 + i as f64 * 1e-9);
        acc += d[5];
    }
    let tanh_cost = t0.elapsed().as_secs_f64() / (n * 192) as f64;

    println!(
        "forward {:.1} us, backward {:.1} us, tanh_derivs_ext {:.0} ns/neuron ({:.1} us per point for 192 neurons), acc {acc:.3}",
        fwd * 1e6,
        bwd * 1e6,
        tanh_cost * 1e9,
        tanh_cost * 192.0 * 1e6
    );
}
