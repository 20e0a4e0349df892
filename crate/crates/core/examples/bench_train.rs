use pinnbench_core::network::{init_params, Activation, MlpSpec};
use pinnbench_core::pinn::{train, GradEngine, LossWeights, TrainConfig};
use pinnbench_core::problems::{make_single_peak, sample_boundary};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_points: usize = args.get(1).map(|v| v.parse().unwrap()).unwrap_or(800);
    let iters: usize = args.get(2).map(|v| v.parse().unwrap()).unwrap_or(100);
    let problem = make_single_peak();
    let mlp = MlpSpec::new(2, vec![32, 64, 64, 32], 1, Activation::Tanh).unwrap();
    let mut params = init_params(&mlp, 0);
    let mut engine = GradEngine::new(&problem, &mlp);
    let mut rng = pinnbench_core::rng::seeded_rng(1);
    let interior: Vec<Vec<f64>> = (0..n_points).map(|_| problem.domain.sample(&mut rng)).collect();
    let boundary = sample_boundary(&problem, 200, 2).unwrap();
    let cfg = TrainConfig::adam_only(iters, 1e-3, LossWeights::default());
    let t0 = Instant::now();
    let report = train(&problem, &mut engine, &mut params, &interior, &boundary, &cfg).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "{n_points} pts, {iters} iters: {:.2} s total, {:.3} ms/iter, loss {:.4e}",
        dt,
        1000.0 * dt / iters as f64,
        report.final_loss
    );
}
