fn main() {
    println!("rayon threads: {}", rayon::current_num_threads());
    let t0 = std::time::Instant::now();
    use rayon::prelude::*;
    let s: f64 = (0..2_000_000_0i64).into_par_iter().map(|i| (i as f64).sqrt().sin()).sum();
    println!("par work {:.3}s sum {s:.3}", t0.elapsed().as_secs_f64());
}
