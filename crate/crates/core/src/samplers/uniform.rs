//! Uniform i.i.d. collocation sampling.

use std::time::Instant;

use crate::problems::Domain;
use crate::{Error, Result};

use super::SamplerResult;

pub fn uniform_sample(domain: &Domain, count: usize, seed: u64) -> Result<SamplerResult> {
    if count == 0 {
        return Err(Error::EmptyInput { context: "uniform sample".into() });
    }
    let start = Instant::now();
    let mut rng = crate::rng::seeded_rng(seed);
    let points: Vec<Vec<f64>> = (0..count).map(|_| domain.sample(&mut rng)).collect();
    Ok(SamplerResult {
        points,
        scores: None,
        sampling_seconds: start.elapsed().as_secs_f64(),
        episodes_used: None,
        per_round_counts: vec![count],
    })
}
