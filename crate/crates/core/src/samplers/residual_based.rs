//! Residual-driven baselines: greedy top-k refinement and
//! residual-proportional distribution sampling, with the shared multi-round
//! driver that interleaves sampling and retraining.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::network::trace::{forward_jet_traced, JetWorkspace};
use crate::network::{MlpSpec, ParamVector};
use crate::pinn::{train, GradEngine, TrainConfig, TrainReport};
use crate::problems::{BoundaryBatch, ProblemSpec};
use crate::{Error, Result};

use super::SamplerResult;

/// Indices of the `m` largest residual magnitudes; ties break toward the
/// lower index.
pub fn rar_select(residuals: &[f64], m: usize) -> Result<Vec<usize>> {
    if m > residuals.len() {
        return Err(Error::SelectionTooLarge { m, n: residuals.len() });
    }
    let mut order: Vec<usize> = (0..residuals.len()).collect();
    order.sort_by(|&a, &b| {
        residuals[b].partial_cmp(&residuals[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    order.truncate(m);
    Ok(order)
}

/// Normalized residual-proportional mass: p̃ᵢ = pᵢ/Σp with
/// pᵢ = rᵢ/mean(r) + 1; all-zero residuals degrade to uniform.
pub fn rad_density(residuals: &[f64]) -> Result<Vec<f64>> {
    if residuals.is_empty() {
        return Err(Error::EmptyInput { context: "rad density".into() });
    }
    if residuals.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::NonFinite { context: "rad residual magnitudes".into() });
    }
    let mean: f64 = residuals.iter().sum::<f64>() / residuals.len() as f64;
    if mean == 0.0 {
        return Ok(vec![1.0 / residuals.len() as f64; residuals.len()]);
    }
    let p: Vec<f64> = residuals.iter().map(|r| r / mean + 1.0).collect();
    let total: f64 = p.iter().sum();
    Ok(p.into_iter().map(|v| v / total).collect())
}

/// Weighted draw of `m` distinct indices without replacement.
pub fn weighted_draw_without_replacement(
    density: &[f64],
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if m > density.len() {
        return Err(Error::SelectionTooLarge { m, n: density.len() });
    }
    let mut weights = density.to_vec();
    let mut chosen = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = weights.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut pick = weights.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            if u < w {
                pick = i;
                break;
            }
            u -= w;
        }
        chosen.push(pick);
        weights[pick] = 0.0;
    }
    Ok(chosen)
}

/// |residual| of the current network at each candidate.
pub fn residual_magnitudes(
    problem: &ProblemSpec,
    mlp: &MlpSpec,
    params: &ParamVector,
    candidates: &[Vec<f64>],
) -> Result<Vec<f64>> {
    candidates
        .par_iter()
        .map_init(
            || JetWorkspace::new(mlp, std::sync::Arc::clone(&problem.basis)),
            |ws, p| {
                forward_jet_traced(mlp, params, p, ws)?;
                let r = problem.residual.eval_coeffs(ws.output(), (problem.forcing)(p));
                Ok(r.abs())
            },
        )
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Top-k by residual.
    Refinement,
    /// Weighted draw from the residual-proportional mass.
    Distribution,
}

#[derive(Debug, Clone)]
pub struct RoundsConfig {
    pub t_max: usize,
    pub candidate_pool: usize,
    pub added_per_round: usize,
    pub train: TrainConfig,
}

/// Multi-round adaptive sampling: per round draw a candidate pool, score it
/// with the PDE residual, keep `added_per_round` points, retrain. Sampling
/// time excludes the retraining inside rounds.
pub fn adaptive_rounds(
    strategy: Strategy,
    problem: &ProblemSpec,
    mlp: &MlpSpec,
    engine: &mut GradEngine,
    params: &mut ParamVector,
    collocation: &mut Vec<Vec<f64>>,
    boundary: &[BoundaryBatch],
    cfg: &RoundsConfig,
    seed: u64,
) -> Result<(SamplerResult, Vec<TrainReport>)> {
    if cfg.t_max == 0 {
        return Err(Error::EmptyInput { context: "adaptive rounds".into() });
    }
    let mut rng = crate::rng::seeded_rng(seed);
    let mut added = Vec::new();
    let mut scores = Vec::new();
    let mut reports = Vec::new();
    let mut sampling_seconds = 0.0;
    let mut per_round_counts = Vec::with_capacity(cfg.t_max);

    for _round in 0..cfg.t_max {
        let t0 = Instant::now();
        let candidates: Vec<Vec<f64>> =
            (0..cfg.candidate_pool).map(|_| problem.domain.sample(&mut rng)).collect();
        let magnitudes = residual_magnitudes(problem, mlp, params, &candidates)?;
        let picked = match strategy {
            Strategy::Refinement => rar_select(&magnitudes, cfg.added_per_round)?,
            Strategy::Distribution => {
                let density = rad_density(&magnitudes)?;
                weighted_draw_without_replacement(&density, cfg.added_per_round, &mut rng)?
            }
        };
        sampling_seconds += t0.elapsed().as_secs_f64();

        per_round_counts.push(picked.len());
        for &i in &picked {
            collocation.push(candidates[i].clone());
            added.push(candidates[i].clone());
            scores.push(magnitudes[i]);
        }
        reports.push(train(problem, engine, params, collocation, boundary, &cfg.train)?);
    }

    Ok((
        SamplerResult {
            points: added,
            scores: Some(scores),
            sampling_seconds,
            episodes_used: None,
            per_round_counts,
        },
        reports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn rar_select_examples() {
        assert_eq!(rar_select(&[5.0, 1.0, 4.0, 2.0], 2).unwrap(), vec![0, 2]);
        assert_eq!(rar_select(&[3.0, 3.0, 1.0], 1).unwrap(), vec![0]);
        assert!(matches!(
            rar_select(&[1.0], 2),
            Err(Error::SelectionTooLarge { m: 2, n: 1 })
        ));
    }

    // brute-force oracle: count how many entries beat each candidate
    fn top_m_oracle(values: &[f64], m: usize) -> std::collections::BTreeSet<usize> {
        let mut set = std::collections::BTreeSet::new();
        for i in 0..values.len() {
            let rank = values
                .iter()
                .enumerate()
                .filter(|&(j, &v)| v > values[i] || (v == values[i] && j < i))
                .count();
            if rank < m {
                set.insert(i);
            }
        }
        set
    }

    #[test]
    fn rar_select_matches_brute_force_oracle() {
        let mut rng = crate::rng::seeded_rng(19);
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let m = rng.gen_range(0..=n);
            // duplicates on purpose: draw from a small set of values
            let values: Vec<f64> =
                (0..n).map(|_| f64::from(rng.gen_range(0..6u8))).collect();
            let got: std::collections::BTreeSet<usize> =
                rar_select(&values, m).unwrap().into_iter().collect();
            assert_eq!(got, top_m_oracle(&values, m), "values {values:?} m {m}");
        }
    }

    #[test]
    fn rad_density_examples() {
        let uniform = rad_density(&[3.0, 3.0, 3.0]).unwrap();
        for v in &uniform {
            assert_relative_eq!(*v, 1.0 / 3.0, max_relative = 1e-15);
        }

        let two = rad_density(&[3.0, 1.0]).unwrap();
        assert_relative_eq!(two[0], 0.625, max_relative = 1e-15);
        assert_relative_eq!(two[1], 0.375, max_relative = 1e-15);

        let zeros = rad_density(&[0.0, 0.0, 0.0, 0.0]).unwrap();
        for v in &zeros {
            assert_relative_eq!(*v, 0.25, max_relative = 1e-15);
        }

        assert!(rad_density(&[]).is_err());
        assert!(rad_density(&[-1.0]).is_err());
        assert!(rad_density(&[f64::NAN]).is_err());
    }

    #[test]
    fn rad_density_sums_to_one_and_is_permutation_equivariant() {
        let mut rng = crate::rng::seeded_rng(29);
        for _ in 0..50 {
            let n = rng.gen_range(1..30);
            let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            let d = rad_density(&r).unwrap();
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);

            let mut reversed = r.clone();
            reversed.reverse();
            let dr = rad_density(&reversed).unwrap();
            for (a, b) in d.iter().zip(dr.iter().rev()) {
                assert_relative_eq!(a, b, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn draw_without_replacement_gives_distinct_indices() {
        let density = rad_density(&[5.0, 1.0, 3.0, 0.5, 2.0]).unwrap();
        let mut rng = crate::rng::seeded_rng(31);
        let picked = weighted_draw_without_replacement(&density, 5, &mut rng).unwrap();
        let set: std::collections::BTreeSet<usize> = picked.iter().copied().collect();
        assert_eq!(set.len(), 5);
    }

    // single-draw frequencies against the exact mass, total variation
    #[test]
    fn rad_draw_frequencies_match_density() {
        let residuals: Vec<f64> = vec![0.1, 2.0, 0.7, 1.3, 0.0, 3.1, 0.4, 1.9, 0.9, 2.5];
        let density = rad_density(&residuals).unwrap();
        let mut rng = crate::rng::seeded_rng(37);
        let trials = 100_000;
        let mut counts = vec![0usize; residuals.len()];
        for _ in 0..trials {
            let pick = weighted_draw_without_replacement(&density, 1, &mut rng).unwrap()[0];
            counts[pick] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&density)
            .map(|(&c, &p)| (c as f64 / trials as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "total variation {tv}");
    }
}
