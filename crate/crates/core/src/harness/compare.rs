//! Cross-sampler comparison: per-case median errors and the percentage
//! improvement of the rl sampler over each baseline, (base − rl)/base.

use std::collections::BTreeMap;

use crate::{Error, Result};

use super::pipeline::RunRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSummary {
    pub sampler: String,
    pub median_rel_l2: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSummary {
    pub case: String,
    /// Ranked ascending by median error.
    pub ranking: Vec<SamplerSummary>,
    /// (baseline sampler, improvement of rl in percent); present when an rl
    /// entry exists.
    pub improvements: Vec<(String, f64)>,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Percentage improvement of `rl` over `base`: (base − rl)/base · 100.
pub fn improvement_pct(base: f64, rl: f64) -> f64 {
    (base - rl) / base * 100.0
}

/// Group records by case, rank samplers by median error, compute rl
/// improvements. Cases with fewer than two samplers are an error.
pub fn compare(records: &[RunRecord]) -> Result<Vec<CaseSummary>> {
    let mut by_case: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for r in records {
        by_case
            .entry(r.case.clone())
            .or_default()
            .entry(r.sampler.clone())
            .or_default()
            .push(r.rel_l2);
    }

    let mut out = Vec::new();
    for (case, samplers) in by_case {
        if samplers.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "case {case} has {} sampler(s); comparison needs at least two",
                samplers.len()
            )));
        }
        let mut ranking: Vec<SamplerSummary> = samplers
            .iter()
            .map(|(sampler, errs)| SamplerSummary {
                sampler: sampler.clone(),
                median_rel_l2: median(errs.clone()),
                runs: errs.len(),
            })
            .collect();
        ranking.sort_by(|a, b| {
            a.median_rel_l2
                .partial_cmp(&b.median_rel_l2)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.sampler.cmp(&b.sampler))
        });

        let rl_median =
            ranking.iter().find(|s| s.sampler == "rl").map(|s| s.median_rel_l2);
        let improvements = match rl_median {
            Some(rl) => ranking
                .iter()
                .filter(|s| s.sampler != "rl")
                .map(|s| (s.sampler.clone(), improvement_pct(s.median_rel_l2, rl)))
                .collect(),
            None => Vec::new(),
        };
        out.push(CaseSummary { case, ranking, improvements });
    }
    Ok(out)
}

/// Plain-text table for terminal output.
pub fn render(summaries: &[CaseSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        out.push_str(&format!("case {}\n", s.case));
        out.push_str("  sampler    runs   median rel_l2\n");
        for row in &s.ranking {
            out.push_str(&format!(
                "  {:<9} {:>5}   {:.6e}\n",
                row.sampler, row.runs, row.median_rel_l2
            ));
        }
        for (base, pct) in &s.improvements {
            out.push_str(&format!("  rl vs {base}: {pct:.1}% improvement\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(case: &str, sampler: &str, seed: u64, rel_l2: f64) -> RunRecord {
        RunRecord {
            case: case.into(),
            sampler: sampler.into(),
            seed,
            points_added: 1,
            sampling_time_s: 0.0,
            training_time_s: 0.0,
            rel_l2,
            episodes_used: None,
        }
    }

    // the paper's own headline comparison: 0.1462 vs 0.4242 is 65.5%
    #[test]
    fn improvement_matches_reported_percentage() {
        let pct = improvement_pct(0.4242, 0.1462);
        assert!((pct - 65.5).abs() < 0.05, "{pct}");
    }

    #[test]
    fn equal_errors_give_zero_improvement() {
        assert_eq!(improvement_pct(0.3, 0.3), 0.0);
    }

    #[test]
    fn ranking_and_improvements() {
        let records = vec![
            record("single-peak", "uniform", 0, 0.40),
            record("single-peak", "uniform", 1, 0.44),
            record("single-peak", "rl", 0, 0.15),
            record("single-peak", "rl", 1, 0.14),
            record("single-peak", "rar", 0, 0.29),
        ];
        let summaries = compare(&records).unwrap();
        assert_eq!(summaries.len(), 1);
        let s = &summaries[0];
        let order: Vec<&str> = s.ranking.iter().map(|r| r.sampler.as_str()).collect();
        assert_eq!(order, vec!["rl", "rar", "uniform"]);
        assert_relative_eq!(s.ranking[0].median_rel_l2, 0.145, max_relative = 1e-12);
        assert_relative_eq!(s.ranking[2].median_rel_l2, 0.42, max_relative = 1e-12);
        let uniform_imp = s.improvements.iter().find(|(b, _)| b == "uniform").unwrap().1;
        assert_relative_eq!(uniform_imp, (0.42 - 0.145) / 0.42 * 100.0, max_relative = 1e-12);
    }

    #[test]
    fn single_sampler_case_is_rejected() {
        let records = vec![record("wave", "uniform", 0, 0.1)];
        assert!(compare(&records).is_err());
    }
}
