//! Result emission: `results.csv` plus per-run point-cloud and loss-history
//! files. Every file is written to a temporary sibling and renamed into
//! place, so reruns overwrite atomically.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

use super::pipeline::{Artifacts, RunRecord};

pub const RESULTS_FILE: &str = "results.csv";
pub const RESULTS_HEADER: &str =
    "case,sampler,seed,points_added,sampling_time_s,training_time_s,rel_l2,episodes_used";

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt_seconds(s: f64) -> String {
    format!("{s:.6}")
}

/// Rows of `results.csv`, in the order the records are given.
pub fn results_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        let episodes = r.episodes_used.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6e},{}",
            r.case,
            r.sampler,
            r.seed,
            r.points_added,
            fmt_seconds(r.sampling_time_s),
            fmt_seconds(r.training_time_s),
            r.rel_l2,
            episodes
        );
    }
    out
}

fn points_csv(artifacts: &Artifacts) -> String {
    let dim = artifacts.added_points.first().map(|p| p.len()).unwrap_or(0);
    let mut out = String::new();
    for axis in 0..dim {
        let _ = write!(out, "x{axis},");
    }
    out.push_str("score\n");
    for (i, p) in artifacts.added_points.iter().enumerate() {
        for v in p {
            let _ = write!(out, "{v:.12e},");
        }
        match &artifacts.scores {
            Some(s) => {
                let _ = writeln!(out, "{:.12e}", s[i]);
            }
            None => out.push('\n'),
        }
    }
    out
}

fn loss_csv(artifacts: &Artifacts) -> String {
    let mut out = String::from("iteration,loss_r,loss_b,composite\n");
    for row in &artifacts.history {
        let fmt_opt = |v: f64| if v.is_nan() { String::new() } else { format!("{v:.10e}") };
        let _ = writeln!(
            out,
            "{},{},{},{:.10e}",
            row.iteration,
            fmt_opt(row.loss_r),
            fmt_opt(row.loss_b),
            row.composite
        );
    }
    out
}

/// Write all artifacts for a set of completed runs into `out_dir`.
pub fn emit_results(runs: &[(RunRecord, Artifacts)], out_dir: &Path) -> Result<()> {
    if runs.is_empty() {
        return Err(Error::EmptyInput { context: "emit results".into() });
    }
    std::fs::create_dir_all(out_dir)?;

    let records: Vec<RunRecord> = runs.iter().map(|(r, _)| r.clone()).collect();
    write_atomic(&out_dir.join(RESULTS_FILE), &results_csv(&records))?;

    for (record, artifacts) in runs {
        let stem = format!("{}_{}_{}", record.case, record.sampler, record.seed);
        write_atomic(&out_dir.join(format!("points_{stem}.csv")), &points_csv(artifacts))?;
        write_atomic(&out_dir.join(format!("loss_{stem}.csv")), &loss_csv(artifacts))?;
        if let Some(msg) = &artifacts.aborted {
            write_atomic(
                &out_dir.join(format!("failure_{stem}.txt")),
                &format!("{msg}\n"),
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Activation, MlpSpec, ParamVector};

    fn fake_run(sampler: &str, scores: bool) -> (RunRecord, Artifacts) {
        let mlp = MlpSpec::new(2, vec![4], 1, Activation::Tanh).unwrap();
        let params = ParamVector::zeros(&mlp);
        (
            RunRecord {
                case: "single-peak".into(),
                sampler: sampler.into(),
                seed: 0,
                points_added: 2,
                sampling_time_s: 0.001,
                training_time_s: 1.5,
                rel_l2: 0.42,
                episodes_used: (sampler == "rl").then_some(17),
            },
            Artifacts {
                added_points: vec![vec![0.1, 0.2], vec![0.3, 0.4]],
                scores: scores.then(|| vec![0.5, 0.6]),
                history: vec![crate::pinn::HistoryRow {
                    iteration: 0,
                    loss_r: 1.0,
                    loss_b: 2.0,
                    composite: 3.0,
                }],
                mlp,
                params,
                aborted: None,
            },
        )
    }

    #[test]
    fn results_csv_shape_and_order() {
        let runs: Vec<_> =
            ["uniform", "rar", "rad", "rl"].iter().map(|s| fake_run(s, *s != "uniform")).collect();
        let records: Vec<RunRecord> = runs.iter().map(|(r, _)| r.clone()).collect();
        let csv = results_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], RESULTS_HEADER);
        assert!(lines[1].starts_with("single-peak,uniform,0,2,"));
        assert!(lines[4].starts_with("single-peak,rl,0,2,"));
        // uniform row has an empty episodes column, rl row carries it
        assert!(lines[1].ends_with(','));
        assert!(lines[4].ends_with(",17"));

        // byte-stable across calls
        assert_eq!(csv, results_csv(&records));
    }

    #[test]
    fn emit_writes_and_overwrites_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let runs = vec![fake_run("uniform", false)];
        emit_results(&runs, dir.path()).unwrap();
        let results = dir.path().join(RESULTS_FILE);
        let first = std::fs::read_to_string(&results).unwrap();
        assert!(first.contains("single-peak,uniform"));
        let points = std::fs::read_to_string(dir.path().join("points_single-peak_uniform_0.csv"))
            .unwrap();
        assert!(points.starts_with("x0,x1,score\n"));
        // uniform scores are blank
        assert!(points.lines().nth(1).unwrap().ends_with(','));

        // rerun into the same directory replaces the files
        emit_results(&runs, dir.path()).unwrap();
        let second = std::fs::read_to_string(&results).unwrap();
        assert_eq!(first, second);
        // no stray temp files
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| {
                e.as_ref().unwrap().path().extension().map(|x| x == "tmp").unwrap_or(false)
            })
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn empty_record_list_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_results(&[], dir.path()), Err(Error::EmptyInput { .. })));
    }
}
