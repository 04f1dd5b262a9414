use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::str::FromStr;

use super::experiment::RunRecord;
use crate::error::{invalid, Error, Result};
use crate::robust::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Wall-clock milliseconds.
    Time,
    /// Surrogate-level evaluations.
    Calls,
    /// Evaluations of the individual objectives.
    FCalls,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Metric::Time),
            "calls" => Ok(Metric::Calls),
            "f-calls" => Ok(Metric::FCalls),
            _ => Err(invalid("metric", format!("expected time, calls or f-calls, got `{s}`"))),
        }
    }
}

impl Metric {
    fn of(self, r: &RunRecord) -> Option<f64> {
        match self {
            Metric::Time => r.wall_ms,
            Metric::Calls => r.g_evals.map(|v| v as f64),
            Metric::FCalls => r.f_evals.map(|v| v as f64),
        }
    }
}

/// `profile[m][t]`: fraction of instances on which method `m` is within a
/// factor `thetas[t]` of the best method.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub methods: Vec<String>,
    pub thetas: Vec<f64>,
    pub profile: Vec<Vec<f64>>,
}

impl ProfileTable {
    /// CSV with a `theta` column and one column per method.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta");
        for m in &self.methods {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (t, theta) in self.thetas.iter().enumerate() {
            let _ = write!(out, "{theta}");
            for row in &self.profile {
                let _ = write!(out, ",{}", row[t]);
            }
            out.push('\n');
        }
        out
    }

    pub fn at(&self, method: &str, theta: f64) -> Option<f64> {
        let m = self.methods.iter().position(|x| x == method)?;
        let t = self.thetas.iter().position(|&x| x == theta)?;
        Some(self.profile[m][t])
    }
}

/// Performance profiles of the solver records (baselines are skipped), one
/// instance per repetition. Failed runs count as infinitely slow. The θ grid
/// is `2^{i/4}` from 1 up to the largest finite ratio.
pub fn performance_profile(records: &[RunRecord], metric: Metric) -> Result<ProfileTable> {
    let solver_records: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.method.parse::<Algorithm>().is_ok())
        .collect();
    let methods: Vec<String> = solver_records
        .iter()
        .map(|r| r.method.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut cells: BTreeMap<(usize, u64), BTreeMap<&str, f64>> = BTreeMap::new();
    for r in &solver_records {
        let value = match (metric.of(r), &r.error) {
            (_, Some(_)) => f64::INFINITY,
            (Some(v), None) => v,
            (None, None) => {
                return Err(invalid(
                    "records",
                    format!(
                        "{} run of repetition {} has no {metric:?} value",
                        r.method, r.repetition
                    ),
                ))
            }
        };
        cells
            .entry((r.repetition, r.seed))
            .or_default()
            .insert(&r.method, value);
    }
    if cells.is_empty() {
        return Err(invalid("records", "no solver records"));
    }

    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    for ((rep, seed), row) in &cells {
        for m in &methods {
            if !row.contains_key(m.as_str()) {
                return Err(invalid(
                    "records",
                    format!("no {m} record for repetition {rep} (seed {seed})"),
                ));
            }
        }
        let best = row.values().copied().fold(f64::INFINITY, f64::min);
        for (i, m) in methods.iter().enumerate() {
            let v = row[m.as_str()];
            let ratio = if v == best && v.is_finite() {
                1.0
            } else if best > 0.0 {
                v / best
            } else {
                f64::INFINITY
            };
            ratios[i].push(ratio);
        }
    }

    let max_ratio = ratios
        .iter()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .fold(1.0, f64::max);
    let steps = (4.0 * max_ratio.log2()).ceil() as i32;
    let thetas: Vec<f64> = (0..=steps).map(|i| 2f64.powf(i as f64 / 4.0)).collect();
    let count = cells.len() as f64;
    let profile = ratios
        .iter()
        .map(|rs| {
            thetas
                .iter()
                .map(|&t| rs.iter().filter(|&&r| r <= t).count() as f64 / count)
                .collect()
        })
        .collect();
    Ok(ProfileTable {
        methods,
        thetas,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentConfig, ExperimentKind};

    fn record(method: &str, rep: usize, calls: u64) -> RunRecord {
        let config = ExperimentConfig::new(ExperimentKind::CoverageSynthetic);
        RunRecord {
            schema_version: super::super::experiment::SCHEMA_VERSION,
            method: method.into(),
            repetition: rep,
            seed: rep as u64,
            config,
            objective: Some(1.0),
            lb: None,
            ub: None,
            nu: None,
            tau_max: None,
            g_evals: Some(calls),
            f_evals: Some(calls),
            wall_ms: None,
            history_len: None,
            converged: None,
            error: None,
        }
    }

    #[test]
    fn single_instance() {
        let t = performance_profile(&[record("e-g", 0, 1), record("e-thg", 0, 2)], Metric::Calls).unwrap();
        assert_eq!(t.at("e-g", 1.0), Some(1.0));
        assert_eq!(t.at("e-thg", 1.0), Some(0.0));
        assert_eq!(t.at("e-thg", 2.0), Some(1.0));
    }

    #[test]
    fn ties_give_constant_profiles() {
        let t = performance_profile(&[record("e-g", 0, 3), record("e-thg", 0, 3)], Metric::Calls).unwrap();
        assert!(t.profile.iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn split_winners() {
        let rs = [
            record("e-g", 0, 1),
            record("e-thg", 0, 2),
            record("e-g", 1, 4),
            record("e-thg", 1, 2),
        ];
        let t = performance_profile(&rs, Metric::Calls).unwrap();
        assert_eq!(t.at("e-g", 1.0), Some(0.5));
        assert_eq!(t.at("e-thg", 1.0), Some(0.5));
        assert!(t.to_csv().starts_with("theta,e-g,e-thg\n1,0.5,0.5\n"));
    }

    #[test]
    fn missing_cells_and_values_are_errors() {
        let rs = [record("e-g", 0, 1), record("e-thg", 0, 2), record("e-g", 1, 4)];
        let err = performance_profile(&rs, Metric::Calls).unwrap_err().to_string();
        assert!(err.contains("e-thg") && err.contains("repetition 1"), "{err}");
        assert!(performance_profile(&rs[..2], Metric::Time).is_err());
    }

    #[test]
    fn failures_never_win() {
        let mut failed = record("e-thg", 0, 0);
        failed.error = Some("boom".into());
        let t = performance_profile(&[record("e-g", 0, 5), failed], Metric::Calls).unwrap();
        assert_eq!(t.at("e-g", 1.0), Some(1.0));
        assert!(t.profile[1].iter().all(|&v| v == 0.0));
    }
}
