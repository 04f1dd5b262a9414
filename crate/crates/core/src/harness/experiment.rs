use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::generate::{derive_rng, generate_from, streams, DataSource, GeneratedInstance};
use crate::baselines::{greedy_on_average, random_selection, BaselineSolution, SelectionProfile};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::robust::{bicriteria_solve, Algorithm, BiCriteriaResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Method names of the two baselines in [`RunRecord::method`].
pub const RANDOM_SELECTION: &str = "rs";
pub const GREEDY_AVERAGE: &str = "g-avg";

/// One solver or baseline run, serialized as a line of JSON.
///
/// Fields that do not apply to a baseline (bracket, eval counts) are `null`;
/// so is `wall_ms` when timing is disabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub method: String,
    pub repetition: usize,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// `min_i f_i(S)` of the returned set.
    pub objective: Option<f64>,
    pub lb: Option<f64>,
    pub ub: Option<f64>,
    pub nu: Option<usize>,
    pub tau_max: Option<usize>,
    pub g_evals: Option<u64>,
    pub f_evals: Option<u64>,
    pub wall_ms: Option<f64>,
    pub history_len: Option<usize>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

impl RunRecord {
    fn blank(method: &str, repetition: usize, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            method: method.to_string(),
            repetition,
            seed: config.seed.wrapping_add(repetition as u64),
            config: config.clone(),
            objective: None,
            lb: None,
            ub: None,
            nu: None,
            tau_max: None,
            g_evals: None,
            f_evals: None,
            wall_ms: None,
            history_len: None,
            converged: None,
            error: None,
        }
    }

    fn solved(mut self, r: &BiCriteriaResult, timing: bool) -> Self {
        self.objective = Some(r.min_value());
        self.lb = Some(r.lb);
        self.ub = Some(r.ub);
        self.nu = r.violation_ratio;
        self.tau_max = Some(r.rounds.len());
        self.g_evals = Some(r.stats.g_evals);
        self.f_evals = Some(r.stats.f_evals);
        self.wall_ms = timing.then_some(r.stats.elapsed.as_secs_f64() * 1e3);
        self.history_len = Some(r.history.len());
        self.converged = Some(r.stats.converged);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock times; disable for byte-reproducible output.
    pub timing: bool,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            timing: true,
            threads: None,
        }
    }
}

/// Solver seed of `algorithm` in repetition `seed`.
fn solver_seed(seed: u64, algorithm: Algorithm) -> u64 {
    let index = Algorithm::ALL.iter().position(|&a| a == algorithm).unwrap_or(0) as u64;
    derive_rng(seed, streams::SOLVER + index).random()
}

/// Runs every configured algorithm on every repetition (repetition `r` uses
/// seed `config.seed + r`), then both baselines against the largest-ν
/// solution of each repetition.
///
/// Records come back ordered by method, then repetition, whatever the
/// thread count. Solver failures are recorded, not raised.
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let data = DataSource::load(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = options.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_cells(config, &data, options))
}

fn run_cells(config: &ExperimentConfig, data: &DataSource, options: RunOptions) -> Result<Vec<RunRecord>> {
    let reps = config.repetitions;
    let instances = (0..reps)
        .into_par_iter()
        .map(|rep| generate_from(config, data, config.seed.wrapping_add(rep as u64)))
        .collect::<Result<Vec<GeneratedInstance>>>()?;

    let cells: Vec<(Algorithm, usize)> = config
        .algorithm
        .iter()
        .flat_map(|&a| (0..reps).map(move |rep| (a, rep)))
        .collect();
    let solved: Vec<(RunRecord, Option<BiCriteriaResult>)> = cells
        .par_iter()
        .map(|&(algorithm, rep)| {
            let record = RunRecord::blank(algorithm.name(), rep, config);
            let start = Instant::now();
            match bicriteria_solve(&instances[rep].instance, algorithm, solver_seed(record.seed, algorithm)) {
                Ok(r) => (record.solved(&r, options.timing), Some(r)),
                Err(e) => {
                    let mut record = record;
                    record.error = Some(e.to_string());
                    record.wall_ms = options.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                    (record, None)
                }
            }
        })
        .collect();

    let baselines: Vec<[RunRecord; 2]> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            // first algorithm in configured order wins ties
            let worst = solved
                .iter()
                .filter(|(rec, res)| rec.repetition == rep && res.is_some())
                .filter_map(|(_, res)| res.as_ref())
                .fold(None::<&BiCriteriaResult>, |best, r| match best {
                    Some(b) if b.violation_ratio >= r.violation_ratio => Some(b),
                    _ => Some(r),
                });
            run_baselines(config, &instances[rep], rep, worst)
        })
        .collect();

    let mut records: Vec<RunRecord> = solved.into_iter().map(|(r, _)| r).collect();
    let (rs, avg): (Vec<_>, Vec<_>) = baselines.into_iter().map(|[a, b]| (a, b)).unzip();
    records.extend(rs);
    records.extend(avg);
    Ok(records)
}

fn run_baselines(
    config: &ExperimentConfig,
    generated: &GeneratedInstance,
    rep: usize,
    reference: Option<&BiCriteriaResult>,
) -> [RunRecord; 2] {
    let mut rs = RunRecord::blank(RANDOM_SELECTION, rep, config);
    let mut avg = RunRecord::blank(GREEDY_AVERAGE, rep, config);
    let Some(reference) = reference else {
        let msg = "no successful solver run to take a profile from".to_string();
        rs.error = Some(msg.clone());
        avg.error = Some(msg);
        return [rs, avg];
    };
    let family = &generated.instance.family;
    let partition = generated.partition.as_ref();
    let evaluate = |record: &mut RunRecord, solution: Result<BaselineSolution>| match solution.and_then(|s| {
        let values = family.iter().map(|f| f.eval(&s.union)).collect::<Result<Vec<_>>>()?;
        Ok((s, values))
    }) {
        Ok((s, values)) => {
            record.objective = Some(values.into_iter().fold(f64::INFINITY, f64::min).max(0.0));
            record.nu = partition.violation_ratio(&s.union).ok();
            record.tau_max = Some(s.rounds.len());
        }
        Err(e) => record.error = Some(e.to_string()),
    };
    match SelectionProfile::from_result(reference, partition) {
        Ok(profile) => {
            let seed = derive_rng(rs.seed, streams::BASELINE).random();
            evaluate(&mut rs, random_selection(&profile, partition, seed));
            evaluate(&mut avg, greedy_on_average(family, &profile, partition));
        }
        Err(e) => {
            rs.error = Some(e.to_string());
            avg.error = Some(e.to_string());
        }
    }
    [rs, avg]
}

/// One JSON object per line.
pub fn write_records<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses JSON-lines records, skipping blank lines.
pub fn read_records(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let r: RunRecord = serde_json::from_str(l).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if r.schema_version != SCHEMA_VERSION {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("schema version {} (expected {SCHEMA_VERSION})", r.schema_version),
                });
            }
            Ok(r)
        })
        .collect()
}
