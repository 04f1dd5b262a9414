use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robust::{AcceptanceSlack, Algorithm, SolverParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Perturbed log-det information gain over a kernel matrix.
    InfoGain,
    /// Perturbed exemplar clustering.
    Clustering,
    /// Three averaged variance-reduction objectives (temperature, humidity,
    /// light), each perturbed.
    Sensor,
    /// Perturbed random coverage.
    CoverageSynthetic,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::InfoGain => "info-gain",
            ExperimentKind::Clustering => "clustering",
            ExperimentKind::Sensor => "sensor",
            ExperimentKind::CoverageSynthetic => "coverage-synthetic",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ExperimentKind::InfoGain,
            ExperimentKind::Clustering,
            ExperimentKind::Sensor,
            ExperimentKind::CoverageSynthetic,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown kind `{s}` (expected info-gain, clustering, sensor or coverage-synthetic)"
            ))
        })
    }
}

/// Everything needed to generate instances and run the solvers.
///
/// Read from flat `key = value` text whose keys are the field names; `#`
/// starts a comment. `algorithm` takes a comma-separated list or `all`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub algorithm: Vec<Algorithm>,
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_prime: f64,
    pub k: usize,
    pub k_prime: Option<usize>,
    /// Number of parts of the partition matroid.
    pub q: usize,
    /// Per-part budget.
    pub b: usize,
    /// `|Λ_i|`; capped at `n/2` when omitted.
    pub lambda_size: Option<usize>,
    /// Ground-set size for synthetic data; ignored when a dataset is given.
    pub n: usize,
    pub bandwidth: f64,
    pub noise: f64,
    pub seed: u64,
    pub dataset: Option<PathBuf>,
    pub repetitions: usize,
    pub acceptance_slack: AcceptanceSlack,
    pub lazy: bool,
    pub early_stop: bool,
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        let (k, q, b, lambda, n) = match kind {
            ExperimentKind::InfoGain => (20, 3, 5, 1000, 200),
            ExperimentKind::Clustering => (20, 6, 70, 500, 200),
            ExperimentKind::Sensor => (3, 3, 1, 15, 44),
            ExperimentKind::CoverageSynthetic => (20, 5, 5, 100, 200),
        };
        Self {
            kind,
            algorithm: Algorithm::ALL.to_vec(),
            epsilon: 0.01,
            delta: 0.1,
            epsilon_prime: 0.1,
            k,
            k_prime: None,
            q,
            b,
            lambda_size: Some(lambda),
            n,
            bandwidth: 0.75,
            noise: 1.0,
            seed: 0,
            dataset: None,
            repetitions: 20,
            acceptance_slack: AcceptanceSlack::Half,
            lazy: true,
            early_stop: true,
        }
    }

    pub fn params(&self) -> SolverParams {
        SolverParams {
            epsilon: self.epsilon,
            delta: self.delta,
            epsilon_prime: self.epsilon_prime,
            k_prime: self.k_prime,
            acceptance_slack: self.acceptance_slack,
            lazy: self.lazy,
            early_stop: self.early_stop,
        }
    }

    /// `|Λ_i|` for a ground set of size `n`.
    pub fn lambda_size_for(&self, n: usize) -> usize {
        self.lambda_size.unwrap_or(usize::MAX).min(n / 2)
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate().map_err(|e| Error::Config(e.to_string()))?;
        let positive = [
            ("k", self.k),
            ("q", self.q),
            ("b", self.b),
            ("n", self.n),
            ("repetitions", self.repetitions),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("`{name}` must be at least 1")));
        }
        if self.algorithm.is_empty() {
            return Err(Error::Config("`algorithm` lists no algorithm".into()));
        }
        if !(self.bandwidth > 0.0 && self.noise > 0.0) {
            return Err(Error::Config("`bandwidth` and `noise` must be positive".into()));
        }
        if self.kind == ExperimentKind::Sensor && self.k != 3 {
            return Err(Error::Config(format!(
                "sensor experiments have exactly 3 objectives, got k = {}",
                self.k
            )));
        }
        if self.k_prime.is_some_and(|kp| kp == 0 || kp > self.k) {
            return Err(Error::Config(format!("`k_prime` must lie in [1, k = {}]", self.k)));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses `key = value` lines. `kind` may appear anywhere; the defaults
    /// of that kind fill the remaining keys.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            pairs.push((i + 1, key.trim().to_string(), value.trim().to_string()));
        }
        let kind = match pairs.iter().find(|(_, k, _)| k == "kind") {
            Some((_, _, v)) => v.parse()?,
            None => return Err(Error::Config("missing `kind`".into())),
        };
        let mut config = Self::new(kind);
        for (line, key, value) in &pairs {
            config.set(key, value).map_err(|e| Error::Parse {
                line: *line,
                message: e.to_string(),
            })?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
        }
        fn optional<T: FromStr>(key: &str, v: &str) -> Result<Option<T>> {
            if v.is_empty() || v == "none" {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        match key {
            "kind" => self.kind = value.parse()?,
            "algorithm" => {
                self.algorithm = if value == "all" {
                    Algorithm::ALL.to_vec()
                } else {
                    value
                        .split(',')
                        .map(|a| a.trim().parse::<Algorithm>())
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| Error::Config(e.to_string()))?
                }
            }
            "epsilon" => self.epsilon = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "epsilon_prime" => self.epsilon_prime = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "k_prime" => self.k_prime = optional(key, value)?,
            "q" => self.q = num(key, value)?,
            "b" => self.b = num(key, value)?,
            "lambda_size" => self.lambda_size = optional(key, value)?,
            "n" => self.n = num(key, value)?,
            "bandwidth" => self.bandwidth = num(key, value)?,
            "noise" => self.noise = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "dataset" => self.dataset = (!value.is_empty()).then(|| PathBuf::from(value)),
            "repetitions" => self.repetitions = num(key, value)?,
            "acceptance_slack" => {
                self.acceptance_slack = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "lazy" => self.lazy = num(key, value)?,
            "early_stop" => self.early_stop = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}
