use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{ExperimentConfig, ExperimentKind};
use super::data::{correlation, load_features, read_table};
use crate::error::{Error, Result};
use crate::matroid::PartitionMatroid;
use crate::objectives::{
    build_covariance, CovarianceMatrix, CoverageFunction, ExemplarClustering, InfoGain, KernelSpec, PerturbationSpec,
    SubmodularFn, VarianceReduction,
};
use crate::oracle::corpus::random_coverage;
use crate::robust::RobustInstance;

/// `(base seed, stream id)` → independent generator; a new stream never
/// shifts the draws of existing ones.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) mod streams {
    pub const DATA: u64 = 0;
    pub const PERTURBATION: u64 = 1;
    pub const PARTITION: u64 = 2;
    pub const BASELINE: u64 = 3;
    /// Solver streams are `SOLVER + algorithm index`.
    pub const SOLVER: u64 = 16;
}

/// Dataset contents loaded once per experiment.
#[derive(Debug, Clone)]
pub enum DataSource {
    Synthetic,
    Features(Vec<Vec<f64>>),
    /// One correlation matrix per measured quantity.
    Sensors(Vec<CovarianceMatrix>),
}

/// Diagonal jitter on empirical sensor correlations.
const SENSOR_JITTER: f64 = 1e-6;

impl DataSource {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let Some(path) = &config.dataset else {
            return Ok(DataSource::Synthetic);
        };
        match config.kind {
            ExperimentKind::InfoGain | ExperimentKind::Clustering => Ok(DataSource::Features(load_features(path)?)),
            ExperimentKind::Sensor => {
                // temperature;humidity;light
                let text = path.to_string_lossy();
                let paths: Vec<&str> = text.split(';').collect();
                if paths.len() != 3 {
                    return Err(Error::Config(format!(
                        "sensor dataset needs three `;`-separated CSV paths, got {}",
                        paths.len()
                    )));
                }
                let mut mats = Vec::new();
                for p in paths {
                    let table = read_table(std::fs::File::open(Path::new(p))?)?;
                    mats.push(CovarianceMatrix::new(correlation(&table.rows, SENSOR_JITTER))?);
                }
                if mats.iter().any(|m| m.dim() != mats[0].dim()) {
                    return Err(Error::Config("sensor CSVs list different numbers of sensors".into()));
                }
                Ok(DataSource::Sensors(mats))
            }
            ExperimentKind::CoverageSynthetic => {
                Err(Error::Config("coverage-synthetic experiments take no dataset".into()))
            }
        }
    }
}

/// A generated instance together with the concrete partition matroid.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: RobustInstance,
    pub partition: Arc<PartitionMatroid>,
    pub perturbation: PerturbationSpec,
}

pub fn generate_instance(config: &ExperimentConfig, seed: u64) -> Result<GeneratedInstance> {
    generate_from(config, &DataSource::load(config)?, seed)
}

/// Base objectives, perturbations and partition for one repetition.
pub fn generate_from(config: &ExperimentConfig, data: &DataSource, seed: u64) -> Result<GeneratedInstance> {
    config.validate()?;
    let mut rng = derive_rng(seed, streams::DATA);
    let kernel = KernelSpec::new(config.bandwidth, config.noise)?;
    let bases: Vec<Arc<dyn SubmodularFn>> = match (config.kind, data) {
        (ExperimentKind::InfoGain, _) => {
            let features = features_or_cloud(data, &mut rng, config.n, 22)?;
            let cov = build_covariance(&features, kernel)?;
            vec![Arc::new(InfoGain::new(&cov, config.noise)?)]
        }
        (ExperimentKind::Clustering, _) => {
            let features = features_or_cloud(data, &mut rng, config.n, 20)?;
            vec![Arc::new(ExemplarClustering::with_origin(features)?)]
        }
        (ExperimentKind::Sensor, DataSource::Sensors(mats)) => mats
            .iter()
            .map(|m| Arc::new(VarianceReduction::averaged(m)) as Arc<dyn SubmodularFn>)
            .collect(),
        (ExperimentKind::Sensor, _) => synthetic_sensors(&mut rng, config.n, config.bandwidth)?
            .iter()
            .map(|m| Arc::new(VarianceReduction::averaged(m)) as Arc<dyn SubmodularFn>)
            .collect(),
        (ExperimentKind::CoverageSynthetic, _) => {
            vec![Arc::new(synthetic_coverage(&mut rng, config.n)?)]
        }
    };
    let n = bases[0].ground_size();

    let lambda = config.lambda_size_for(n);
    let perturbation =
        PerturbationSpec::generate(n, config.k, lambda, derive_rng(seed, streams::PERTURBATION).random())?;
    let family = if bases.len() == 1 {
        perturbation.family(bases[0].clone())?
    } else {
        bases
            .iter()
            .enumerate()
            .map(|(i, b)| Ok(Arc::new(perturbation.perturb(b.clone(), i)?) as Arc<dyn SubmodularFn>))
            .collect::<Result<Vec<_>>>()?
    };

    let partition = Arc::new(random_partition(
        &mut derive_rng(seed, streams::PARTITION),
        n,
        config.q,
        config.b,
    )?);
    let instance = RobustInstance::new(family, partition.clone(), config.params())?;
    Ok(GeneratedInstance {
        instance,
        partition,
        perturbation,
    })
}

/// Shuffled ids dealt into `q` parts of near-equal size, budget `b` each.
pub fn random_partition(rng: &mut impl Rng, n: usize, q: usize, b: usize) -> Result<PartitionMatroid> {
    if q > n {
        return Err(Error::Config(format!(
            "cannot split {n} elements into {q} non-empty parts"
        )));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut part_of = vec![0; n];
    for (pos, &e) in ids.iter().enumerate() {
        part_of[e] = pos % q;
    }
    PartitionMatroid::new(part_of, vec![b; q])
}

fn features_or_cloud(data: &DataSource, rng: &mut impl Rng, n: usize, dim: usize) -> Result<Vec<Vec<f64>>> {
    match data {
        DataSource::Features(f) => Ok(f.clone()),
        DataSource::Synthetic => {
            let mut cloud = gaussian_cloud(rng, n, dim, 5);
            super::data::normalize(&mut cloud);
            Ok(cloud)
        }
        DataSource::Sensors(_) => Err(Error::Config("sensor data given for a feature-based experiment".into())),
    }
}

/// `n` points around `clusters` random centers in `ℝ^dim`.
pub fn gaussian_cloud(rng: &mut impl Rng, n: usize, dim: usize, clusters: usize) -> Vec<Vec<f64>> {
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    (0..n)
        .map(|_| {
            let c = &centers[rng.random_range(0..clusters)];
            c.iter()
                .map(|x| x + 0.5 * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect()
}

/// Three kernels over the same random layout on a 6 × 6 floor, with
/// bandwidths `h`, `2h` and `h/2` standing in for three measured quantities.
fn synthetic_sensors(rng: &mut impl Rng, n: usize, h: f64) -> Result<Vec<CovarianceMatrix>> {
    let locations: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.random_range(0.0..6.0), rng.random_range(0.0..6.0)])
        .collect();
    [1.0, 2.0, 0.5]
        .iter()
        .map(|scale| {
            let k = build_covariance(&locations, KernelSpec::new(h * scale, 1.0)?)?;
            CovarianceMatrix::new(k.matrix() + nalgebra::DMatrix::identity(n, n) * SENSOR_JITTER)
        })
        .collect()
}

/// Each element covers about 5% of `n/2` items.
fn synthetic_coverage(rng: &mut impl Rng, n: usize) -> Result<CoverageFunction> {
    random_coverage(rng, n, (n / 2).max(1), 0.05)
}
