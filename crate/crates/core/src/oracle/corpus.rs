//! Seeded random instances small enough for the exhaustive oracles.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::matroid::PartitionMatroid;
use crate::objectives::{
    build_covariance, CoverageFunction, ExemplarClustering, InfoGain, KernelSpec, PerturbationSpec, SubmodularFn,
    TruncatedAverage, VarianceReduction,
};

/// Unit-weight coverage over `universe` items; each element covers each item
/// independently with probability `density`.
pub fn random_coverage(rng: &mut impl Rng, n: usize, universe: usize, density: f64) -> Result<CoverageFunction> {
    let covers = (0..n)
        .map(|_| (0..universe).filter(|_| rng.random_bool(density)).collect())
        .collect();
    CoverageFunction::new(universe, covers)
}

/// Uniformly shuffled ids split into `q` non-empty parts, with budgets drawn
/// from `1..=min(max_budget, |P_j|)`.
pub fn random_partition(rng: &mut impl Rng, n: usize, q: usize, max_budget: usize) -> Result<PartitionMatroid> {
    if q == 0 || q > n {
        return Err(invalid("q", format!("need 1 ≤ q ≤ n = {n}, got {q}")));
    }
    if max_budget == 0 {
        return Err(invalid("max_budget", "must be at least 1"));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut cuts = rand::seq::index::sample(rng, n - 1, q - 1).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.sort_unstable();
    cuts.push(n);
    let mut parts = Vec::with_capacity(q);
    let mut start = 0;
    for end in cuts {
        let mut part = ids[start..end].to_vec();
        part.sort_unstable();
        parts.push(part);
        start = end;
    }
    let budgets = parts
        .iter()
        .map(|p| rng.random_range(1..=max_budget.min(p.len())))
        .collect();
    PartitionMatroid::from_parts(&parts, budgets)
}

/// A single objective under a partition constraint.
pub struct CoverageCase {
    pub seed: u64,
    pub g: CoverageFunction,
    pub matroid: PartitionMatroid,
}

/// `n ∈ [4, 10]`, universe of 12 items, 1–4 parts.
pub fn coverage_case(seed: u64) -> Result<CoverageCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=10);
    coverage_case_sized(&mut rng, seed, n, 12)
}

pub fn coverage_case_sized(rng: &mut impl Rng, seed: u64, n: usize, universe: usize) -> Result<CoverageCase> {
    let g = random_coverage(rng, n, universe, 0.3)?;
    let q = rng.random_range(1..=4.min(n));
    let matroid = random_partition(rng, n, q, 3)?;
    Ok(CoverageCase { seed, g, matroid })
}

/// A max-min instance: `k` perturbations of one coverage function.
pub struct RobustCase {
    pub seed: u64,
    pub family: Vec<Arc<dyn SubmodularFn>>,
    pub matroid: PartitionMatroid,
}

/// `k` perturbed coverage functions with `n ∈ [4, 10]`; each `Λ_i` holds
/// half the ground set.
pub fn robust_case(seed: u64, k: usize) -> Result<RobustCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=10);
    let base = coverage_case_sized(&mut rng, seed, n, 12)?;
    let spec = PerturbationSpec::generate(n, k, n / 2, rng.random())?;
    let family = spec.family(Arc::new(base.g))?;
    Ok(RobustCase {
        seed,
        family,
        matroid: base.matroid,
    })
}

/// Random points in the unit square.
pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// One instance of every objective type on a ground set of size `n`, named.
pub fn shipped_objectives(seed: u64, n: usize) -> Result<Vec<(&'static str, Arc<dyn SubmodularFn>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coverage = Arc::new(random_coverage(&mut rng, n, 12, 0.3)?);
    let weights = (0..12).map(|_| rng.random_range(0.0..3.0)).collect();
    let covers = (0..n).map(|e| coverage.covers(e).to_vec()).collect();
    let weighted = Arc::new(CoverageFunction::weighted(weights, covers)?);
    let points = random_points(&mut rng, n, 2);
    let cov = build_covariance(&points, KernelSpec::default())?;
    let spec = PerturbationSpec::generate(n, 2, n / 2, rng.random())?;
    let perturbed = spec.family(coverage.clone())?;
    let truncated = TruncatedAverage::new(perturbed.clone(), 1.5)?;
    Ok(vec![
        ("coverage", coverage as Arc<dyn SubmodularFn>),
        ("weighted-coverage", weighted),
        ("info-gain", Arc::new(InfoGain::new(&cov, 1.0)?)),
        (
            "exemplar-clustering",
            Arc::new(ExemplarClustering::with_origin(points)?),
        ),
        ("variance-reduction", Arc::new(VarianceReduction::single(&cov, 0)?)),
        (
            "variance-reduction-averaged",
            Arc::new(VarianceReduction::averaged(&cov)),
        ),
        ("perturbed-coverage", perturbed[0].clone()),
        ("truncated-average", Arc::new(truncated)),
    ])
}
