use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{RoundEngine, RoundOutput};
use crate::error::{invalid, Error, Result};
use crate::matroid::{IndependenceTracker, Matroid};
use crate::objectives::MarginalState;

/// `min(⌈(n_j / b_j)·ln(1/ε′)⌉, available)`.
pub fn stochastic_sample_size(part_size: usize, budget: usize, eps_prime: f64, available: usize) -> usize {
    let raw = (part_size as f64 / budget as f64 * (1.0 / eps_prime).ln()).ceil();
    (raw as usize).min(available)
}

/// Stochastic greedy adapted to partition matroids.
///
/// Until the round's set is a basis, draw a uniform sample from every part
/// that still has room, and add the sampled element of largest marginal
/// (lowest id on ties).
#[derive(Debug, Clone)]
pub struct StochasticGreedy {
    eps_prime: f64,
    rng: ChaCha8Rng,
}

impl StochasticGreedy {
    pub fn new(eps_prime: f64, seed: u64) -> Result<Self> {
        Self::from_rng(eps_prime, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn from_rng(eps_prime: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(eps_prime > 0.0 && eps_prime < 1.0) {
            return Err(invalid("eps_prime", format!("must lie in (0, 1), got {eps_prime}")));
        }
        Ok(Self { eps_prime, rng })
    }
}

impl RoundEngine for StochasticGreedy {
    fn round(
        &mut self,
        state: &mut dyn MarginalState,
        matroid: &dyn Matroid,
        _fresh_gains: Option<&[f64]>,
    ) -> Result<RoundOutput> {
        let start = Instant::now();
        let pm = matroid
            .as_partition()
            .ok_or(Error::Unsupported("stochastic greedy requires a partition matroid"))?;
        let mut tracker = pm.partition_tracker();
        let mut out = RoundOutput::default();
        let mut candidates = Vec::new();
        loop {
            candidates.clear();
            for j in 0..pm.num_parts() {
                if !tracker.has_room(j) {
                    continue;
                }
                let pool: Vec<usize> = pm.part(j).iter().copied().filter(|&e| !tracker.contains(e)).collect();
                if pool.is_empty() {
                    continue;
                }
                let size = stochastic_sample_size(pm.part(j).len(), pm.budget(j), self.eps_prime, pool.len());
                candidates.extend(sample(&mut self.rng, pool.len(), size).into_iter().map(|i| pool[i]));
            }
            if candidates.is_empty() {
                break;
            }
            let mut best: Option<(f64, usize)> = None;
            for &e in &candidates {
                let g = if state.contains(e) {
                    0.0
                } else {
                    out.evals += 1;
                    state.gain(e)?
                };
                if best.is_none_or(|(b, be)| g > b || (g == b && e < be)) {
                    best = Some((g, e));
                }
            }
            let (_, e) = best.expect("non-empty candidates");
            state.insert(e)?;
            tracker.add(e);
            out.set.push(e);
        }
        out.elapsed = start.elapsed();
        Ok(out)
    }
}
