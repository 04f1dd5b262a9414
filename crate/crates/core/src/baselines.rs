//! Comparison baselines that spend the same per-part budget as a reference
//! bi-criteria solution: uniform random selection and greedy on the average
//! objective.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::greedy::{union_of, Greedy, RoundEngine};
use crate::matroid::{check_ids, Matroid, PartitionMatroid};
use crate::objectives::{SubmodularFn, TruncatedAverage};
use crate::robust::BiCriteriaResult;

/// Per-round, per-part counts `c_{τ,j} = |S_τ ∩ P_j|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionProfile {
    pub counts: Vec<Vec<usize>>,
}

impl SelectionProfile {
    /// Counts of `rounds`, where an element repeated from an earlier round is
    /// attributed to the round it first appeared in.
    pub fn from_rounds(rounds: &[Vec<usize>], matroid: &PartitionMatroid) -> Result<Self> {
        let n = matroid.ground_size();
        let mut seen = vec![false; n];
        let mut counts = Vec::with_capacity(rounds.len());
        for round in rounds {
            check_ids(round, n)?;
            let fresh: Vec<usize> = round
                .iter()
                .copied()
                .filter(|&e| !std::mem::replace(&mut seen[e], true))
                .collect();
            counts.push(matroid.part_counts(&fresh)?);
        }
        Ok(Self { counts })
    }

    pub fn from_result(result: &BiCriteriaResult, matroid: &PartitionMatroid) -> Result<Self> {
        Self::from_rounds(&result.rounds, matroid)
    }

    pub fn rounds(&self) -> usize {
        self.counts.len()
    }

    fn validate(&self, matroid: &PartitionMatroid) -> Result<()> {
        let q = matroid.num_parts();
        let mut totals = vec![0; q];
        for (tau, row) in self.counts.iter().enumerate() {
            if row.len() != q {
                return Err(invalid(
                    "profile",
                    format!("round {tau} has {} parts, matroid has {q}", row.len()),
                ));
            }
            for (j, &c) in row.iter().enumerate() {
                if c > matroid.budget(j) {
                    return Err(invalid(
                        "profile",
                        format!("round {tau} takes {c} from part {j} with budget {}", matroid.budget(j)),
                    ));
                }
                totals[j] += c;
            }
        }
        for (j, &t) in totals.iter().enumerate() {
            if t > matroid.part(j).len() {
                return Err(invalid(
                    "profile",
                    format!("{t} elements requested from part {j} of size {}", matroid.part(j).len()),
                ));
            }
        }
        Ok(())
    }
}

/// A baseline's rounds and their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineSolution {
    pub rounds: Vec<Vec<usize>>,
    pub union: Vec<usize>,
}

impl BaselineSolution {
    fn new(rounds: Vec<Vec<usize>>) -> Self {
        let union = union_of(&rounds);
        Self { rounds, union }
    }
}

/// Round by round, part by part, draws `c_{τ,j}` elements of `P_j` not drawn
/// before, uniformly without replacement, from one seeded stream.
pub fn random_selection(profile: &SelectionProfile, matroid: &PartitionMatroid, seed: u64) -> Result<BaselineSolution> {
    profile.validate(matroid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining: Vec<Vec<usize>> = (0..matroid.num_parts()).map(|j| matroid.part(j).to_vec()).collect();
    let mut rounds = Vec::with_capacity(profile.rounds());
    for row in &profile.counts {
        let mut round = Vec::new();
        for (pool, &c) in remaining.iter_mut().zip(row) {
            let mut picked = sample(&mut rng, pool.len(), c).into_vec();
            picked.sort_unstable_by(|a, b| b.cmp(a));
            // highest index first keeps the remaining indices valid
            for i in picked {
                round.push(pool.swap_remove(i));
            }
        }
        round.sort_unstable();
        rounds.push(round);
    }
    Ok(BaselineSolution::new(rounds))
}

/// Lazy greedy on `(1/k) Σ_i f_i`, round `τ` restricted to `c_{τ,j}` elements
/// per part and contracted on the earlier rounds.
pub fn greedy_on_average(
    family: &[Arc<dyn SubmodularFn>],
    profile: &SelectionProfile,
    matroid: &PartitionMatroid,
) -> Result<BaselineSolution> {
    profile.validate(matroid)?;
    let average = TruncatedAverage::average(family.to_vec())?;
    let mut state = average.state();
    let mut rounds = Vec::with_capacity(profile.rounds());
    for row in &profile.counts {
        let restricted = matroid.with_budgets(row.clone())?;
        rounds.push(Greedy::lazy().round(state.as_mut(), &restricted, None)?.set);
    }
    Ok(BaselineSolution::new(rounds))
}
