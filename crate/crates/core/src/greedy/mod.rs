//! Greedy engines: threshold greedy, (lazy) greedy and stochastic greedy,
//! each runnable for a single round or extended over several rounds.
//!
//! An extended run grows one [`MarginalState`] across rounds, so round `τ`
//! optimizes the contracted function `g(· ∪ S_1 ∪ … ∪ S_{τ−1})` while its own
//! set `S_τ` is kept independent in the matroid.

use std::time::Duration;

use crate::error::{invalid, Result};
use crate::matroid::Matroid;
use crate::objectives::{MarginalState, SubmodularFn};

mod lazy;
mod schedule;
mod stochastic;
mod threshold;

pub use lazy::Greedy;
pub use schedule::ThresholdSchedule;
pub use stochastic::{stochastic_sample_size, StochasticGreedy};
pub use threshold::ThresholdGreedy;

/// One round's independent set together with its cost.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundOutput {
    /// Elements in insertion order.
    pub set: Vec<usize>,
    /// Marginal-gain queries issued during the round.
    pub evals: u64,
    /// Threshold passes walked (threshold greedy only).
    pub passes: usize,
    pub elapsed: Duration,
}

/// A single-round subroutine of the extended algorithms.
pub trait RoundEngine {
    /// Build one independent set on top of `state`, inserting it into
    /// `state` as it goes.
    ///
    /// `fresh_gains`, when given, holds `g_U(e)` for every `e ∉ U` computed
    /// against the current state; engines that need them may reuse them
    /// instead of re-querying.
    fn round(
        &mut self,
        state: &mut dyn MarginalState,
        matroid: &dyn Matroid,
        fresh_gains: Option<&[f64]>,
    ) -> Result<RoundOutput>;
}

/// Verdict of the per-round callback of [`run_rounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Halt,
}

/// Run up to `rounds` rounds of `engine`, calling `after(τ, round, state)`
/// after each one (τ is 1-based). Returning [`Flow::Halt`] stops the run.
pub fn run_rounds<F>(
    engine: &mut dyn RoundEngine,
    state: &mut dyn MarginalState,
    matroid: &dyn Matroid,
    rounds: usize,
    mut after: F,
) -> Result<Vec<RoundOutput>>
where
    F: FnMut(usize, &RoundOutput, &dyn MarginalState) -> Flow,
{
    if rounds == 0 {
        return Err(invalid("rounds", "need at least one round"));
    }
    let mut out = Vec::with_capacity(rounds);
    for tau in 1..=rounds {
        let round = engine.round(state, matroid, None)?;
        let flow = after(tau, &round, state);
        out.push(round);
        if flow == Flow::Halt {
            break;
        }
    }
    Ok(out)
}

fn single_round(
    engine: &mut dyn RoundEngine,
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    base: &[usize],
) -> Result<RoundOutput> {
    let mut state = g.state_at(base)?;
    engine.round(state.as_mut(), matroid, None)
}

fn extended(
    engine: &mut dyn RoundEngine,
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    rounds: usize,
) -> Result<Vec<RoundOutput>> {
    let mut state = g.state();
    run_rounds(engine, state.as_mut(), matroid, rounds, |_, _, _| Flow::Continue)
}

/// Threshold greedy on `g(· ∪ base)`.
pub fn threshold_greedy_round(
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    delta: f64,
    base: &[usize],
) -> Result<RoundOutput> {
    single_round(&mut ThresholdGreedy::new(delta, false)?, g, matroid, base)
}

pub fn extended_threshold_greedy(
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    delta: f64,
    rounds: usize,
) -> Result<Vec<RoundOutput>> {
    extended(&mut ThresholdGreedy::new(delta, false)?, g, matroid, rounds)
}

/// Greedy on `g(· ∪ base)` with lazy evaluations.
pub fn lazy_greedy(g: &dyn SubmodularFn, matroid: &dyn Matroid, base: &[usize]) -> Result<RoundOutput> {
    single_round(&mut Greedy::lazy(), g, matroid, base)
}

/// Reference greedy that evaluates every feasible element at every step.
pub fn naive_greedy(g: &dyn SubmodularFn, matroid: &dyn Matroid, base: &[usize]) -> Result<RoundOutput> {
    single_round(&mut Greedy::naive(), g, matroid, base)
}

pub fn extended_greedy(
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    rounds: usize,
    lazy: bool,
) -> Result<Vec<RoundOutput>> {
    extended(&mut Greedy { lazy }, g, matroid, rounds)
}

pub fn extended_stochastic_greedy(
    g: &dyn SubmodularFn,
    matroid: &dyn Matroid,
    eps_prime: f64,
    rounds: usize,
    seed: u64,
) -> Result<Vec<RoundOutput>> {
    extended(&mut StochasticGreedy::new(eps_prime, seed)?, g, matroid, rounds)
}

/// `S_1 ∪ … ∪ S_ℓ`, first occurrences in round order.
pub fn union_of(sets: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    sets.iter()
        .flat_map(|s| s.iter().copied())
        .filter(|&e| seen.insert(e))
        .collect()
}
