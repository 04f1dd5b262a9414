use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{RoundEngine, RoundOutput};
use crate::error::Result;
use crate::matroid::Matroid;
use crate::objectives::MarginalState;

/// Standard greedy: add the feasible element of largest marginal gain (lowest
/// id on ties) until no feasible element has positive gain.
///
/// The lazy variant keeps stale marginals in a max-heap as upper bounds and
/// only re-evaluates the top entry; both variants return the same set.
#[derive(Debug, Clone, Copy)]
pub struct Greedy {
    pub lazy: bool,
}

impl Greedy {
    pub fn lazy() -> Self {
        Self { lazy: true }
    }

    pub fn naive() -> Self {
        Self { lazy: false }
    }
}

impl RoundEngine for Greedy {
    fn round(
        &mut self,
        state: &mut dyn MarginalState,
        matroid: &dyn Matroid,
        fresh_gains: Option<&[f64]>,
    ) -> Result<RoundOutput> {
        let start = Instant::now();
        let mut out = if self.lazy {
            lazy_round(state, matroid, fresh_gains)?
        } else {
            naive_round(state, matroid)?
        };
        out.elapsed = start.elapsed();
        Ok(out)
    }
}

/// Evaluates every feasible element outside the current union, every step.
fn naive_round(state: &mut dyn MarginalState, matroid: &dyn Matroid) -> Result<RoundOutput> {
    let n = matroid.ground_size();
    let mut tracker = matroid.tracker();
    let mut out = RoundOutput::default();
    loop {
        let mut best: Option<(f64, usize)> = None;
        for e in 0..n {
            if state.contains(e) || !tracker.can_add(e) {
                continue;
            }
            let g = state.gain(e)?;
            out.evals += 1;
            if best.is_none_or(|(b, _)| g > b) {
                best = Some((g, e));
            }
        }
        match best {
            Some((g, e)) if g > 0.0 => {
                state.insert(e)?;
                tracker.add(e);
                out.set.push(e);
            }
            _ => break,
        }
    }
    Ok(out)
}

/// Heap entry: cached upper bound on `e`'s marginal, fresh if computed
/// against the current set.
#[derive(Debug)]
struct Entry {
    bound: f64,
    e: usize,
    stamp: Option<usize>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // larger bound first, then lower id
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.e.cmp(&self.e))
    }
}

fn lazy_round(
    state: &mut dyn MarginalState,
    matroid: &dyn Matroid,
    fresh_gains: Option<&[f64]>,
) -> Result<RoundOutput> {
    let n = matroid.ground_size();
    let mut tracker = matroid.tracker();
    let mut out = RoundOutput::default();
    let mut step = 0;
    let mut heap: BinaryHeap<Entry> = (0..n)
        .filter(|&e| !state.contains(e))
        .map(|e| match fresh_gains {
            Some(g) => Entry {
                bound: g[e],
                e,
                stamp: Some(0),
            },
            None => Entry {
                bound: f64::INFINITY,
                e,
                stamp: None,
            },
        })
        .collect();

    while let Some(top) = heap.pop() {
        // dependent now means dependent for every superset
        if !tracker.can_add(top.e) {
            continue;
        }
        if top.stamp == Some(step) {
            if top.bound <= 0.0 {
                break;
            }
            state.insert(top.e)?;
            tracker.add(top.e);
            out.set.push(top.e);
            step += 1;
        } else {
            let g = state.gain(top.e)?;
            out.evals += 1;
            heap.push(Entry {
                bound: g,
                e: top.e,
                stamp: Some(step),
            });
        }
    }
    Ok(out)
}
