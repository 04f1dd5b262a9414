//! Monotone submodular objectives behind a common oracle interface.
//!
//! A [`SubmodularFn`] is an immutable description of `g: 2^V → ℝ₊` with
//! `g(∅) = 0`. Solvers never call it directly; they grow a [`MarginalState`]
//! obtained from [`SubmodularFn::state`], which caches whatever the objective
//! needs to answer marginal queries cheaply (a Cholesky factor, a
//! nearest-distance array, a coverage mask).

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{check_id, check_ids};

mod clustering;
mod coverage;
mod info_gain;
mod kernel;
mod perturb;
mod truncated;
mod variance;

pub use clustering::ExemplarClustering;
pub use coverage::CoverageFunction;
pub use info_gain::InfoGain;
pub use kernel::{build_covariance, CovarianceMatrix, KernelSpec};
pub use perturb::{PerturbationSpec, Perturbed};
pub use truncated::{TruncatedAverage, TruncatedState};
pub use variance::VarianceReduction;

pub(crate) use info_gain::cholesky_lower;

/// A normalized monotone submodular set function over `0..ground_size()`.
pub trait SubmodularFn: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Fresh incremental state positioned at the empty set.
    fn state(&self) -> Box<dyn MarginalState + '_>;

    /// Direct evaluation of `g(set)`. Not counted.
    fn eval(&self, set: &[usize]) -> Result<f64> {
        let mut state = self.state_at(set)?;
        Ok(state.as_mut().value())
    }

    /// State positioned at `set`.
    fn state_at(&self, set: &[usize]) -> Result<Box<dyn MarginalState + '_>> {
        check_ids(set, self.ground_size())?;
        let mut state = self.state();
        for &e in set {
            state.insert(e)?;
        }
        Ok(state)
    }
}

/// Growing set `U` with cached marginal information.
pub trait MarginalState {
    /// `g(U)`.
    fn value(&self) -> f64;

    fn members(&self) -> &[usize];

    fn contains(&self, e: usize) -> bool;

    /// `g(U + e) − g(U)`; zero for members.
    fn gain(&mut self, e: usize) -> Result<f64>;

    /// `U ← U + e`. Inserting a member is a no-op.
    fn insert(&mut self, e: usize) -> Result<()>;
}

/// Shared monotone evaluation counter.
#[derive(Debug, Clone, Default)]
pub struct EvalCounter(Arc<AtomicU64>);

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, calls: u64) {
        self.0.fetch_add(calls, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Value and marginal queries on arbitrary sets, one count per query.
pub struct Oracle<'a> {
    f: &'a dyn SubmodularFn,
    counter: EvalCounter,
}

impl<'a> Oracle<'a> {
    pub fn new(f: &'a dyn SubmodularFn) -> Self {
        Self {
            f,
            counter: EvalCounter::new(),
        }
    }

    pub fn with_counter(f: &'a dyn SubmodularFn, counter: EvalCounter) -> Self {
        Self { f, counter }
    }

    pub fn value(&self, set: &[usize]) -> Result<f64> {
        self.counter.add(1);
        self.f.eval(set)
    }

    pub fn marginal(&self, set: &[usize], e: usize) -> Result<f64> {
        check_id(e, self.f.ground_size())?;
        if set.contains(&e) {
            return Err(Error::DuplicateElement { id: e });
        }
        self.counter.add(1);
        self.f.state_at(set)?.gain(e)
    }

    pub fn evals(&self) -> u64 {
        self.counter.get()
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }
}

/// Membership bookkeeping shared by the concrete states.
#[derive(Debug, Clone)]
pub(crate) struct Members {
    list: Vec<usize>,
    mask: Vec<bool>,
}

impl Members {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            list: Vec::new(),
            mask: vec![false; n],
        }
    }

    pub(crate) fn check(&self, e: usize) -> Result<()> {
        check_id(e, self.mask.len())
    }

    pub(crate) fn contains(&self, e: usize) -> bool {
        self.mask[e]
    }

    pub(crate) fn push(&mut self, e: usize) {
        debug_assert!(!self.mask[e]);
        self.mask[e] = true;
        self.list.push(e);
    }

    pub(crate) fn as_slice(&self) -> &[usize] {
        &self.list
    }

    pub(crate) fn with(&self, e: usize) -> Vec<usize> {
        let mut v = self.list.clone();
        v.push(e);
        v
    }
}

/// A set function given as a closure over member lists (insertion order).
///
/// Marginals are computed by re-evaluating the closure, so this is only meant
/// for small test objectives and counterexamples.
pub struct SetFn<F> {
    n: usize,
    f: F,
}

impl<F> SetFn<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> SubmodularFn for SetFn<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.n
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(SetFnState {
            f: &self.f,
            members: Members::new(self.n),
            value: (self.f)(&[]),
        })
    }
}

struct SetFnState<'a, F> {
    f: &'a F,
    members: Members,
    value: f64,
}

impl<F: Fn(&[usize]) -> f64> MarginalState for SetFnState<'_, F> {
    fn value(&self) -> f64 {
        self.value
    }

    fn members(&self) -> &[usize] {
        self.members.as_slice()
    }

    fn contains(&self, e: usize) -> bool {
        self.members.contains(e)
    }

    fn gain(&mut self, e: usize) -> Result<f64> {
        self.members.check(e)?;
        if self.members.contains(e) {
            return Ok(0.0);
        }
        Ok((self.f)(&self.members.with(e)) - self.value)
    }

    fn insert(&mut self, e: usize) -> Result<()> {
        self.members.check(e)?;
        if !self.members.contains(e) {
            self.members.push(e);
            self.value = (self.f)(self.members.as_slice());
        }
        Ok(())
    }
}
