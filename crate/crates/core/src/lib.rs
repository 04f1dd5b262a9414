//! Robust monotone submodular maximization under matroid constraints.
//!
//! Given monotone submodular `f_1, …, f_k` and a matroid, [`bicriteria_solve`]
//! returns a union of a few independent sets whose worst objective is close to
//! `max_{S ∈ I} min_i f_i(S)`. The pieces are usable on their own: matroid
//! oracles ([`matroid`]), objectives with incremental marginals
//! ([`objectives`]), the greedy engines ([`greedy`]), comparison baselines
//! ([`baselines`]), exhaustive reference solvers ([`oracle`]) and the
//! experiment harness ([`harness`]).

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod greedy;
pub mod harness;
pub mod matroid;
pub mod objectives;
pub mod oracle;
pub mod robust;

pub use error::{Error, Result};
pub use matroid::{IndependenceTracker, Matroid, PartitionMatroid, UniformMatroid};
pub use objectives::{EvalCounter, MarginalState, Oracle, SubmodularFn};
pub use robust::{
    bicriteria_solve, AcceptanceSlack, Algorithm, BiCriteriaResult, GammaStep, RobustInstance, SolverParams, Verdict,
};
