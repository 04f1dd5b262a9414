//! The bi-criteria driver for `max_{S ∈ I} min_i f_i(S)`.
//!
//! A binary search over the guess `γ` for the optimum. For each guess, up to
//! `ℓ` rounds of a greedy engine maximize the truncated surrogate
//! `g^γ = (1/k) Σ_i min{f_i, γ}`; the union of the rounds is accepted once
//! every `f_i` reaches `(1 − slack)·γ`. A round that falls short of its
//! guaranteed fraction `α_τ·γ` certifies `OPT < γ` and ends the guess early.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::greedy::{union_of, Greedy, RoundEngine, StochasticGreedy, ThresholdGreedy};
use crate::matroid::Matroid;
use crate::objectives::{EvalCounter, MarginalState, SubmodularFn, TruncatedAverage};

/// Upper bound on binary-search iterations.
pub const MAX_OUTER_ITERATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    /// Extended greedy without lazy evaluations or early stopping.
    #[serde(rename = "prev-e-g")]
    PrevExtendedGreedy,
    #[serde(rename = "e-g")]
    ExtendedGreedy,
    #[serde(rename = "e-thg")]
    ExtendedThresholdGreedy,
    #[serde(rename = "e-stochg")]
    ExtendedStochasticGreedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::PrevExtendedGreedy,
        Algorithm::ExtendedGreedy,
        Algorithm::ExtendedThresholdGreedy,
        Algorithm::ExtendedStochasticGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PrevExtendedGreedy => "prev-e-g",
            Algorithm::ExtendedGreedy => "e-g",
            Algorithm::ExtendedThresholdGreedy => "e-thg",
            Algorithm::ExtendedStochasticGreedy => "e-stochg",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            invalid(
                "algorithm",
                format!("unknown algorithm `{s}` (expected prev-e-g, e-g, e-thg or e-stochg)"),
            )
        })
    }
}

/// How far below `γ` a candidate may fall and still be accepted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcceptanceSlack {
    /// `(1 − ε/2)·γ`, what the approximation argument needs.
    #[default]
    Half,
    /// `(1 − ε)·γ`.
    Full,
}

impl AcceptanceSlack {
    pub fn fraction(self, epsilon: f64) -> f64 {
        match self {
            AcceptanceSlack::Half => epsilon / 2.0,
            AcceptanceSlack::Full => epsilon,
        }
    }
}

impl FromStr for AcceptanceSlack {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(AcceptanceSlack::Half),
            "full" => Ok(AcceptanceSlack::Full),
            _ => Err(invalid(
                "acceptance_slack",
                format!("expected `half` or `full`, got `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_prime: f64,
    /// Objectives used to initialize the bracket; `None` uses all of them.
    pub k_prime: Option<usize>,
    pub acceptance_slack: AcceptanceSlack,
    pub lazy: bool,
    pub early_stop: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            delta: 0.1,
            epsilon_prime: 0.1,
            k_prime: None,
            acceptance_slack: AcceptanceSlack::Half,
            lazy: true,
            early_stop: true,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("epsilon_prime", self.epsilon_prime),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        if self.k_prime == Some(0) {
            return Err(invalid("k_prime", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct RobustInstance {
    pub family: Vec<Arc<dyn SubmodularFn>>,
    pub matroid: Arc<dyn Matroid>,
    pub params: SolverParams,
}

impl fmt::Debug for RobustInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RobustInstance")
            .field("k", &self.family.len())
            .field("n", &self.matroid.ground_size())
            .field("params", &self.params)
            .finish()
    }
}

impl RobustInstance {
    pub fn new(family: Vec<Arc<dyn SubmodularFn>>, matroid: Arc<dyn Matroid>, params: SolverParams) -> Result<Self> {
        params.validate()?;
        if family.is_empty() {
            return Err(invalid("family", "need at least one objective"));
        }
        let n = matroid.ground_size();
        if let Some(i) = family.iter().position(|f| f.ground_size() != n) {
            return Err(invalid(
                "family",
                format!(
                    "objective {i} has ground set size {}, matroid has {n}",
                    family[i].ground_size()
                ),
            ));
        }
        if let Some(kp) = params.k_prime {
            if kp > family.len() {
                return Err(invalid("k_prime", format!("{kp} exceeds k = {}", family.len())));
            }
        }
        Ok(Self {
            family,
            matroid,
            params,
        })
    }

    pub fn k(&self) -> usize {
        self.family.len()
    }

    pub fn ground_size(&self) -> usize {
        self.matroid.ground_size()
    }

    fn k_prime(&self) -> usize {
        self.params.k_prime.unwrap_or(self.family.len())
    }
}

/// Number of rounds `ℓ` run per guess.
pub fn rounds_budget(k: usize, epsilon: f64, algorithm: Algorithm, delta: f64) -> usize {
    let ratio = 2.0 * k as f64 / epsilon;
    let ell = match algorithm {
        Algorithm::ExtendedThresholdGreedy => (ratio.ln() / (2.0 - delta).ln()).ceil(),
        _ => ratio.log2().ceil(),
    };
    (ell as usize).max(1)
}

/// Guaranteed fraction `α_τ` of `γ` after `τ` rounds when `OPT ≥ γ`.
pub fn alpha(tau: usize, algorithm: Algorithm, delta: f64) -> f64 {
    let base: f64 = match algorithm {
        Algorithm::ExtendedThresholdGreedy => 2.0 - delta,
        _ => 2.0,
    };
    1.0 - base.powi(-(tau as i32))
}

/// `true` iff `g^γ(S_1 ∪ … ∪ S_τ) ≥ α_τ·γ`.
pub fn check_round_guarantee(union_value: f64, gamma: f64, tau: usize, algorithm: Algorithm, delta: f64) -> bool {
    union_value >= alpha(tau, algorithm, delta) * gamma
}

/// Initial bracket around the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialBounds {
    pub lb: f64,
    pub ub: f64,
    /// The greedy solution `A^j` attaining `lb`.
    pub witness: Vec<usize>,
    /// `f_i(witness)` for every objective.
    pub witness_values: Vec<f64>,
    pub f_evals: u64,
}

/// Greedy on each of the first `k′` objectives: `ub = 2·min_i f_i(A^i)` and
/// `lb = max_j min_i f_i(A^j)`.
pub fn initialize_bounds(instance: &RobustInstance) -> Result<InitialBounds> {
    let matroid = instance.matroid.as_ref();
    let mut f_evals = 0;
    let mut ub = f64::INFINITY;
    let mut best = InitialBounds {
        lb: f64::NEG_INFINITY,
        ub: 0.0,
        witness: Vec::new(),
        witness_values: Vec::new(),
        f_evals: 0,
    };
    for f in &instance.family[..instance.k_prime()] {
        let mut state = f.state();
        let out = Greedy::lazy().round(state.as_mut(), matroid, None)?;
        f_evals += out.evals;
        ub = ub.min(2.0 * state.value());
        let values = instance
            .family
            .iter()
            .map(|g| g.eval(&out.set))
            .collect::<Result<Vec<_>>>()?;
        f_evals += values.len() as u64;
        let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
        if worst > best.lb {
            best.lb = worst;
            best.witness = out.set;
            best.witness_values = values;
        }
    }
    best.ub = ub;
    best.f_evals = f_evals;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every objective reached the acceptance threshold; `lb` raised.
    Accepted,
    /// A round fell short of `α_τ·γ`; `ub ← γ`.
    GuaranteeFailed,
    /// No element had positive surrogate gain before acceptance; `ub ← γ`.
    Saturated,
    /// `ℓ` rounds ran without acceptance; `ub ← γ`.
    Exhausted,
}

/// One binary-search iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaStep {
    pub gamma: f64,
    /// Rounds completed for this guess.
    pub rounds: usize,
    pub verdict: Verdict,
    /// `g^γ` of the union when the guess was decided.
    pub union_value: f64,
    /// `min_i f_i` of the union when the guess was decided.
    pub min_value: f64,
    /// Bracket after the update.
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Surrogate `g^γ` marginal queries, including the pre-round scans.
    pub g_evals: u64,
    /// Queries to individual `f_i`, including bracket initialization.
    pub f_evals: u64,
    /// The part of `f_evals` spent on bracket initialization.
    pub init_f_evals: u64,
    /// `ℓ`.
    pub rounds_budget: usize,
    pub outer_iterations: usize,
    /// `false` if the iteration cap stopped the search.
    pub converged: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiCriteriaResult {
    pub algorithm: Algorithm,
    /// The rounds `S_1, …, S_τ` of the returned solution; each is independent.
    pub rounds: Vec<Vec<usize>>,
    /// Their union `S^alg`.
    pub union: Vec<usize>,
    /// `f_i(S^alg)`.
    pub objective_values: Vec<f64>,
    pub lb: f64,
    pub ub: f64,
    /// `None` when the matroid cannot report it.
    pub violation_ratio: Option<usize>,
    pub history: Vec<GammaStep>,
    pub acceptance_slack: AcceptanceSlack,
    pub stats: SolveStats,
}

impl BiCriteriaResult {
    /// `min_i f_i(S^alg)`.
    pub fn min_value(&self) -> f64 {
        self.objective_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub fn gap(&self) -> f64 {
        if self.ub > 0.0 {
            (self.ub - self.lb) / self.ub
        } else {
            0.0
        }
    }
}

struct Candidate {
    rounds: Vec<Vec<usize>>,
    values: Vec<f64>,
}

enum Engine {
    Greedy(Greedy),
    Threshold(f64, bool),
    Stochastic(Box<StochasticGreedy>),
}

/// Runs the binary search and returns the accepted union that attains the
/// final `lb`. `seed` only matters for the stochastic engine.
pub fn bicriteria_solve(instance: &RobustInstance, algorithm: Algorithm, seed: u64) -> Result<BiCriteriaResult> {
    let start = Instant::now();
    let params = instance.params;
    params.validate()?;
    let early_stop = params.early_stop && algorithm != Algorithm::PrevExtendedGreedy;
    let mut engine = match algorithm {
        Algorithm::PrevExtendedGreedy => Engine::Greedy(Greedy::naive()),
        Algorithm::ExtendedGreedy => Engine::Greedy(Greedy { lazy: params.lazy }),
        Algorithm::ExtendedThresholdGreedy => {
            ThresholdGreedy::new(params.delta, params.lazy)?;
            Engine::Threshold(params.delta, params.lazy)
        }
        Algorithm::ExtendedStochasticGreedy => {
            if instance.matroid.as_partition().is_none() {
                return Err(Error::Unsupported("stochastic greedy requires a partition matroid"));
            }
            Engine::Stochastic(Box::new(StochasticGreedy::new(params.epsilon_prime, seed)?))
        }
    };

    let ell = rounds_budget(instance.k(), params.epsilon, algorithm, params.delta);
    let init = initialize_bounds(instance)?;
    let underlying = EvalCounter::new();
    underlying.add(init.f_evals);
    let mut stats = SolveStats {
        init_f_evals: init.f_evals,
        rounds_budget: ell,
        converged: true,
        ..SolveStats::default()
    };
    let (mut lb, mut ub) = (init.lb.max(0.0), init.ub.max(0.0));
    let mut best = Candidate {
        rounds: if init.witness.is_empty() {
            vec![]
        } else {
            vec![init.witness]
        },
        values: init.witness_values,
    };
    let mut history = Vec::new();
    let slack = params.acceptance_slack.fraction(params.epsilon);

    if ub <= 0.0 {
        // every greedy solution is worthless, so is every feasible set
        best = Candidate {
            rounds: vec![],
            values: vec![0.0; instance.k()],
        };
        lb = 0.0;
    }

    while ub > 0.0 && (ub - lb) / ub > 2.0 * params.epsilon {
        if stats.outer_iterations == MAX_OUTER_ITERATIONS {
            stats.converged = false;
            break;
        }
        stats.outer_iterations += 1;
        let gamma = (ub + lb) / 2.0;
        let step = guess(
            instance,
            &mut engine,
            algorithm,
            gamma,
            ell,
            early_stop,
            slack,
            &underlying,
            &mut stats,
        )
        .map_err(|e| Error::Solve {
            source: Box::new(e),
            history: history.clone(),
        })?;
        match step.verdict {
            Verdict::Accepted => {
                lb = step.min_value;
                ub = ub.max(lb);
                best = Candidate {
                    rounds: step.rounds,
                    values: step.values,
                };
            }
            _ => ub = gamma,
        }
        history.push(GammaStep {
            gamma,
            rounds: step.tau,
            verdict: step.verdict,
            union_value: step.union_value,
            min_value: step.min_value,
            lb,
            ub,
        });
    }

    stats.f_evals = underlying.get();
    stats.elapsed = start.elapsed();
    let union = union_of(&best.rounds);
    let violation_ratio = match instance.matroid.violation_ratio(&union) {
        Ok(v) => Some(v),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BiCriteriaResult {
        algorithm,
        rounds: best.rounds,
        union,
        objective_values: best.values,
        lb,
        ub,
        violation_ratio,
        history,
        acceptance_slack: params.acceptance_slack,
        stats,
    })
}

struct GuessOutcome {
    verdict: Verdict,
    tau: usize,
    rounds: Vec<Vec<usize>>,
    values: Vec<f64>,
    union_value: f64,
    min_value: f64,
}

#[allow(clippy::too_many_arguments)]
fn guess(
    instance: &RobustInstance,
    engine: &mut Engine,
    algorithm: Algorithm,
    gamma: f64,
    ell: usize,
    early_stop: bool,
    slack: f64,
    underlying: &EvalCounter,
    stats: &mut SolveStats,
) -> Result<GuessOutcome> {
    let n = instance.ground_size();
    let matroid = instance.matroid.as_ref();
    let g = TruncatedAverage::with_counter(instance.family.clone(), gamma, underlying.clone())?;
    let mut state = g.truncated_state();
    let mut threshold;
    let engine: &mut dyn RoundEngine = match engine {
        Engine::Greedy(e) => e,
        Engine::Threshold(delta, lazy) => {
            threshold = ThresholdGreedy::new(*delta, *lazy)?;
            &mut threshold
        }
        Engine::Stochastic(e) => e.as_mut(),
    };
    let accept_at = (1.0 - slack) * gamma;
    let mut rounds: Vec<Vec<usize>> = Vec::new();
    let mut gains = vec![0.0; n];
    let mut verdict = Verdict::Exhausted;
    let mut completed = 0;

    for tau in 1..=ell {
        let mut max_gain = f64::NEG_INFINITY;
        for (e, gain) in gains.iter_mut().enumerate() {
            *gain = if state.contains(e) {
                0.0
            } else {
                stats.g_evals += 1;
                state.gain(e)?
            };
            max_gain = max_gain.max(*gain);
        }
        if !(max_gain > 0.0) {
            verdict = if state.min_value() >= accept_at {
                Verdict::Accepted
            } else {
                Verdict::Saturated
            };
            break;
        }

        let out = engine.round(&mut state, matroid, Some(&gains))?;
        stats.g_evals += out.evals;
        rounds.push(out.set);
        completed = tau;

        if early_stop && !check_round_guarantee(state.value(), gamma, tau, algorithm, instance.params.delta) {
            verdict = Verdict::GuaranteeFailed;
            break;
        }
        if state.min_value() >= accept_at {
            verdict = Verdict::Accepted;
            break;
        }
    }
    rounds.retain(|r| !r.is_empty());
    debug_assert_eq!(union_of(&rounds).len(), state.members().len());
    Ok(GuessOutcome {
        verdict,
        tau: completed,
        values: state.objective_values().to_vec(),
        union_value: state.value(),
        min_value: state.min_value(),
        rounds,
    })
}
