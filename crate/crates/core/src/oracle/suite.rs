use std::sync::Arc;

use super::corpus::{coverage_case, robust_case, shipped_objectives};
use super::{brute_force_robust_opt, brute_force_single_opt, enumerate_independent_sets, verify_monotone_submodular};
use crate::error::Result;
use crate::greedy::{lazy_greedy, naive_greedy, threshold_greedy_round};
use crate::matroid::Matroid;
use crate::objectives::SubmodularFn;
use crate::robust::{bicriteria_solve, Algorithm, RobustInstance, SolverParams};

/// Outcome of one named check of [`verification_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, failures: Vec<String>, total: usize) -> SuiteCheck {
    SuiteCheck {
        name: name.into(),
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{total}/{total} ok"),
            Some(first) => format!("{}/{total} failed; first: {first}", failures.len()),
        },
    }
}

/// Brute-force cross-checks on `cases` seeded corpus instances.
pub fn verification_suite(seed: u64, cases: u64) -> Result<Vec<SuiteCheck>> {
    let seeds = seed..seed + cases;
    let mut out = Vec::new();

    let mut failures = Vec::new();
    let mut checked = 0;
    for s in seeds.clone() {
        for (name, f) in shipped_objectives(s, 8)? {
            checked += 1;
            if let Some(v) = verify_monotone_submodular(f.as_ref())?.violation {
                failures.push(format!("{name} (seed {s}): {v:?}"));
            }
        }
    }
    out.push(check("objectives are monotone submodular (n = 8)", failures, checked));

    let mut failures = Vec::new();
    for s in seeds.clone() {
        let case = coverage_case(s)?;
        let n = case.matroid.ground_size();
        let enumerated = enumerate_independent_sets(&case.matroid)?.count();
        let filtered = (0..1usize << n)
            .map(|mask| (0..n).filter(|e| mask & (1 << e) != 0).collect::<Vec<_>>())
            .filter(|set| case.matroid.is_independent(set).unwrap_or(false))
            .count();
        if enumerated != filtered {
            failures.push(format!("seed {s}: {enumerated} enumerated vs {filtered} independent"));
        }
    }
    out.push(check(
        "enumeration matches exhaustive filtering",
        failures,
        cases as usize,
    ));

    let mut failures = Vec::new();
    for s in seeds.clone() {
        let case = coverage_case(s)?;
        let opt = brute_force_single_opt(&case.g, &case.matroid)?.value;
        let delta = 0.1;
        let set = threshold_greedy_round(&case.g, &case.matroid, delta, &[])?.set;
        let value = case.g.eval(&set)?;
        if value < (1.0 - delta) / (2.0 - delta) * opt {
            failures.push(format!("seed {s}: {value} vs OPT {opt}"));
        }
    }
    out.push(check("threshold greedy factor (1−δ)/(2−δ)", failures, cases as usize));

    let mut failures = Vec::new();
    for s in seeds.clone() {
        let case = coverage_case(s)?;
        let lazy = lazy_greedy(&case.g, &case.matroid, &[])?.set;
        let naive = naive_greedy(&case.g, &case.matroid, &[])?.set;
        if lazy != naive {
            failures.push(format!("seed {s}: {lazy:?} vs {naive:?}"));
        }
    }
    out.push(check("lazy greedy equals naive greedy", failures, cases as usize));

    let params = SolverParams {
        epsilon: 0.1,
        ..SolverParams::default()
    };
    for algorithm in Algorithm::ALL {
        let mut failures = Vec::new();
        for s in seeds.clone() {
            let case = robust_case(s, 3)?;
            let opt = brute_force_robust_opt(&case.family, &case.matroid)?.value;
            let matroid = Arc::new(case.matroid);
            let instance = RobustInstance::new(case.family, matroid, params)?;
            let result = bicriteria_solve(&instance, algorithm, s)?;
            if result.min_value() < (1.0 - params.epsilon) * opt {
                failures.push(format!("seed {s}: {} vs OPT {opt}", result.min_value()));
            }
        }
        out.push(check(
            format!("{algorithm}: min_i f_i ≥ (1−ε)·OPT"),
            failures,
            cases as usize,
        ));
    }
    Ok(out)
}
