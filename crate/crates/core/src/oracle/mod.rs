//! Exhaustive reference implementations for desk-sized instances.
//!
//! These are the ground truth the solvers are tested against: independent-set
//! enumeration, exact single-objective and max-min optima, and an exhaustive
//! monotonicity/submodularity checker.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::objectives::SubmodularFn;

pub mod corpus;
mod suite;

pub use suite::{verification_suite, SuiteCheck};

/// Largest ground set [`enumerate_independent_sets`] accepts by default.
pub const ENUMERATION_LIMIT: usize = 25;
/// Largest ground set [`verify_monotone_submodular`] accepts by default.
pub const PROPERTY_CHECK_LIMIT: usize = 12;

/// Every independent set, in lexicographic order of sorted member lists.
///
/// Depth-first in increasing id order; a dependent set is never extended,
/// which loses nothing because independence is downward closed.
pub struct IndependentSets<'a> {
    matroid: &'a dyn Matroid,
    current: Vec<usize>,
    next: usize,
    started: bool,
}

impl Iterator for IndependentSets<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            return Some(Vec::new());
        }
        let n = self.matroid.ground_size();
        loop {
            while self.next < n {
                let e = self.next;
                self.next += 1;
                // e exceeds every member, so the query is always well-formed
                if self.matroid.can_extend(&self.current, e).unwrap_or(false) {
                    self.current.push(e);
                    return Some(self.current.clone());
                }
            }
            self.next = self.current.pop()? + 1;
        }
    }
}

pub fn enumerate_independent_sets(matroid: &dyn Matroid) -> Result<IndependentSets<'_>> {
    enumerate_independent_sets_with_limit(matroid, ENUMERATION_LIMIT)
}

/// As [`enumerate_independent_sets`] with an explicit size guard.
pub fn enumerate_independent_sets_with_limit(matroid: &dyn Matroid, limit: usize) -> Result<IndependentSets<'_>> {
    let n = matroid.ground_size();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(IndependentSets {
        matroid,
        current: Vec::new(),
        next: 0,
        started: false,
    })
}

/// An exact optimum over all independent sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// Lexicographically least optimal set.
    pub set: Vec<usize>,
    pub value: f64,
    /// Number of independent sets examined.
    pub enumerated: usize,
}

fn maximize(matroid: &dyn Matroid, mut value: impl FnMut(&[usize]) -> Result<f64>) -> Result<ExactResult> {
    let mut best = ExactResult {
        set: Vec::new(),
        value: f64::NEG_INFINITY,
        enumerated: 0,
    };
    for set in enumerate_independent_sets(matroid)? {
        best.enumerated += 1;
        let v = value(&set)?;
        if v > best.value {
            best.value = v;
            best.set = set;
        }
    }
    Ok(best)
}

/// `max_{S ∈ I} g(S)`.
pub fn brute_force_single_opt(g: &dyn SubmodularFn, matroid: &dyn Matroid) -> Result<ExactResult> {
    maximize(matroid, |s| g.eval(s))
}

/// `max_{S ∈ I} min_i f_i(S)`.
pub fn brute_force_robust_opt(family: &[Arc<dyn SubmodularFn>], matroid: &dyn Matroid) -> Result<ExactResult> {
    if family.is_empty() {
        return Err(crate::error::invalid("family", "need at least one objective"));
    }
    maximize(matroid, |s| {
        family.iter().try_fold(f64::INFINITY, |m, f| Ok(m.min(f.eval(s)?)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyKind {
    Monotonicity,
    Submodularity,
}

/// A witness `A ⊆ B` (and `e ∉ B` for submodularity) with the values that
/// break the property.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: PropertyKind,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub e: Option<usize>,
    /// `(g(A), g(B))` for monotonicity, `(g_A(e), g_B(e))` for submodularity.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub n: usize,
    /// Number of `(A, B)` pairs examined before stopping.
    pub pairs_checked: u64,
    pub violation: Option<Violation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn verify_monotone_submodular(g: &dyn SubmodularFn) -> Result<PropertyReport> {
    verify_monotone_submodular_with_limit(g, PROPERTY_CHECK_LIMIT)
}

/// Checks `g(A) ≤ g(B)` and `g_A(e) ≥ g_B(e)` over every `A ⊆ B ⊆ V`,
/// `e ∉ B`, stopping at the first violation (up to a relative 1e-9).
pub fn verify_monotone_submodular_with_limit(g: &dyn SubmodularFn, limit: usize) -> Result<PropertyReport> {
    let n = g.ground_size();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    let full = 1usize << n;
    let values = (0..full)
        .map(|mask| g.eval(&members(mask, n)))
        .collect::<Result<Vec<_>>>()?;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;

    let mut report = PropertyReport {
        n,
        pairs_checked: 0,
        violation: None,
    };
    for b in 0..full {
        // submasks of b in increasing order
        let mut a = 0usize;
        loop {
            report.pairs_checked += 1;
            if values[a] > values[b] + tol {
                report.violation = Some(Violation {
                    kind: PropertyKind::Monotonicity,
                    a: members(a, n),
                    b: members(b, n),
                    e: None,
                    lhs: values[a],
                    rhs: values[b],
                });
                return Ok(report);
            }
            for e in (0..n).filter(|e| b & (1 << e) == 0) {
                let ga = values[a | 1 << e] - values[a];
                let gb = values[b | 1 << e] - values[b];
                if ga < gb - tol {
                    report.violation = Some(Violation {
                        kind: PropertyKind::Submodularity,
                        a: members(a, n),
                        b: members(b, n),
                        e: Some(e),
                        lhs: ga,
                        rhs: gb,
                    });
                    return Ok(report);
                }
            }
            if a == b {
                break;
            }
            a = (a.wrapping_sub(b)) & b;
        }
    }
    Ok(report)
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|e| mask & (1 << e) != 0).collect()
}
