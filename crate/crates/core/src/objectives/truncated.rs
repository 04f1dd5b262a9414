use std::sync::Arc;

use super::{EvalCounter, MarginalState, Members, SubmodularFn};
use crate::error::{invalid, Result};

/// `g^γ(S) = (1/k) Σ_i min{f_i(S), γ}`.
///
/// Every evaluation of `g^γ` evaluates each `f_i` once; those underlying calls
/// are tallied on [`TruncatedAverage::underlying`]. With `γ = ∞` this is the
/// plain average of the family.
pub struct TruncatedAverage {
    family: Vec<Arc<dyn SubmodularFn>>,
    gamma: f64,
    underlying: EvalCounter,
}

impl TruncatedAverage {
    pub fn new(family: Vec<Arc<dyn SubmodularFn>>, gamma: f64) -> Result<Self> {
        Self::with_counter(family, gamma, EvalCounter::new())
    }

    pub fn with_counter(family: Vec<Arc<dyn SubmodularFn>>, gamma: f64, underlying: EvalCounter) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(invalid("gamma", format!("must be positive, got {gamma}")));
        }
        let Some(first) = family.first() else {
            return Err(invalid("family", "need at least one objective"));
        };
        let n = first.ground_size();
        if let Some(i) = family.iter().position(|f| f.ground_size() != n) {
            return Err(invalid("family", format!("objective {i} has a different ground set")));
        }
        Ok(Self {
            family,
            gamma,
            underlying,
        })
    }

    /// `(1/k) Σ_i f_i`.
    pub fn average(family: Vec<Arc<dyn SubmodularFn>>) -> Result<Self> {
        Self::new(family, f64::INFINITY)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.family.len()
    }

    pub fn underlying(&self) -> &EvalCounter {
        &self.underlying
    }

    pub fn truncated_state(&self) -> TruncatedState<'_> {
        TruncatedState {
            parent: self,
            children: self.family.iter().map(|f| f.state()).collect(),
            members: Members::new(self.family[0].ground_size()),
            values: vec![0.0; self.family.len()],
            value: 0.0,
        }
    }

    fn combine(&self, values: &[f64]) -> f64 {
        values.iter().map(|v| v.min(self.gamma)).sum::<f64>() / values.len() as f64
    }
}

impl SubmodularFn for TruncatedAverage {
    fn ground_size(&self) -> usize {
        self.family[0].ground_size()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(self.truncated_state())
    }

    fn eval(&self, set: &[usize]) -> Result<f64> {
        let values = self.family.iter().map(|f| f.eval(set)).collect::<Result<Vec<_>>>()?;
        self.underlying.add(values.len() as u64);
        Ok(self.combine(&values))
    }
}

pub struct TruncatedState<'a> {
    parent: &'a TruncatedAverage,
    children: Vec<Box<dyn MarginalState + 'a>>,
    members: Members,
    values: Vec<f64>,
    value: f64,
}

impl TruncatedState<'_> {
    /// `f_i(U)` for every objective.
    pub fn objective_values(&self) -> &[f64] {
        &self.values
    }

    /// `min_i f_i(U)`.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl MarginalState for TruncatedState<'_> {
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
        let gamma = self.parent.gamma;
        let mut total = 0.0;
        for (child, &v) in self.children.iter_mut().zip(&self.values) {
            let d = child.gain(e)?;
            total += (v + d).min(gamma) - v.min(gamma);
        }
        self.parent.underlying.add(self.children.len() as u64);
        Ok(total / self.children.len() as f64)
    }

    fn insert(&mut self, e: usize) -> Result<()> {
        self.members.check(e)?;
        if self.members.contains(e) {
            return Ok(());
        }
        for (child, v) in self.children.iter_mut().zip(self.values.iter_mut()) {
            child.insert(e)?;
            *v = child.value();
        }
        self.value = self.parent.combine(&self.values);
        self.members.push(e);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Oracle, SetFn};

    fn constant_family(a: f64, b: f64) -> Vec<Arc<dyn SubmodularFn>> {
        vec![
            Arc::new(SetFn::new(2, move |s: &[usize]| if s.is_empty() { 0.0 } else { a })),
            Arc::new(SetFn::new(2, move |s: &[usize]| if s.is_empty() { 0.0 } else { b })),
        ]
    }

    #[test]
    fn truncation_examples() {
        let g = TruncatedAverage::new(constant_family(3.0, 1.0), 2.0).unwrap();
        assert_eq!(g.eval(&[0]).unwrap(), 1.5);
        let g = TruncatedAverage::new(constant_family(3.0, 5.0), 2.0).unwrap();
        assert_eq!(g.eval(&[0]).unwrap(), 2.0);
        assert!(TruncatedAverage::new(constant_family(1.0, 1.0), 0.0).is_err());
        assert!(TruncatedAverage::new(constant_family(1.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn counts_surrogate_and_underlying_separately() {
        let g = TruncatedAverage::new(constant_family(3.0, 1.0), 2.0).unwrap();
        let oracle = Oracle::new(&g);
        oracle.value(&[0]).unwrap();
        oracle.marginal(&[], 1).unwrap();
        oracle.marginal(&[0], 1).unwrap();
        assert_eq!(oracle.evals(), 3);
        assert_eq!(g.underlying().get(), 6);
    }

    #[test]
    fn state_tracks_objective_values() {
        let g = TruncatedAverage::new(constant_family(3.0, 1.0), 2.0).unwrap();
        let mut st = g.truncated_state();
        assert_eq!(st.gain(0).unwrap(), 1.5);
        st.insert(0).unwrap();
        assert_eq!(st.objective_values(), &[3.0, 1.0]);
        assert_eq!(st.min_value(), 1.0);
        assert_eq!(st.value(), 1.5);
        assert_eq!(st.gain(1).unwrap(), 0.0);
    }
}
