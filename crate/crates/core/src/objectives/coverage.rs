use super::{MarginalState, Members, SubmodularFn};
use crate::error::{invalid, Result};

/// Weighted coverage: `g(S) = Σ_{u ∈ ∪_{e∈S} C_e} w_u`.
#[derive(Debug, Clone)]
pub struct CoverageFunction {
    covers: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl CoverageFunction {
    /// Unit weights over a universe of `universe` items.
    pub fn new(universe: usize, covers: Vec<Vec<usize>>) -> Result<Self> {
        Self::weighted(vec![1.0; universe], covers)
    }

    pub fn weighted(weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        if covers.is_empty() {
            return Err(invalid("covers", "ground set must be non-empty"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(invalid("weights", format!("negative or NaN weight {w}")));
        }
        for (e, c) in covers.iter().enumerate() {
            if let Some(u) = c.iter().find(|&&u| u >= weights.len()) {
                return Err(invalid(
                    "covers",
                    format!("element {e} covers item {u} outside a universe of {}", weights.len()),
                ));
            }
        }
        let covers = covers
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        Ok(Self { covers, weights })
    }

    pub fn universe(&self) -> usize {
        self.weights.len()
    }

    pub fn covers(&self, e: usize) -> &[usize] {
        &self.covers[e]
    }
}

impl SubmodularFn for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(CoverageState {
            f: self,
            members: Members::new(self.covers.len()),
            covered: vec![false; self.weights.len()],
            value: 0.0,
        })
    }
}

struct CoverageState<'a> {
    f: &'a CoverageFunction,
    members: Members,
    covered: Vec<bool>,
    value: f64,
}

impl MarginalState for CoverageState<'_> {
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
        Ok(self.f.covers[e]
            .iter()
            .filter(|&&u| !self.covered[u])
            .map(|&u| self.f.weights[u])
            .sum())
    }

    fn insert(&mut self, e: usize) -> Result<()> {
        self.members.check(e)?;
        if self.members.contains(e) {
            return Ok(());
        }
        for &u in &self.f.covers[e] {
            if !self.covered[u] {
                self.covered[u] = true;
                self.value += self.f.weights[u];
            }
        }
        self.members.push(e);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1↦{a,b}, 2↦{b}, 3↦{c}, 4↦{a,c}, written 0-based
    fn example() -> CoverageFunction {
        CoverageFunction::new(3, vec![vec![0, 1], vec![1], vec![2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn values_and_marginals() {
        let f = example();
        assert_eq!(f.eval(&[]).unwrap(), 0.0);
        assert_eq!(f.eval(&[0, 3]).unwrap(), 3.0);
        assert_eq!(f.eval(&[0, 1, 2, 3]).unwrap(), 3.0);
        let mut st = f.state_at(&[0]).unwrap();
        assert_eq!(st.gain(3).unwrap(), 1.0);
        assert_eq!(st.gain(1).unwrap(), 0.0);
        assert_eq!(st.gain(0).unwrap(), 0.0);
    }

    #[test]
    fn weighted_values() {
        let f = CoverageFunction::weighted(vec![0.5, 2.0], vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(f.eval(&[1]).unwrap(), 2.5);
        assert_eq!(f.eval(&[0]).unwrap(), 0.5);
    }

    #[test]
    fn rejects_out_of_universe_items() {
        assert!(CoverageFunction::new(2, vec![vec![0, 2]]).is_err());
        assert!(CoverageFunction::new(2, vec![]).is_err());
        assert!(CoverageFunction::weighted(vec![-1.0], vec![vec![0]]).is_err());
    }
}
