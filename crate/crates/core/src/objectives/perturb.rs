use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MarginalState, SubmodularFn};
use crate::error::{invalid, Result};

/// Random modular perturbations: one subset `Λ_i` per objective and one
/// error value `η_e ∈ [0, 1]` per element.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub lambdas: Vec<Vec<usize>>,
    pub eta: Vec<f64>,
    pub seed: u64,
}

impl PerturbationSpec {
    /// Draws `k` subsets of size `size` (fresh composition each) and `η`.
    pub fn generate(n: usize, k: usize, size: usize, seed: u64) -> Result<Self> {
        if size > n {
            return Err(invalid("lambda_size", format!("{size} exceeds ground set size {n}")));
        }
        if k == 0 {
            return Err(invalid("k", "need at least one objective"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = (0..n).map(|_| rng.random::<f64>()).collect();
        let lambdas = (0..k)
            .map(|_| {
                let mut s = sample(&mut rng, n, size).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        Ok(Self { lambdas, eta, seed })
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    /// `f(A) + Σ_{e ∈ A∩Λ_i} η_e`.
    pub fn perturb(&self, base: Arc<dyn SubmodularFn>, i: usize) -> Result<Perturbed> {
        let n = base.ground_size();
        if self.eta.len() != n {
            return Err(invalid(
                "perturbation",
                format!("η has {} entries, ground set has {n}", self.eta.len()),
            ));
        }
        let lambda = self
            .lambdas
            .get(i)
            .ok_or_else(|| invalid("i", format!("objective {i} of {}", self.k())))?;
        let mut bonus = vec![0.0; n];
        for &e in lambda {
            bonus[e] = self.eta[e];
        }
        Ok(Perturbed { base, bonus })
    }

    pub fn family(&self, base: Arc<dyn SubmodularFn>) -> Result<Vec<Arc<dyn SubmodularFn>>> {
        (0..self.k())
            .map(|i| Ok(Arc::new(self.perturb(base.clone(), i)?) as Arc<dyn SubmodularFn>))
            .collect()
    }
}

/// A base objective plus a non-negative modular term.
pub struct Perturbed {
    base: Arc<dyn SubmodularFn>,
    bonus: Vec<f64>,
}

impl Perturbed {
    pub fn bonus(&self, e: usize) -> f64 {
        self.bonus[e]
    }
}

impl SubmodularFn for Perturbed {
    fn ground_size(&self) -> usize {
        self.bonus.len()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(PerturbedState {
            base: self.base.state(),
            bonus: &self.bonus,
            extra: 0.0,
        })
    }
}

struct PerturbedState<'a> {
    base: Box<dyn MarginalState + 'a>,
    bonus: &'a [f64],
    extra: f64,
}

impl MarginalState for PerturbedState<'_> {
    fn value(&self) -> f64 {
        self.base.value() + self.extra
    }

    fn members(&self) -> &[usize] {
        self.base.members()
    }

    fn contains(&self, e: usize) -> bool {
        self.base.contains(e)
    }

    fn gain(&mut self, e: usize) -> Result<f64> {
        let g = self.base.gain(e)?;
        Ok(if self.base.contains(e) { g } else { g + self.bonus[e] })
    }

    fn insert(&mut self, e: usize) -> Result<()> {
        if !self.base.contains(e) {
            self.base.insert(e)?;
            self.extra += self.bonus[e];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{CoverageFunction, Oracle};

    fn base() -> Arc<dyn SubmodularFn> {
        Arc::new(CoverageFunction::new(3, vec![vec![0, 1], vec![1], vec![2], vec![0, 2]]).unwrap())
    }

    fn spec() -> PerturbationSpec {
        PerturbationSpec {
            lambdas: vec![vec![1], vec![0, 2]],
            eta: vec![0.5, 0.25, 0.75, 0.1],
            seed: 0,
        }
    }

    #[test]
    fn perturbation_examples() {
        let f = spec().perturb(base(), 1).unwrap();
        // A ∩ Λ_1 = ∅
        assert_eq!(f.eval(&[1, 3]).unwrap(), 3.0);
        assert_eq!(f.eval(&[0]).unwrap(), 2.5);
        assert_eq!(f.eval(&[]).unwrap(), 0.0);
    }

    #[test]
    fn marginals_are_additive() {
        let spec = PerturbationSpec::generate(4, 3, 2, 9).unwrap();
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..3 {
            let f = spec.perturb(b.clone(), i).unwrap();
            let oracle = Oracle::new(&f);
            let plain = Oracle::new(b.as_ref());
            for _ in 0..100 {
                let set: Vec<usize> = (0..4).filter(|_| rng.random_bool(0.4)).collect();
                let Some(e) = (0..4).find(|e| !set.contains(e)) else {
                    continue;
                };
                let lam = if spec.lambdas[i].contains(&e) { spec.eta[e] } else { 0.0 };
                let want = plain.marginal(&set, e).unwrap() + lam;
                assert!((oracle.marginal(&set, e).unwrap() - want).abs() < 1e-12);
                let mut plus = set.clone();
                plus.push(e);
                let diff = f.eval(&plus).unwrap() - f.eval(&set).unwrap();
                assert!((diff - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generated_spec_shape() {
        let s = PerturbationSpec::generate(50, 4, 10, 3).unwrap();
        assert_eq!(s.lambdas.len(), 4);
        assert!(s.lambdas.iter().all(|l| l.len() == 10));
        assert!(s.eta.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(s, PerturbationSpec::generate(50, 4, 10, 3).unwrap());
        assert!(PerturbationSpec::generate(5, 1, 6, 0).is_err());
    }
}
