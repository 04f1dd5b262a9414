use nalgebra::DMatrix;

use super::{CovarianceMatrix, MarginalState, Members, SubmodularFn};
use crate::error::{invalid, Error, Result};

/// Pivots below this trigger a from-scratch refactorization.
const PIVOT_FLOOR: f64 = 1e-12;

/// Information gain `½ log det(I + σ⁻² Σ_AA)` of a Gaussian process.
#[derive(Debug, Clone)]
pub struct InfoGain {
    /// `I + σ⁻² Σ`
    m: DMatrix<f64>,
}

impl InfoGain {
    pub fn new(cov: &CovarianceMatrix, noise: f64) -> Result<Self> {
        if !(noise > 0.0) {
            return Err(invalid("noise", format!("must be positive, got {noise}")));
        }
        let n = cov.dim();
        let m = DMatrix::from_fn(n, n, |i, j| cov.get(i, j) / noise + if i == j { 1.0 } else { 0.0 });
        Ok(Self { m })
    }
}

impl SubmodularFn for InfoGain {
    fn ground_size(&self) -> usize {
        self.m.nrows()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(InfoGainState {
            m: &self.m,
            members: Members::new(self.m.nrows()),
            factor: Vec::new(),
            value: 0.0,
            pending: None,
        })
    }
}

/// Lower Cholesky factor of `a[idx, idx]`, stored by rows.
///
/// Returns `None` if a pivot is not strictly positive.
pub(crate) fn cholesky_lower(a: &DMatrix<f64>, idx: &[usize]) -> Option<Vec<Vec<f64>>> {
    let mut l: Vec<Vec<f64>> = Vec::with_capacity(idx.len());
    for (i, &ei) in idx.iter().enumerate() {
        let mut row = vec![0.0; i + 1];
        for (j, &ej) in idx.iter().enumerate().take(i + 1) {
            if i == j {
                let dot: f64 = row[..j].iter().map(|r| r * r).sum();
                let d = a[(ei, ei)] - dot;
                if !(d > 0.0) {
                    return None;
                }
                row[j] = d.sqrt();
            } else {
                let dot: f64 = (0..j).map(|t| row[t] * l[j][t]).sum();
                row[j] = (a[(ei, ej)] - dot) / l[j][j];
            }
        }
        l.push(row);
    }
    Some(l)
}

/// Solves `L c = b` for lower-triangular `L` stored by rows.
pub(crate) fn forward_substitute(factor: &[Vec<f64>], b: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(factor.len());
    for (i, row) in factor.iter().enumerate() {
        let dot: f64 = row[..i].iter().zip(&c).map(|(l, c)| l * c).sum();
        c.push((b(i) - dot) / row[i]);
    }
    c
}

struct Pending {
    e: usize,
    column: Vec<f64>,
    pivot_sq: f64,
}

struct InfoGainState<'a> {
    m: &'a DMatrix<f64>,
    members: Members,
    factor: Vec<Vec<f64>>,
    value: f64,
    pending: Option<Pending>,
}

impl InfoGainState<'_> {
    fn extend(&mut self, e: usize) -> Result<Pending> {
        let members = self.members.as_slice();
        let column = forward_substitute(&self.factor, |i| self.m[(members[i], e)]);
        let pivot_sq = self.m[(e, e)] - column.iter().map(|c| c * c).sum::<f64>();
        if pivot_sq >= PIVOT_FLOOR {
            return Ok(Pending { e, column, pivot_sq });
        }
        let idx = self.members.with(e);
        let mut fresh = cholesky_lower(self.m, &idx).ok_or_else(|| Error::Numeric {
            set: idx.clone(),
            detail: format!("log-det Cholesky breakdown (pivot² = {pivot_sq:e})"),
        })?;
        let mut last = fresh.pop().expect("non-empty factor");
        let pivot = last.pop().expect("non-empty row");
        self.factor = fresh;
        Ok(Pending {
            e,
            column: last,
            pivot_sq: pivot * pivot,
        })
    }
}

impl MarginalState for InfoGainState<'_> {
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
        let p = self.extend(e)?;
        let gain = 0.5 * p.pivot_sq.ln();
        self.pending = Some(p);
        Ok(gain)
    }

    fn insert(&mut self, e: usize) -> Result<()> {
        self.members.check(e)?;
        if self.members.contains(e) {
            return Ok(());
        }
        let p = match self.pending.take() {
            Some(p) if p.e == e => p,
            _ => self.extend(e)?,
        };
        self.value += 0.5 * p.pivot_sq.ln();
        let mut row = p.column;
        row.push(p.pivot_sq.sqrt());
        self.factor.push(row);
        self.members.push(e);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    fn cov(rows: usize, data: &[f64]) -> CovarianceMatrix {
        CovarianceMatrix::new(DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    /// Direct `½ log det` via nalgebra's determinant.
    fn direct(cov: &CovarianceMatrix, noise: f64, set: &[usize]) -> f64 {
        let k = set.len();
        let sub = DMatrix::from_fn(k, k, |i, j| {
            cov.get(set[i], set[j]) / noise + if i == j { 1.0 } else { 0.0 }
        });
        0.5 * sub.determinant().ln()
    }

    fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> CovarianceMatrix {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let s = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 1e-3;
        let s = (&s + s.transpose()) * 0.5;
        CovarianceMatrix::new(s).unwrap()
    }

    #[test]
    fn closed_forms() {
        let one = cov(1, &[1.0]);
        let f = InfoGain::new(&one, 1.0).unwrap();
        assert_eq!(f.eval(&[]).unwrap(), 0.0);
        assert!((f.eval(&[0]).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        let id = cov(2, &[1.0, 0.0, 0.0, 1.0]);
        let f = InfoGain::new(&id, 1.0).unwrap();
        assert!((f.eval(&[0, 1]).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn incremental_matches_direct_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma = random_pd(&mut rng, 5);
        let f = InfoGain::new(&sigma, 1.0).unwrap();
        for mask in 1u32..32 {
            let set: Vec<usize> = (0..5).filter(|e| mask & (1 << e) != 0).collect();
            let want = direct(&sigma, 1.0, &set);
            let got = f.eval(&set).unwrap();
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1e-12),
                "{set:?}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn marginals_match_value_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = random_pd(&mut rng, 12);
        let f = InfoGain::new(&sigma, 0.5).unwrap();
        let oracle = Oracle::new(&f);
        for _ in 0..200 {
            let mut set: Vec<usize> = (0..12).filter(|_| rng.random_bool(0.4)).collect();
            let e = rng.random_range(0..12);
            set.retain(|&x| x != e);
            let mut plus = set.clone();
            plus.push(e);
            let diff = f.eval(&plus).unwrap() - f.eval(&set).unwrap();
            assert!((oracle.marginal(&set, e).unwrap() - diff).abs() < 1e-9);
        }
    }

    #[test]
    fn refactorizes_then_reports_breakdown() {
        // σ² tiny and duplicated rows: I + Σ/σ² stays PD, so no error
        let dup = cov(2, &[1.0, 1.0, 1.0, 1.0]);
        let f = InfoGain::new(&dup, 1e-3).unwrap();
        assert!(f.eval(&[0, 1]).unwrap().is_finite());
        // an indefinite "covariance" breaks the factorization
        let bad = cov(2, &[1.0, 3.0, 3.0, 1.0]);
        let f = InfoGain::new(&bad, 1.0).unwrap();
        match f.eval(&[0, 1]) {
            Err(Error::Numeric { set, .. }) => assert_eq!(set, vec![0, 1]),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }
}
