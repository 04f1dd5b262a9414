use nalgebra::DMatrix;

use super::info_gain::forward_substitute;
use super::{cholesky_lower, CovarianceMatrix, MarginalState, Members, SubmodularFn};
use crate::error::{invalid, Error, Result};
use crate::matroid::check_id;

const PIVOT_FLOOR: f64 = 1e-12;

/// Mean variance reduction `(1/|T|) Σ_{s∈T} Σ_sA Σ_AA⁻¹ Σ_As` over a set of
/// target locations `T`.
#[derive(Debug, Clone)]
pub struct VarianceReduction {
    sigma: DMatrix<f64>,
    targets: Vec<usize>,
}

impl VarianceReduction {
    /// `f_s` for a single target `s`.
    pub fn single(cov: &CovarianceMatrix, s: usize) -> Result<Self> {
        check_id(s, cov.dim())?;
        Ok(Self {
            sigma: cov.matrix().clone(),
            targets: vec![s],
        })
    }

    /// Average of `f_s` over every location `s`.
    pub fn averaged(cov: &CovarianceMatrix) -> Self {
        Self {
            sigma: cov.matrix().clone(),
            targets: (0..cov.dim()).collect(),
        }
    }

    pub fn with_targets(cov: &CovarianceMatrix, targets: Vec<usize>) -> Result<Self> {
        if targets.is_empty() {
            return Err(invalid("targets", "at least one target is required"));
        }
        targets.iter().try_for_each(|&s| check_id(s, cov.dim()))?;
        Ok(Self {
            sigma: cov.matrix().clone(),
            targets,
        })
    }
}

impl SubmodularFn for VarianceReduction {
    fn ground_size(&self) -> usize {
        self.sigma.nrows()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(VarianceState {
            f: self,
            members: Members::new(self.sigma.nrows()),
            factor: Vec::new(),
            projections: vec![Vec::new(); self.targets.len()],
            value: 0.0,
            pending: None,
        })
    }
}

struct Pending {
    e: usize,
    column: Vec<f64>,
    pivot: f64,
    /// New coordinate of every target's projection.
    coords: Vec<f64>,
}

struct VarianceState<'a> {
    f: &'a VarianceReduction,
    members: Members,
    factor: Vec<Vec<f64>>,
    /// `L⁻¹ Σ_{A,s}` per target; `f_s(A)` is its squared norm.
    projections: Vec<Vec<f64>>,
    value: f64,
    pending: Option<Pending>,
}

impl VarianceState<'_> {
    fn rebuild(&mut self, factor: Vec<Vec<f64>>) {
        let sigma = &self.f.sigma;
        let members = self.members.as_slice();
        self.projections = self
            .f
            .targets
            .iter()
            .map(|&s| forward_substitute(&factor, |i| sigma[(members[i], s)]))
            .collect();
        self.factor = factor;
    }

    fn extend(&mut self, e: usize) -> Result<Pending> {
        let sigma = &self.f.sigma;
        let members = self.members.as_slice();
        let mut column = forward_substitute(&self.factor, |i| sigma[(members[i], e)]);
        let mut pivot_sq = sigma[(e, e)] - column.iter().map(|c| c * c).sum::<f64>();
        if pivot_sq < PIVOT_FLOOR {
            let idx = self.members.with(e);
            let mut fresh = cholesky_lower(sigma, &idx)
                .filter(|l| l.last().is_some_and(|r| r[r.len() - 1].powi(2) >= PIVOT_FLOOR))
                .ok_or_else(|| Error::Numeric {
                    set: idx.clone(),
                    detail: format!("singular Σ_AA (pivot² = {pivot_sq:e})"),
                })?;
            let mut last = fresh.pop().expect("non-empty factor");
            let pivot = last.pop().expect("non-empty row");
            self.rebuild(fresh);
            column = last;
            pivot_sq = pivot * pivot;
        }
        let pivot = pivot_sq.sqrt();
        let coords = self
            .f
            .targets
            .iter()
            .zip(&self.projections)
            .map(|(&s, z)| {
                let dot: f64 = z.iter().zip(&column).map(|(a, b)| a * b).sum();
                (sigma[(s, e)] - dot) / pivot
            })
            .collect();
        Ok(Pending {
            e,
            column,
            pivot,
            coords,
        })
    }

    fn mean_sq(&self, coords: &[f64]) -> f64 {
        coords.iter().map(|u| u * u).sum::<f64>() / self.f.targets.len() as f64
    }
}

impl MarginalState for VarianceState<'_> {
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
        let gain = self.mean_sq(&p.coords);
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
        self.value += self.mean_sq(&p.coords);
        let mut row = p.column;
        row.push(p.pivot);
        self.factor.push(row);
        for (z, u) in self.projections.iter_mut().zip(p.coords) {
            z.push(u);
        }
        self.members.push(e);
        Ok(())
    }
}
