use super::{MarginalState, Members, SubmodularFn};
use crate::error::{invalid, Result};

/// Pairwise distances are tabulated up front below this ground-set size.
const TABLE_LIMIT: usize = 4096;

/// Exemplar-based clustering `f(A) = L({e₀}) − L(A + e₀)` with
/// `L(A) = (1/n) Σ_{e∈V} min_{v∈A} ‖x_e − x_v‖`.
#[derive(Debug, Clone)]
pub struct ExemplarClustering {
    points: Vec<Vec<f64>>,
    /// `d(e, e₀)` per element.
    to_anchor: Vec<f64>,
    /// Row-major `n × n` distances when `n ≤ TABLE_LIMIT`.
    table: Option<Vec<f64>>,
    base_loss: f64,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl ExemplarClustering {
    pub fn new(points: Vec<Vec<f64>>, anchor: &[f64]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(invalid("points", "empty point set"));
        }
        if let Some(e) = points.iter().position(|p| p.len() != anchor.len()) {
            return Err(invalid(
                "points",
                format!(
                    "point {e} has dimension {}, anchor has {}",
                    points[e].len(),
                    anchor.len()
                ),
            ));
        }
        let to_anchor: Vec<f64> = points.iter().map(|p| euclid(p, anchor)).collect();
        let base_loss = to_anchor.iter().sum::<f64>() / n as f64;
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..i {
                    let d = euclid(&points[i], &points[j]);
                    t[i * n + j] = d;
                    t[j * n + i] = d;
                }
            }
            t
        });
        Ok(Self {
            points,
            to_anchor,
            table,
            base_loss,
        })
    }

    /// Anchor at the origin.
    pub fn with_origin(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        Self::new(points, &vec![0.0; dim])
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        match &self.table {
            Some(t) => t[a * self.points.len() + b],
            None => euclid(&self.points[a], &self.points[b]),
        }
    }
}

impl SubmodularFn for ExemplarClustering {
    fn ground_size(&self) -> usize {
        self.points.len()
    }

    fn state(&self) -> Box<dyn MarginalState + '_> {
        Box::new(ClusteringState {
            f: self,
            members: Members::new(self.points.len()),
            nearest: self.to_anchor.clone(),
            value: 0.0,
        })
    }
}

struct ClusteringState<'a> {
    f: &'a ExemplarClustering,
    members: Members,
    /// `min(d(e, e₀), min_{v∈U} d(e, v))` per element.
    nearest: Vec<f64>,
    value: f64,
}

impl MarginalState for ClusteringState<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn members(&self) -> &[usize] {
        self.members.as_slice()
    }

    fn contains(&self, e: usize) -> bool {
        self.members.contains(e)
    }

    fn gain(&mut self, v: usize) -> Result<f64> {
        self.members.check(v)?;
        if self.members.contains(v) {
            return Ok(0.0);
        }
        let saved: f64 = self
            .nearest
            .iter()
            .enumerate()
            .map(|(e, &cur)| (cur - self.f.dist(e, v)).max(0.0))
            .sum();
        Ok(saved / self.nearest.len() as f64)
    }

    fn insert(&mut self, v: usize) -> Result<()> {
        self.members.check(v)?;
        if self.members.contains(v) {
            return Ok(());
        }
        for (e, cur) in self.nearest.iter_mut().enumerate() {
            *cur = cur.min(self.f.dist(e, v));
        }
        let n = self.nearest.len() as f64;
        self.value = self.f.base_loss - self.nearest.iter().sum::<f64>() / n;
        self.members.push(v);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `L({e₀}) − L(A + e₀)` straight from the definition.
    fn direct(points: &[Vec<f64>], set: &[usize]) -> f64 {
        let origin = vec![0.0; points[0].len()];
        let n = points.len() as f64;
        let base: f64 = points.iter().map(|p| euclid(p, &origin)).sum::<f64>() / n;
        let with: f64 = points
            .iter()
            .map(|p| {
                set.iter()
                    .map(|&v| euclid(p, &points[v]))
                    .fold(euclid(p, &origin), f64::min)
            })
            .sum::<f64>()
            / n;
        base - with
    }

    #[test]
    fn two_point_examples() {
        let f = ExemplarClustering::with_origin(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(f.eval(&[]).unwrap(), 0.0);
        assert!((f.eval(&[0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((f.eval(&[0, 1]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cached_marginals_match_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Vec<f64>> = (0..25)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let f = ExemplarClustering::with_origin(points.clone()).unwrap();
        for _ in 0..100 {
            let mut set: Vec<usize> = (0..25).filter(|_| rng.random_bool(0.2)).collect();
            let e = rng.random_range(0..25);
            set.retain(|&x| x != e);
            let mut st = f.state_at(&set).unwrap();
            let mut plus = set.clone();
            plus.push(e);
            assert!((st.value() - direct(&points, &set)).abs() < 1e-12);
            assert!((st.gain(e).unwrap() - (direct(&points, &plus) - direct(&points, &set))).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(ExemplarClustering::with_origin(vec![]).is_err());
        assert!(ExemplarClustering::with_origin(vec![vec![0.0], vec![1.0, 2.0]]).is_err());
    }
}
