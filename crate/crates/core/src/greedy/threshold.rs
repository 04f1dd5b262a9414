use std::time::Instant;

use super::{RoundEngine, RoundOutput, ThresholdSchedule};
use crate::error::{invalid, Result};
use crate::matroid::Matroid;
use crate::objectives::MarginalState;

/// Threshold greedy for a general matroid, one round per call.
///
/// Each round starts from `d = max_e g_U(e)` and walks the threshold schedule,
/// sweeping elements in increasing id order and keeping any feasible element
/// whose marginal clears the current threshold. With `lazy` set, marginals
/// from earlier passes (and rounds) serve as upper bounds, so an element whose
/// bound is already below the threshold is not re-evaluated.
#[derive(Debug, Clone)]
pub struct ThresholdGreedy {
    delta: f64,
    lazy: bool,
    bounds: Vec<f64>,
}

impl ThresholdGreedy {
    pub fn new(delta: f64, lazy: bool) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        Ok(Self {
            delta,
            lazy,
            bounds: Vec::new(),
        })
    }
}

impl RoundEngine for ThresholdGreedy {
    fn round(
        &mut self,
        state: &mut dyn MarginalState,
        matroid: &dyn Matroid,
        fresh_gains: Option<&[f64]>,
    ) -> Result<RoundOutput> {
        let start = Instant::now();
        let n = matroid.ground_size();
        if self.bounds.len() != n {
            self.bounds = vec![f64::INFINITY; n];
        }
        let mut evals = 0;
        let mut d = f64::NEG_INFINITY;
        for e in 0..n {
            if state.contains(e) {
                continue;
            }
            let g = match fresh_gains {
                Some(gains) => gains[e],
                None => {
                    evals += 1;
                    state.gain(e)?
                }
            };
            self.bounds[e] = g;
            d = d.max(g);
        }

        let mut out = RoundOutput::default();
        let schedule = ThresholdSchedule::new(d, self.delta, n);
        let mut tracker = matroid.tracker();
        for w in schedule.iter() {
            out.passes += 1;
            for e in 0..n {
                if state.contains(e) || !tracker.can_add(e) {
                    continue;
                }
                if self.lazy && self.bounds[e] < w {
                    continue;
                }
                let g = state.gain(e)?;
                evals += 1;
                self.bounds[e] = g;
                if g >= w {
                    state.insert(e)?;
                    tracker.add(e);
                    out.set.push(e);
                }
            }
        }
        out.evals = evals;
        out.elapsed = start.elapsed();
        Ok(out)
    }
}
