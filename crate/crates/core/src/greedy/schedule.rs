/// Geometric thresholds `d, (1−δ)d, (1−δ)²d, …` down to the last one that is
/// at least `(δ/n)·d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    values: Vec<f64>,
}

impl ThresholdSchedule {
    pub fn new(d: f64, delta: f64, n: usize) -> Self {
        let mut values = Vec::new();
        if d > 0.0 {
            let floor = delta / n as f64 * d;
            let mut w = d;
            while w >= floor {
                values.push(w);
                w *= 1.0 - delta;
            }
        }
        Self { values }
    }

    /// `⌊log(n/δ) / −log(1−δ)⌋ + 1`, the length for any `d > 0`.
    pub fn expected_len(n: usize, delta: f64) -> usize {
        ((n as f64 / delta).ln() / -(1.0 - delta).ln()).floor() as usize + 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}
