use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Squared-exponential kernel bandwidth `h` and observation noise `σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub bandwidth: f64,
    pub noise: f64,
}

impl KernelSpec {
    pub fn new(bandwidth: f64, noise: f64) -> Result<Self> {
        if !(bandwidth > 0.0) {
            return Err(invalid("bandwidth", format!("must be positive, got {bandwidth}")));
        }
        if !(noise > 0.0) {
            return Err(invalid("noise", format!("must be positive, got {noise}")));
        }
        Ok(Self { bandwidth, noise })
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            bandwidth: 0.75,
            noise: 1.0,
        }
    }
}

/// Symmetric covariance over the ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    /// Wraps a square matrix, checking symmetry to 1e-12.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(invalid(
                "covariance",
                format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols()),
            ));
        }
        for i in 0..m.nrows() {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 {
                    return Err(invalid("covariance", format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `K[e,e'] = exp(−‖x_e − x_e'‖² / h)`.
pub fn build_covariance(features: &[Vec<f64>], kernel: KernelSpec) -> Result<CovarianceMatrix> {
    KernelSpec::new(kernel.bandwidth, kernel.noise)?;
    let Some(first) = features.first() else {
        return Err(invalid("features", "no feature vectors"));
    };
    let dim = first.len();
    if let Some(e) = features.iter().position(|x| x.len() != dim) {
        return Err(invalid(
            "features",
            format!("vector {e} has dimension {}, expected {dim}", features[e].len()),
        ));
    }
    let n = features.len();
    let mut k = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..i {
            let d2: f64 = features[i]
                .iter()
                .zip(&features[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let v = (-d2 / kernel.bandwidth).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(CovarianceMatrix(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(h: f64) -> KernelSpec {
        KernelSpec::new(h, 1.0).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let e_inv = (-1.0f64).exp();
        let k = build_covariance(&[vec![0.3, 0.4], vec![0.3, 0.4]], kernel(1.0)).unwrap();
        assert_eq!(k.get(0, 1), 1.0);
        let k = build_covariance(&[vec![0.0], vec![2.0]], kernel(4.0)).unwrap();
        assert!((k.get(0, 1) - e_inv).abs() < 1e-15);
        // ‖Δ‖² = 0.75 with h = 0.75
        let k = build_covariance(&[vec![0.0, 0.0], vec![0.75f64.sqrt(), 0.0]], kernel(0.75)).unwrap();
        assert!((k.get(0, 1) - 0.36788).abs() < 1e-5);
        assert_eq!(k.get(0, 0), 1.0);
        assert_eq!(k.get(1, 1), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_covariance(&[vec![0.0], vec![1.0, 2.0]], kernel(1.0)).is_err());
        assert!(KernelSpec::new(0.0, 1.0).is_err());
        assert!(KernelSpec::new(1.0, -1.0).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(CovarianceMatrix::new(asym).is_err());
    }
}
