use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes and weights from the eigen-decomposition of the symmetric
    /// tridiagonal Jacobi matrix of the Hermite recurrence (Golub-Welsch).
    pub fn new(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::invalid("quadrature needs at least one point"));
        }
        let mut jacobi = DMatrix::<f64>::zeros(points, points);
        for k in 1..points {
            let b = (k as f64 / 2.0).sqrt();
            jacobi[(k, k - 1)] = b;
            jacobi[(k - 1, k)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut rule: Vec<(f64, f64)> = (0..points)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            nodes: rule.iter().map(|r| r.0).collect(),
            weights: rule.iter().map(|r| r.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[f(X)]` for `X ~ Normal(mean, sd^2)`.
    pub fn normal_expectation(&self, mean: f64, sd: f64, f: impl Fn(f64) -> f64) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sd;
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mean + scale * x))
            .sum();
        sum / std::f64::consts::PI.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_gaussian_moments() {
        let gh = GaussHermite::new(20).unwrap();
        assert_abs_diff_eq!(gh.normal_expectation(0.0, 1.0, |_| 1.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gh.normal_expectation(1.5, 2.0, |x| x), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(gh.normal_expectation(0.0, 2.0, |x| x * x), 4.0, epsilon = 1e-11);
        assert_abs_diff_eq!(gh.normal_expectation(0.0, 1.0, |x| x.powi(4)), 3.0, epsilon = 1e-11);
    }

    #[test]
    fn two_point_rule() {
        let gh = GaussHermite::new(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(gh.nodes[0], -h, epsilon = 1e-14);
        assert_abs_diff_eq!(gh.nodes[1], h, epsilon = 1e-14);
        assert_abs_diff_eq!(gh.weights[0], std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-14);
    }
}
