use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AesError, Result};

pub const DEFAULT_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearParams {
    pub ridge: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams {
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// `y = coefficients · x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// Ridge-regularized least squares through the normal equations. The
    /// intercept is fitted by centering and is never penalized.
    pub fn fit(x: &[Vec<f64>], y: &[f64], ridge: f64) -> Result<Self> {
        super::check_training_data(x, y)?;
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(AesError::invalid(
                "ridge must be a finite non-negative number",
            ));
        }
        let n = y.len();
        let d = x[0].len();
        let nf = n as f64;
        let x_mean: Vec<f64> = (0..d)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / nf)
            .collect();
        let y_mean = y.iter().sum::<f64>() / nf;
        if d == 0 {
            return Ok(LinearModel {
                coefficients: vec![],
                intercept: y_mean,
            });
        }
        let xc = DMatrix::from_fn(n, d, |i, j| x[i][j] - x_mean[j]);
        let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
        let mut gram = xc.transpose() * &xc;
        for j in 0..d {
            gram[(j, j)] += ridge;
        }
        let rhs = xc.transpose() * yc;
        let beta = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                // rank-deficient without ridge: minimum-norm solution
                let svd = gram.svd(true, true);
                let tol = 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE);
                svd.solve(&rhs, tol).map_err(AesError::invalid)?
            }
        };
        let intercept = y_mean - beta.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();
        Ok(LinearModel {
            coefficients: beta.iter().copied().collect(),
            intercept,
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    }
}
