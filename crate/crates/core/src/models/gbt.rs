use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, RegressionTree};
use crate::error::{AesError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_rounds: 200,
            learning_rate: 0.1,
            max_depth: 3,
        }
    }
}

/// First-order gradient boosting with squared loss: start at the target mean
/// and add a shrunken residual tree each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosted {
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

impl GradientBoosted {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &GbtParams) -> Result<Self> {
        Self::fit_with_trace(x, y, params).map(|(m, _)| m)
    }

    /// Also returns the training MSE before the first round and after each
    /// round (`n_rounds + 1` entries).
    pub fn fit_with_trace(
        x: &[Vec<f64>],
        y: &[f64],
        params: &GbtParams,
    ) -> Result<(Self, Vec<f64>)> {
        super::check_training_data(x, y)?;
        if params.n_rounds == 0 {
            return Err(AesError::invalid("boosting needs at least one round"));
        }
        if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
            return Err(AesError::invalid("learning_rate must lie in (0, 1]"));
        }
        let n = y.len() as f64;
        let base = y.iter().sum::<f64>() / n;
        let mut fitted = vec![base; y.len()];
        let mse = |f: &[f64]| f.iter().zip(y).map(|(a, b)| (b - a).powi(2)).sum::<f64>() / n;
        let mut trace = vec![mse(&fitted)];
        let mut trees = Vec::with_capacity(params.n_rounds);
        for _ in 0..params.n_rounds {
            let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(t, f)| t - f).collect();
            let tree = fit_tree(x, &residuals, params.max_depth);
            for (f, row) in fitted.iter_mut().zip(x) {
                *f += params.learning_rate * tree.predict(row);
            }
            trees.push(tree);
            trace.push(mse(&fitted));
        }
        Ok((
            GradientBoosted {
                base,
                learning_rate: params.learning_rate,
                trees,
            },
            trace,
        ))
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base, |acc, t| acc + self.learning_rate * t.predict(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_flat_round_is_the_mean() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        let p = GbtParams {
            n_rounds: 1,
            learning_rate: 1.0,
            max_depth: 0,
        };
        let m = GradientBoosted::fit(&x, &y, &p).unwrap();
        for r in &x {
            assert!((m.predict(r) - 28.5).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_grid_is_learned() {
        let x: Vec<Vec<f64>> = (0..101).map(|i| vec![-1.0 + i as f64 / 50.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[0]).collect();
        let p = GbtParams {
            n_rounds: 50,
            learning_rate: 0.1,
            max_depth: 3,
        };
        let (_, trace) = GradientBoosted::fit_with_trace(&x, &y, &p).unwrap();
        // the first trace entry is the variance of y
        assert!(trace[50] < 0.05 * trace[0], "{} vs {}", trace[50], trace[0]);
    }

    #[test]
    fn rejects_bad_params() {
        let x = vec![vec![0.0]];
        let y = vec![1.0];
        let bad_lr = GbtParams {
            learning_rate: 1.5,
            ..Default::default()
        };
        assert!(GradientBoosted::fit(&x, &y, &bad_lr).is_err());
        let no_rounds = GbtParams {
            n_rounds: 0,
            ..Default::default()
        };
        assert!(GradientBoosted::fit(&x, &y, &no_rounds).is_err());
        assert!(GradientBoosted::fit(&[], &[], &GbtParams::default()).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn training_mse_never_rises(
            rows in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -3.0f64..3.0), 2..40),
            lr in 0.01f64..=1.0,
            depth in 0usize..4,
        ) {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0, r.1]).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let p = GbtParams { n_rounds: 30, learning_rate: lr, max_depth: depth };
            let (_, trace) = GradientBoosted::fit_with_trace(&x, &y, &p).unwrap();
            // a round that cannot split adds a leaf near 1e-16, which may move
            // the sum by an ulp
            for w in trace.windows(2) {
                proptest::prop_assert!(w[1] <= w[0] * (1.0 + 4.0 * f64::EPSILON), "{} -> {}", w[0], w[1]);
            }
        }
    }
}
