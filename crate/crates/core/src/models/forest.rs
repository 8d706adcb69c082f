use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{FeatureSampling, RegressionTree, TreeBuilder};
use crate::error::{AesError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Fraction of features drawn for each split, rounded up, at least one.
    pub feature_subsample: f64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 8,
            feature_subsample: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Bagged trees with per-split feature subsampling. Tree `i` draws from
    /// ChaCha stream `i` of `seed`, so the result does not depend on how many
    /// threads build it.
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &ForestParams, seed: u64) -> Result<Self> {
        super::check_training_data(x, y)?;
        if params.n_trees == 0 {
            return Err(AesError::invalid("a forest needs at least one tree"));
        }
        if !(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0) {
            return Err(AesError::invalid("feature_subsample must lie in (0, 1]"));
        }
        let n = y.len();
        let d = x[0].len();
        let m = ((params.feature_subsample * d as f64).ceil() as usize).clamp(1, d.max(1));
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                TreeBuilder::new(x, y, params.max_depth, FeatureSampling::Subset(m), &mut rng)
                    .build(rows)
            })
            .collect();
        Ok(RandomForest { trees })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![i as f64 / 40.0, (i % 7) as f64])
            .collect();
        let y = x
            .iter()
            .map(|r| if r[0] < 0.5 { 0.2 } else { 0.9 })
            .collect();
        (x, y)
    }

    fn mse(pred: impl Fn(&[f64]) -> f64, x: &[Vec<f64>], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(r, t)| (pred(r) - t).powi(2))
            .sum::<f64>()
            / y.len() as f64
    }

    #[test]
    fn single_stump_predicts_bootstrap_mean() {
        let (x, _) = step_data();
        let y = vec![0.3; x.len()];
        let params = ForestParams {
            n_trees: 1,
            max_depth: 0,
            feature_subsample: 1.0,
        };
        let f = RandomForest::fit(&x, &y, &params, 1).unwrap();
        for r in &x {
            assert!((f.predict(r) - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn beats_mean_predictor_on_step() {
        let (x, y) = step_data();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let f = RandomForest::fit(
            &x,
            &y,
            &ForestParams {
                n_trees: 20,
                ..Default::default()
            },
            5,
        )
        .unwrap();
        assert!(mse(|r| f.predict(r), &x, &y) < mse(|_| mean, &x, &y));
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = step_data();
        let p = ForestParams::default();
        let a = RandomForest::fit(&x, &y, &p, 9).unwrap();
        let b = RandomForest::fit(&x, &y, &p, 9).unwrap();
        assert_eq!(a, b);
        let c = RandomForest::fit(&x, &y, &p, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn identical_trees_average_to_one_tree() {
        let (x, y) = step_data();
        let single = RandomForest::fit(
            &x,
            &y,
            &ForestParams {
                n_trees: 1,
                ..Default::default()
            },
            2,
        )
        .unwrap();
        let copies = RandomForest {
            trees: vec![single.trees[0].clone(); 5],
        };
        for r in &x {
            assert!((copies.predict(r) - single.trees[0].predict(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_empty_data() {
        assert!(RandomForest::fit(&[], &[], &ForestParams::default(), 0).is_err());
    }
}
