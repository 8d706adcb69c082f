//! The four classical regressors and the serializable [`TrainedModel`] that
//! bundles a fitted regressor with its feature scaler and prompt.

pub mod forest;
pub mod gbt;
pub mod linear;
pub mod svr;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::corpus::PromptSpec;
use crate::error::{AesError, Result};
use crate::features::{FeatureScaler, FeatureSet, FeatureVector};

pub use forest::{ForestParams, RandomForest};
pub use gbt::{GbtParams, GradientBoosted};
pub use linear::{LinearModel, LinearParams, DEFAULT_RIDGE};
pub use svr::{fit_svr, SvrObjective, SvrParams};
pub use tree::{fit_tree, Node, RegressionTree};

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub(crate) fn check_training_data(x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(AesError::invalid("no training rows"));
    }
    if x.len() != y.len() {
        return Err(AesError::DimensionMismatch {
            expected: y.len(),
            actual: x.len(),
        });
    }
    let d = x[0].len();
    for row in x {
        if row.len() != d {
            return Err(AesError::DimensionMismatch {
                expected: d,
                actual: row.len(),
            });
        }
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(AesError::invalid(
            "training data contains non-finite values",
        ));
    }
    Ok(())
}

/// Model family plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Linear(LinearParams),
    Svr(SvrParams),
    RandomForest(ForestParams),
    Gbt(GbtParams),
}

impl ModelSpec {
    pub fn linear() -> Self {
        ModelSpec::Linear(LinearParams::default())
    }

    pub fn svr() -> Self {
        ModelSpec::Svr(SvrParams::default())
    }

    pub fn random_forest() -> Self {
        ModelSpec::RandomForest(ForestParams::default())
    }

    pub fn gbt() -> Self {
        ModelSpec::Gbt(GbtParams::default())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::Linear(_) => "linear",
            ModelSpec::Svr(_) => "svr",
            ModelSpec::RandomForest(_) => "random_forest",
            ModelSpec::Gbt(_) => "gbt",
        }
    }

    /// Fits the regressor on already-scaled inputs.
    pub fn fit(&self, x: &[Vec<f64>], y: &[f64], seed: u64) -> Result<Regressor> {
        Ok(match self {
            ModelSpec::Linear(p) => Regressor::Linear(LinearModel::fit(x, y, p.ridge)?),
            ModelSpec::Svr(p) => Regressor::Svr(fit_svr(x, y, p, seed)?),
            ModelSpec::RandomForest(p) => {
                Regressor::RandomForest(RandomForest::fit(x, y, p, seed)?)
            }
            ModelSpec::Gbt(p) => Regressor::Gbt(GradientBoosted::fit(x, y, p)?),
        })
    }
}

/// Fitted parameters of one of the four model families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regressor {
    Linear(LinearModel),
    Svr(LinearModel),
    RandomForest(RandomForest),
    Gbt(GradientBoosted),
}

impl Regressor {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Regressor::Linear(m) | Regressor::Svr(m) => m.predict(x),
            Regressor::RandomForest(f) => f.predict(x),
            Regressor::Gbt(g) => g.predict(x),
        }
    }

    /// Input width the parameters can consume without indexing out of
    /// bounds; trees only bound it from below.
    fn accepts_dim(&self, d: usize) -> bool {
        let trees: Box<dyn Iterator<Item = &RegressionTree>> = match self {
            Regressor::Linear(m) | Regressor::Svr(m) => return m.coefficients.len() == d,
            Regressor::RandomForest(f) => Box::new(f.trees.iter()),
            Regressor::Gbt(g) => Box::new(g.trees.iter()),
        };
        trees.filter_map(RegressionTree::max_feature).all(|f| f < d)
    }
}

/// A regressor trained for one prompt on the normalized [0, 1] score scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: ModelSpec,
    pub features: FeatureSet,
    pub feature_names: Vec<String>,
    pub scaler: FeatureScaler,
    pub prompt: PromptSpec,
    pub train_seed: u64,
    pub regressor: Regressor,
}

impl TrainedModel {
    /// Fits the scaler on `x` (raw feature rows of the training split),
    /// then the regressor on the scaled rows against normalized targets.
    pub fn fit(
        spec: ModelSpec,
        features: FeatureSet,
        x: &[Vec<f64>],
        y: &[f64],
        prompt: PromptSpec,
        seed: u64,
    ) -> Result<Self> {
        check_training_data(x, y)?;
        if x[0].len() != features.len() {
            return Err(AesError::DimensionMismatch {
                expected: features.len(),
                actual: x[0].len(),
            });
        }
        let scaler = FeatureScaler::fit(x)?;
        let scaled = x
            .iter()
            .map(|r| scaler.apply(r))
            .collect::<Result<Vec<_>>>()?;
        let regressor = spec.fit(&scaled, y, seed)?;
        Ok(TrainedModel {
            format_version: MODEL_FORMAT_VERSION,
            spec,
            features,
            feature_names: features.names().into_iter().map(String::from).collect(),
            scaler,
            prompt,
            train_seed: seed,
            regressor,
        })
    }

    pub fn kind(&self) -> &'static str {
        self.spec.kind_name()
    }

    /// Scales raw inputs and predicts on the normalized score scale.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let scaled = self.scaler.apply(x)?;
        Ok(self.regressor.predict(&scaled))
    }

    pub fn predict_features(&self, fv: &FeatureVector) -> Result<f64> {
        self.predict(&fv.to_inputs(&self.features))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TrainedModel = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(AesError::invalid(format!(
                "unsupported model format_version {} (expected {MODEL_FORMAT_VERSION})",
                model.format_version
            )));
        }
        let d = model.scaler.dim();
        if model.scaler.std.len() != d
            || model.feature_names.len() != d
            || model.features.len() != d
            || !model.regressor.accepts_dim(d)
        {
            return Err(AesError::invalid(
                "model parameters disagree on feature dimension",
            ));
        }
        Ok(model)
    }
}
