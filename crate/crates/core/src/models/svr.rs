//! Linear epsilon-insensitive support vector regression trained by seeded
//! stochastic subgradient descent on the primal objective
//!
//! ```text
//! J(w, b) = ½‖w‖² + c · Σᵢ max(0, |w·xᵢ + b − yᵢ| − ε)
//! ```
//!
//! The returned weights are the average of the iterates over the second half
//! of training, which damps the oscillation plain subgradient steps leave
//! around the kinks of the loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::LinearModel;
use crate::error::{AesError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrParams {
    pub epsilon: f64,
    pub c: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            epsilon: 0.1,
            c: 1.0,
            epochs: 300,
            learning_rate: 0.1,
        }
    }
}

/// The primal objective over a fixed data set.
pub struct SvrObjective<'a> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [f64],
    pub epsilon: f64,
    pub c: f64,
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl SvrObjective<'_> {
    pub fn value(&self, w: &[f64], b: f64) -> f64 {
        let reg = 0.5 * dot(w, w);
        let loss: f64 = self
            .x
            .iter()
            .zip(self.y)
            .map(|(xi, yi)| ((dot(w, xi) + b - yi).abs() - self.epsilon).max(0.0))
            .sum();
        reg + self.c * loss
    }

    /// A subgradient `(∂w, ∂b)`; it is the gradient wherever no residual
    /// sits exactly on the tube boundary.
    pub fn subgradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut gw = w.to_vec();
        let mut gb = 0.0;
        for (xi, yi) in self.x.iter().zip(self.y) {
            let s = tube_sign(dot(w, xi) + b - yi, self.epsilon);
            if s != 0.0 {
                for (g, v) in gw.iter_mut().zip(xi) {
                    *g += self.c * s * v;
                }
                gb += self.c * s;
            }
        }
        (gw, gb)
    }

    /// Smallest distance from any residual magnitude to the tube edge.
    pub fn kink_distance(&self, w: &[f64], b: f64) -> f64 {
        self.x
            .iter()
            .zip(self.y)
            .map(|(xi, yi)| ((dot(w, xi) + b - yi).abs() - self.epsilon).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn tube_sign(residual: f64, epsilon: f64) -> f64 {
    if residual > epsilon {
        1.0
    } else if residual < -epsilon {
        -1.0
    } else {
        0.0
    }
}

pub fn fit_svr(x: &[Vec<f64>], y: &[f64], params: &SvrParams, seed: u64) -> Result<LinearModel> {
    super::check_training_data(x, y)?;
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(AesError::invalid(
            "epsilon must be a finite non-negative number",
        ));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(AesError::invalid("c must be positive"));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
        return Err(AesError::invalid("learning_rate must be positive"));
    }
    if params.epochs == 0 {
        return Err(AesError::invalid("epochs must be at least 1"));
    }
    let n = y.len();
    let d = x[0].len();
    let nf = n as f64;
    let mut w = vec![0.0; d];
    let mut b = y.iter().sum::<f64>() / nf;

    let mut avg_w = vec![0.0; d];
    let mut avg_b = 0.0;
    let mut averaged = 0usize;
    let average_from = params.epochs / 2;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut step = 0usize;
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            step += 1;
            let eta = params.learning_rate / (1.0 + step as f64 / nf).sqrt();
            let s = tube_sign(dot(&w, &x[i]) + b - y[i], params.epsilon);
            // per-sample share of the objective: ½‖w‖²/n + c·loss_i
            for (wj, xj) in w.iter_mut().zip(&x[i]) {
                *wj -= eta * (*wj / nf + params.c * s * xj);
            }
            b -= eta * params.c * s;
        }
        if epoch >= average_from {
            averaged += 1;
            let k = averaged as f64;
            for (a, wj) in avg_w.iter_mut().zip(&w) {
                *a += (wj - *a) / k;
            }
            avg_b += (b - avg_b) / k;
        }
    }
    if avg_w.iter().chain([&avg_b]).any(|v| !v.is_finite()) {
        return Err(AesError::invalid(
            "SVR training diverged; lower learning_rate",
        ));
    }
    Ok(LinearModel {
        coefficients: avg_w,
        intercept: avg_b,
    })
}
