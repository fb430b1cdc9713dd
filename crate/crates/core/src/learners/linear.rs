//! Linear classifiers: mistake-driven perceptron and Pegasos linear SVM.
//!
//! Both predict class 1 iff `w . x + b > 0`. Attributes are used as raw
//! intensities.

use super::matrix::AttributeMatrix;
use crate::rng::Pcg32;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn zeros(d: usize) -> Self {
        LinearModel {
            weights: vec![0.0; d],
            bias: 0.0,
        }
    }

    pub fn activation(&self, x: &[u8]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, &v)| w * f64::from(v)).sum::<f64>()
    }

    pub fn classify(&self, x: &[u8]) -> f64 {
        f64::from(u8::from(self.activation(x) > 0.0))
    }
}

fn signed(y: f64) -> f64 {
    if y >= 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// Perceptron run summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerceptronTrace {
    pub updates: usize,
    pub epochs_run: u32,
    /// True if the final epoch made no mistakes.
    pub converged: bool,
}

/// Learning rate 1, rows in stored order, at most `epochs` passes; stops
/// after the first pass without a mistake.
pub fn fit_perceptron(x: &AttributeMatrix, y: &[f64], epochs: u32) -> (LinearModel, PerceptronTrace) {
    let mut model = LinearModel::zeros(x.cols());
    let mut trace = PerceptronTrace {
        updates: 0,
        epochs_run: 0,
        converged: false,
    };
    for _ in 0..epochs {
        trace.epochs_run += 1;
        let mut mistakes = 0;
        for (r, &target) in y.iter().enumerate() {
            let row = x.row(r);
            if model.classify(row) == target {
                continue;
            }
            let s = signed(target);
            for (w, &v) in model.weights.iter_mut().zip(row) {
                *w += s * f64::from(v);
            }
            model.bias += s;
            mistakes += 1;
        }
        trace.updates += mistakes;
        if mistakes == 0 {
            trace.converged = true;
            break;
        }
    }
    (model, trace)
}

/// `lambda/2 * (|w|^2 + b^2) + mean hinge loss`, labels mapped to +-1.
pub fn svm_objective(model: &LinearModel, x: &AttributeMatrix, y: &[f64], lambda: f64) -> f64 {
    let norm_sq = model.weights.iter().map(|w| w * w).sum::<f64>() + model.bias * model.bias;
    let hinge = (0..x.rows())
        .map(|r| (1.0 - signed(y[r]) * model.activation(x.row(r))).max(0.0))
        .sum::<f64>()
        / x.rows() as f64;
    0.5 * lambda * norm_sq + hinge
}

/// Objective at the zero model and its mean over the last epoch's iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmTrace {
    pub initial_objective: f64,
    pub last_epoch_mean_objective: f64,
}

/// Pegasos: step `1 / (lambda t)`, the bias treated as a weight on a
/// constant input of 1, projection onto the ball of radius `1/sqrt(lambda)`,
/// rows reshuffled from `rng` every epoch.
pub fn fit_svm(x: &AttributeMatrix, y: &[f64], lambda: f64, epochs: u32, rng: &mut Pcg32) -> LinearModel {
    pegasos(x, y, lambda, epochs, rng, false).0
}

/// [`fit_svm`] that also evaluates the objective after every step of the
/// final epoch (quadratic cost; meant for checks on small data).
pub fn fit_svm_traced(
    x: &AttributeMatrix,
    y: &[f64],
    lambda: f64,
    epochs: u32,
    rng: &mut Pcg32,
) -> (LinearModel, SvmTrace) {
    let (model, trace) = pegasos(x, y, lambda, epochs, rng, true);
    (model, trace.expect("traced run"))
}

fn pegasos(
    x: &AttributeMatrix,
    y: &[f64],
    lambda: f64,
    epochs: u32,
    rng: &mut Pcg32,
    traced: bool,
) -> (LinearModel, Option<SvmTrace>) {
    let n = x.rows();
    let mut model = LinearModel::zeros(x.cols());
    let initial = traced.then(|| svm_objective(&model, x, y, lambda));
    let radius = 1.0 / lambda.sqrt();
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0u64;
    let mut last_sum = 0.0;
    for epoch in 0..epochs {
        rng.shuffle(&mut order);
        for &r in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let s = signed(y[r]);
            let row = x.row(r);
            let margin = s * model.activation(row);
            let decay = 1.0 - eta * lambda;
            for w in &mut model.weights {
                *w *= decay;
            }
            model.bias *= decay;
            if margin < 1.0 {
                for (w, &v) in model.weights.iter_mut().zip(row) {
                    *w += eta * s * f64::from(v);
                }
                model.bias += eta * s;
            }
            let norm = (model.weights.iter().map(|w| w * w).sum::<f64>() + model.bias * model.bias).sqrt();
            if norm > radius {
                let scale = radius / norm;
                for w in &mut model.weights {
                    *w *= scale;
                }
                model.bias *= scale;
            }
            if traced && epoch + 1 == epochs {
                last_sum += svm_objective(&model, x, y, lambda);
            }
        }
    }
    let trace = initial.map(|initial_objective| SvmTrace {
        initial_objective,
        last_epoch_mean_objective: last_sum / n as f64,
    });
    (model, trace)
}
