//! Radial basis function network: K-means center placement, Gaussian
//! hidden units, and a linear output layer trained by mini-batch gradient
//! descent with classical momentum. Centers and widths stay frozen during
//! gradient descent; the tabu stage refines the full parameter vector.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RbfnError {
    #[error("k = {k} exceeds the {distinct} distinct points available")]
    KTooLarge { k: usize, distinct: usize },
    #[error("input data is empty")]
    EmptyData,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("class label {label} out of range for {classes} classes")]
    BadLabel { label: usize, classes: usize },
    #[error("parameter vector has length {found}, expected {expected}")]
    ParamLength { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// A labeled training sample: reduced feature vector plus class index.
pub type LabeledSample = (Vec<f64>, usize);

pub const WIDTH_FLOOR: f64 = 1e-3;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// K-means result: final centers plus the within-cluster sum of squares
/// recorded after every assignment step.
#[derive(Debug, Clone)]
pub struct KmeansOutcome {
    pub centers: Vec<Vec<f64>>,
    pub wcss_trace: Vec<f64>,
    pub iterations: usize,
}

const KMEANS_MAX_ITERATIONS: usize = 300;

/// Lloyd iteration from seeded random distinct initial centers. Stops when
/// assignments are unchanged or after 300 rounds. An empty cluster is
/// reseeded to the point farthest from its currently assigned center.
pub fn kmeans(data: &[Vec<f64>], k: usize, seed: u64) -> Result<KmeansOutcome, RbfnError> {
    if data.is_empty() {
        return Err(RbfnError::EmptyData);
    }
    if k < 1 {
        return Err(RbfnError::InvalidConfig("k must be at least 1".into()));
    }
    let dim = data[0].len();
    for x in data {
        if x.len() != dim {
            return Err(RbfnError::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
    }

    // first occurrence of each distinct point, in input order
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut distinct: Vec<usize> = Vec::new();
    for (i, x) in data.iter().enumerate() {
        if seen.insert(x.iter().map(|v| v.to_bits()).collect()) {
            distinct.push(i);
        }
    }
    if k > distinct.len() {
        return Err(RbfnError::KTooLarge {
            k,
            distinct: distinct.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    distinct.shuffle(&mut rng);
    let mut centers: Vec<Vec<f64>> = distinct[..k].iter().map(|&i| data[i].clone()).collect();

    let mut assignment = vec![usize::MAX; data.len()];
    let mut wcss_trace = Vec::new();
    let mut iterations = 0;
    for _ in 0..KMEANS_MAX_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, x) in data.iter().enumerate() {
            let (best, d) = nearest_center(x, &centers);
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
            wcss += d;
        }
        wcss_trace.push(wcss);
        if !changed {
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, x) in data.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, v) in sums[assignment[i]].iter_mut().zip(x) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for (c, s) in centers[j].iter_mut().zip(&sums[j]) {
                    *c = s / counts[j] as f64;
                }
            }
        }
        reseed_empty_clusters(data, &mut centers, &assignment, &counts);
    }

    Ok(KmeansOutcome {
        centers,
        wcss_trace,
        iterations,
    })
}

fn nearest_center(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_d = squared_distance(x, &centers[0]);
    for (j, c) in centers.iter().enumerate().skip(1) {
        let d = squared_distance(x, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

/// Move each empty cluster's center onto the point farthest from its own
/// assigned center, skipping points already taken by an earlier reseed.
fn reseed_empty_clusters(
    data: &[Vec<f64>],
    centers: &mut [Vec<f64>],
    assignment: &[usize],
    counts: &[usize],
) {
    let mut taken: HashSet<usize> = HashSet::new();
    for j in 0..centers.len() {
        if counts[j] > 0 {
            continue;
        }
        let mut farthest = None;
        let mut farthest_d = -1.0;
        for (i, x) in data.iter().enumerate() {
            if taken.contains(&i) {
                continue;
            }
            let d = squared_distance(x, &centers[assignment[i]]);
            if d > farthest_d {
                farthest_d = d;
                farthest = Some(i);
            }
        }
        if let Some(i) = farthest {
            centers[j].copy_from_slice(&data[i]);
            taken.insert(i);
        }
    }
}

/// Width per center: mean Euclidean distance to its two nearest other
/// centers, floored at 1e-3. A single center takes width 1 by convention.
pub fn init_widths(centers: &[Vec<f64>]) -> Vec<f64> {
    if centers.len() < 2 {
        return vec![1.0; centers.len()];
    }
    centers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut dists: Vec<f64> = centers
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| squared_distance(c, o).sqrt())
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let take = dists.len().min(2);
            let mean = dists[..take].iter().sum::<f64>() / take as f64;
            mean.max(WIDTH_FLOOR)
        })
        .collect()
}

/// One Gaussian hidden unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfCenter {
    pub mu: Vec<f64>,
    pub sigma: f64,
}

/// Gaussian activation exp(-||x - mu||^2 / (2 sigma^2)); equals 1 exactly
/// when x coincides with the center.
pub fn rbf_activation(x: &[f64], center: &RbfCenter) -> Result<f64, RbfnError> {
    if !(center.sigma > 0.0) {
        return Err(RbfnError::NonPositiveSigma(center.sigma));
    }
    if x.len() != center.mu.len() {
        return Err(RbfnError::DimensionMismatch {
            expected: center.mu.len(),
            found: x.len(),
        });
    }
    Ok((-squared_distance(x, &center.mu) / (2.0 * center.sigma * center.sigma)).exp())
}

/// Gradient descent settings for the output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.9,
            epochs: 500,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<(), RbfnError> {
        if !(self.learning_rate > 0.0) {
            return Err(RbfnError::InvalidConfig(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(RbfnError::InvalidConfig(format!(
                "momentum {} not in [0, 1)",
                self.momentum
            )));
        }
        if self.epochs < 1 {
            return Err(RbfnError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(RbfnError::InvalidConfig(
                "batch_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The network: Gaussian centers plus a linear map to one score per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfnModel {
    centers: Vec<RbfCenter>,
    /// Output weights, row-major over centers: weights[i * classes + k].
    weights: Vec<f64>,
    biases: Vec<f64>,
    classes: usize,
    dim: usize,
}

impl RbfnModel {
    /// Build a network from placed centers and widths; output weights and
    /// biases start at zero.
    pub fn new(
        centers: Vec<Vec<f64>>,
        widths: Vec<f64>,
        classes: usize,
    ) -> Result<RbfnModel, RbfnError> {
        if centers.is_empty() {
            return Err(RbfnError::EmptyData);
        }
        if centers.len() != widths.len() {
            return Err(RbfnError::InvalidConfig(format!(
                "{} centers but {} widths",
                centers.len(),
                widths.len()
            )));
        }
        if classes < 2 {
            return Err(RbfnError::InvalidConfig(
                "at least two classes required".into(),
            ));
        }
        let dim = centers[0].len();
        for sigma in &widths {
            if !(*sigma > 0.0) {
                return Err(RbfnError::NonPositiveSigma(*sigma));
            }
        }
        let n = centers.len();
        let centers = centers
            .into_iter()
            .zip(widths)
            .map(|(mu, sigma)| {
                if mu.len() != dim {
                    Err(RbfnError::DimensionMismatch {
                        expected: dim,
                        found: mu.len(),
                    })
                } else {
                    Ok(RbfCenter { mu, sigma })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RbfnModel {
            centers,
            weights: vec![0.0; n * classes],
            biases: vec![0.0; classes],
            classes,
            dim,
        })
    }

    pub fn centers(&self) -> &[RbfCenter] {
        &self.centers
    }

    pub fn num_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weight(&self, center: usize, class: usize) -> f64 {
        self.weights[center * self.classes + class]
    }

    pub fn set_weight(&mut self, center: usize, class: usize, value: f64) {
        self.weights[center * self.classes + class] = value;
    }

    pub fn bias(&self, class: usize) -> f64 {
        self.biases[class]
    }

    pub fn set_bias(&mut self, class: usize, value: f64) {
        self.biases[class] = value;
    }

    fn activations(&self, x: &[f64]) -> Result<Vec<f64>, RbfnError> {
        self.centers.iter().map(|c| rbf_activation(x, c)).collect()
    }

    /// Class scores: score_k = bias_k + sum_i w_ik * phi_i(x).
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, RbfnError> {
        let phi = self.activations(x)?;
        Ok(self.forward_from_activations(&phi))
    }

    fn forward_from_activations(&self, phi: &[f64]) -> Vec<f64> {
        let mut scores = self.biases.clone();
        for (i, &p) in phi.iter().enumerate() {
            let row = &self.weights[i * self.classes..(i + 1) * self.classes];
            for (s, w) in scores.iter_mut().zip(row) {
                *s += w * p;
            }
        }
        scores
    }

    /// Argmax class with ties broken toward the lowest label.
    pub fn predict(&self, x: &[f64]) -> Result<usize, RbfnError> {
        Ok(argmax(&self.forward(x)?))
    }

    /// Mean squared error against one-hot targets, averaged over both the
    /// batch and the class outputs.
    pub fn mse_loss(&self, batch: &[LabeledSample]) -> Result<f64, RbfnError> {
        if batch.is_empty() {
            return Err(RbfnError::EmptyBatch);
        }
        let mut total = 0.0;
        for (x, label) in batch {
            if *label >= self.classes {
                return Err(RbfnError::BadLabel {
                    label: *label,
                    classes: self.classes,
                });
            }
            let scores = self.forward(x)?;
            for (k, s) in scores.iter().enumerate() {
                let target = if k == *label { 1.0 } else { 0.0 };
                let e = s - target;
                total += e * e;
            }
        }
        Ok(total / (batch.len() * self.classes) as f64)
    }

    /// Full parameter vector in a fixed order: center coordinates, widths,
    /// output weights, biases.
    pub fn pack_params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_len());
        for c in &self.centers {
            v.extend_from_slice(&c.mu);
        }
        v.extend(self.centers.iter().map(|c| c.sigma));
        v.extend_from_slice(&self.weights);
        v.extend_from_slice(&self.biases);
        v
    }

    pub fn param_len(&self) -> usize {
        let n = self.centers.len();
        n * self.dim + n + n * self.classes + self.classes
    }

    /// Indices of the width block inside the packed parameter vector.
    pub fn width_param_range(&self) -> Range<usize> {
        let n = self.centers.len();
        n * self.dim..n * self.dim + n
    }

    /// Overwrite every parameter from a packed vector; widths are floored
    /// to stay positive.
    pub fn unpack_params(&mut self, params: &[f64]) -> Result<(), RbfnError> {
        if params.len() != self.param_len() {
            return Err(RbfnError::ParamLength {
                expected: self.param_len(),
                found: params.len(),
            });
        }
        let n = self.centers.len();
        let mut cursor = 0;
        for c in &mut self.centers {
            c.mu.copy_from_slice(&params[cursor..cursor + self.dim]);
            cursor += self.dim;
        }
        for c in &mut self.centers {
            c.sigma = params[cursor].max(WIDTH_FLOOR);
            cursor += 1;
        }
        self.weights
            .copy_from_slice(&params[cursor..cursor + n * self.classes]);
        cursor += n * self.classes;
        self.biases.copy_from_slice(&params[cursor..]);
        Ok(())
    }
}

pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Analytic gradient of the batch MSE with respect to output weights and
/// biases.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

pub fn mse_gradient(model: &RbfnModel, batch: &[LabeledSample]) -> Result<Gradients, RbfnError> {
    if batch.is_empty() {
        return Err(RbfnError::EmptyBatch);
    }
    let classes = model.classes;
    let mut grad_w = vec![0.0; model.weights.len()];
    let mut grad_b = vec![0.0; classes];
    let scale = 2.0 / (batch.len() * classes) as f64;
    for (x, label) in batch {
        if *label >= classes {
            return Err(RbfnError::BadLabel {
                label: *label,
                classes,
            });
        }
        let phi = model.activations(x)?;
        let scores = model.forward_from_activations(&phi);
        for k in 0..classes {
            let target = if k == *label { 1.0 } else { 0.0 };
            let err = scale * (scores[k] - target);
            grad_b[k] += err;
            for (i, &p) in phi.iter().enumerate() {
                grad_w[i * classes + k] += err * p;
            }
        }
    }
    Ok(Gradients {
        weights: grad_w,
        biases: grad_b,
    })
}

/// Mini-batch gradient descent with classical momentum on the output layer
/// only. Returns the full-set loss trace: entry 0 before training, then one
/// entry per epoch.
pub fn train_gd(
    model: &mut RbfnModel,
    train: &[LabeledSample],
    config: &GdConfig,
) -> Result<Vec<f64>, RbfnError> {
    config.validate()?;
    if train.is_empty() {
        return Err(RbfnError::EmptyBatch);
    }
    let classes = model.classes;
    // centers and widths are frozen here, so activations can be cached
    let phi: Vec<Vec<f64>> = train
        .iter()
        .map(|(x, _)| model.activations(x))
        .collect::<Result<_, _>>()?;
    for (_, label) in train {
        if *label >= classes {
            return Err(RbfnError::BadLabel {
                label: *label,
                classes,
            });
        }
    }

    let full_loss = |m: &RbfnModel| -> f64 {
        let mut total = 0.0;
        for (phi_x, (_, label)) in phi.iter().zip(train) {
            let scores = m.forward_from_activations(phi_x);
            for (k, s) in scores.iter().enumerate() {
                let target = if k == *label { 1.0 } else { 0.0 };
                let e = s - target;
                total += e * e;
            }
        }
        total / (train.len() * classes) as f64
    };

    let mut trace = vec![full_loss(model)];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut velocity_w = vec![0.0; model.weights.len()];
    let mut velocity_b = vec![0.0; classes];
    let mut order: Vec<usize> = (0..train.len()).collect();

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let mut grad_w = vec![0.0; model.weights.len()];
            let mut grad_b = vec![0.0; classes];
            let scale = 2.0 / (batch.len() * classes) as f64;
            for &idx in batch {
                let (_, label) = &train[idx];
                let scores = model.forward_from_activations(&phi[idx]);
                for k in 0..classes {
                    let target = if k == *label { 1.0 } else { 0.0 };
                    let err = scale * (scores[k] - target);
                    grad_b[k] += err;
                    for (i, &p) in phi[idx].iter().enumerate() {
                        grad_w[i * classes + k] += err * p;
                    }
                }
            }
            for ((w, v), g) in model.weights.iter_mut().zip(&mut velocity_w).zip(&grad_w) {
                *v = config.momentum * *v - config.learning_rate * g;
                *w += *v;
            }
            for ((b, v), g) in model.biases.iter_mut().zip(&mut velocity_b).zip(&grad_b) {
                *v = config.momentum * *v - config.learning_rate * g;
                *b += *v;
            }
        }
        trace.push(full_loss(model));
    }
    Ok(trace)
}
