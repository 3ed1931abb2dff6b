//! Self-organizing map trained jointly with a radial-movement particle
//! refinement, plus the reduced feature representation it emits.
//!
//! Each training epoch runs one full SOM pass (per-input best-matching-unit
//! search and neighborhood-weighted pull toward the input) followed by one
//! particle pass in which every grid node proposes a velocity-driven move;
//! a proposal replaces the node's weights only when it strictly lowers that
//! node's mean squared distance to the inputs currently assigned to it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SomError {
    #[error("training data is empty")]
    EmptyData,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature dimension must be at least 1")]
    ZeroDimension,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("decay horizon must be positive")]
    ZeroHorizon,
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
    #[error("model parse error: {0}")]
    Parse(String),
}

/// Grid shape and training schedule for the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub rows: usize,
    pub cols: usize,
    pub initial_alpha: f64,
    pub initial_radius: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 10,
            initial_alpha: 0.5,
            initial_radius: 5.0,
            iterations: 1000,
            seed: 0,
        }
    }
}

impl SomConfig {
    pub fn validate(&self) -> Result<(), SomError> {
        if self.rows * self.cols < 2 {
            return Err(SomError::InvalidConfig(format!(
                "grid must have at least 2 nodes, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !(self.initial_alpha > 0.0 && self.initial_alpha <= 1.0) {
            return Err(SomError::InvalidConfig(format!(
                "initial_alpha {} not in (0, 1]",
                self.initial_alpha
            )));
        }
        if !(self.initial_radius > 0.0) {
            return Err(SomError::InvalidConfig(format!(
                "initial_radius {} must be positive",
                self.initial_radius
            )));
        }
        if self.iterations < 1 {
            return Err(SomError::InvalidConfig(
                "iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Coefficients of the particle velocity rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmoConfig {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
}

impl Default for RmoConfig {
    fn default() -> Self {
        Self {
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            velocity_clamp: 0.25,
        }
    }
}

impl RmoConfig {
    pub fn validate(&self) -> Result<(), SomError> {
        if self.inertia < 0.0 || self.cognitive < 0.0 || self.social < 0.0 {
            return Err(SomError::InvalidConfig(
                "velocity coefficients must be non-negative".into(),
            ));
        }
        if !(self.velocity_clamp > 0.0) {
            return Err(SomError::InvalidConfig(
                "velocity_clamp must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The map: a rows x cols lattice of weight vectors stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomGrid {
    rows: usize,
    cols: usize,
    dim: usize,
    weights: Vec<f64>,
}

impl SomGrid {
    fn random(rows: usize, cols: usize, dim: usize, rng: &mut impl Rng) -> SomGrid {
        let weights = (0..rows * cols * dim).map(|_| rng.gen::<f64>()).collect();
        SomGrid {
            rows,
            cols,
            dim,
            weights,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn node(&self, row: usize, col: usize) -> &[f64] {
        self.node_at(row * self.cols + col)
    }

    fn node_at(&self, idx: usize) -> &[f64] {
        &self.weights[idx * self.dim..(idx + 1) * self.dim]
    }

    fn node_at_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.weights[idx * self.dim..(idx + 1) * self.dim]
    }

    fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols, idx % self.cols)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// One particle bound to one grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct RmoParticle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best: Vec<f64>,
    pub personal_best_fitness: f64,
}

impl RmoParticle {
    pub fn at(position: Vec<f64>) -> RmoParticle {
        let dim = position.len();
        RmoParticle {
            personal_best: position.clone(),
            position,
            velocity: vec![0.0; dim],
            personal_best_fitness: f64::INFINITY,
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Randomly initialized grid with every weight component uniform in [0, 1],
/// reproducible from the config seed.
pub fn init_grid(config: &SomConfig, dim: usize) -> Result<SomGrid, SomError> {
    config.validate()?;
    if dim < 1 {
        return Err(SomError::ZeroDimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(SomGrid::random(config.rows, config.cols, dim, &mut rng))
}

/// Node minimizing squared Euclidean distance to `x`; ties go to the lowest
/// row-major index.
pub fn find_bmu(grid: &SomGrid, x: &[f64]) -> Result<(usize, usize), SomError> {
    if x.len() != grid.dim {
        return Err(SomError::DimensionMismatch {
            expected: grid.dim,
            found: x.len(),
        });
    }
    Ok(grid.coords(bmu_index(grid, x)))
}

fn bmu_index(grid: &SomGrid, x: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_d = squared_distance(grid.node_at(0), x);
    for idx in 1..grid.node_count() {
        let d = squared_distance(grid.node_at(idx), x);
        if d < best_d {
            best = idx;
            best_d = d;
        }
    }
    best
}

/// Gaussian neighborhood weight exp(-d^2 / (2 sigma^2)) where d is the
/// Euclidean distance between the two nodes' grid coordinates. Equals 1
/// exactly when `node == bmu`.
pub fn neighborhood(
    bmu: (usize, usize),
    node: (usize, usize),
    sigma: f64,
) -> Result<f64, SomError> {
    if !(sigma > 0.0) {
        return Err(SomError::NonPositiveSigma(sigma));
    }
    Ok(gaussian_by_d2(grid_d2(bmu, node), sigma))
}

fn grid_d2(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    dr * dr + dc * dc
}

fn gaussian_by_d2(d2: f64, sigma: f64) -> f64 {
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// Pull every node toward `x` by the fraction alpha * h(bmu, node). Each
/// weight is the convex combination (1 - a) * w + a * x, so alpha * h = 1
/// lands exactly on `x` and no component ever overshoots.
pub fn som_update(
    grid: &mut SomGrid,
    x: &[f64],
    bmu: (usize, usize),
    alpha: f64,
    sigma: f64,
) -> Result<(), SomError> {
    if x.len() != grid.dim {
        return Err(SomError::DimensionMismatch {
            expected: grid.dim,
            found: x.len(),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(SomError::AlphaOutOfRange(alpha));
    }
    if !(sigma > 0.0) {
        return Err(SomError::NonPositiveSigma(sigma));
    }
    for idx in 0..grid.node_count() {
        let a = alpha * gaussian_by_d2(grid_d2(bmu, grid.coords(idx)), sigma);
        blend_node(grid.node_at_mut(idx), x, a);
    }
    Ok(())
}

fn blend_node(node: &mut [f64], x: &[f64], a: f64) {
    if a == 0.0 {
        return;
    }
    for (w, &xi) in node.iter_mut().zip(x) {
        *w = ((1.0 - a) * *w + a * xi).clamp(0.0, 1.0);
    }
}

/// Exponential schedule initial * exp(-t / horizon).
pub fn decay(initial: f64, t: usize, horizon: usize) -> Result<f64, SomError> {
    if horizon == 0 {
        return Err(SomError::ZeroHorizon);
    }
    Ok(initial * (-(t as f64) / horizon as f64).exp())
}

/// One velocity component: inertia plus cognitive and social attraction,
/// clamped to the configured magnitude.
pub fn velocity_component(
    velocity: f64,
    position: f64,
    personal_best: f64,
    global_best: f64,
    r1: f64,
    r2: f64,
    config: &RmoConfig,
) -> f64 {
    let v = config.inertia * velocity
        + config.cognitive * r1 * (personal_best - position)
        + config.social * r2 * (global_best - position);
    v.clamp(-config.velocity_clamp, config.velocity_clamp)
}

fn propose_move(
    particle: &RmoParticle,
    global_best: &[f64],
    config: &RmoConfig,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let dim = particle.position.len();
    let mut velocity = Vec::with_capacity(dim);
    let mut position = Vec::with_capacity(dim);
    #[allow(clippy::needless_range_loop)] // four parallel arrays
    for i in 0..dim {
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let v = velocity_component(
            particle.velocity[i],
            particle.position[i],
            particle.personal_best[i],
            global_best[i],
            r1,
            r2,
            config,
        );
        velocity.push(v);
        position.push((particle.position[i] + v).clamp(0.0, 1.0));
    }
    (velocity, position)
}

/// Move every particle one velocity step; positions are clamped to [0, 1].
pub fn rmo_step(
    particles: &mut [RmoParticle],
    global_best: &[f64],
    config: &RmoConfig,
    rng: &mut impl Rng,
) -> Result<(), SomError> {
    config.validate()?;
    for particle in particles.iter_mut() {
        if particle.position.len() != global_best.len() {
            return Err(SomError::DimensionMismatch {
                expected: particle.position.len(),
                found: global_best.len(),
            });
        }
        let (velocity, position) = propose_move(particle, global_best, config, rng);
        particle.velocity = velocity;
        particle.position = position;
    }
    Ok(())
}

/// Mean squared Euclidean distance from the particle to its assigned
/// inputs; an empty assignment scores 0.
pub fn particle_fitness(particle: &RmoParticle, assigned: &[Vec<f64>]) -> f64 {
    mean_squared_distance(&particle.position, assigned.iter().map(|v| v.as_slice()))
}

fn mean_squared_distance<'a>(
    position: &[f64],
    assigned: impl ExactSizeIterator<Item = &'a [f64]>,
) -> f64 {
    let n = assigned.len();
    if n == 0 {
        return 0.0;
    }
    assigned.map(|x| squared_distance(position, x)).sum::<f64>() / n as f64
}

pub const DEFAULT_CONVERGENCE_EPSILON: f64 = 1e-6;
pub const DEFAULT_CONVERGENCE_PATIENCE: usize = 10;

const MODEL_VERSION: u32 = 1;

/// A trained map plus the statistics needed to emit reduced features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    version: u32,
    pub grid: SomGrid,
    pub config: SomConfig,
    /// 95th-percentile training quantization error, used to scale the
    /// fit-quality component of the reduced representation.
    pub qe_ref: f64,
    /// Mean quantization error trace: entry 0 is the untrained grid, then
    /// one entry per completed epoch.
    pub qe_history: Vec<f64>,
    pub epochs_run: usize,
}

/// Which reduced representation `SomModel::extract` emits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Three components: normalized BMU row, normalized BMU column, and
    /// the input's quantization error relative to `qe_ref`, capped at 1.
    Bmu,
    /// The input vector followed by the three `Bmu` components.
    #[default]
    Concat,
}

impl FeatureMode {
    pub fn reduced_dim(self, input_dim: usize) -> usize {
        match self {
            FeatureMode::Bmu => 3,
            FeatureMode::Concat => input_dim + 3,
        }
    }
}

/// Train the map: SOM epochs alternating with particle refinement passes.
///
/// Stops at the iteration budget, or earlier once the epoch quantization
/// error has improved by less than 1e-6 for 10 consecutive epochs.
pub fn train_som_rmo(
    data: &[Vec<f64>],
    som_config: &SomConfig,
    rmo_config: &RmoConfig,
) -> Result<SomModel, SomError> {
    som_config.validate()?;
    rmo_config.validate()?;
    if data.is_empty() {
        return Err(SomError::EmptyData);
    }
    let dim = data[0].len();
    if dim < 1 {
        return Err(SomError::ZeroDimension);
    }
    for x in data {
        if x.len() != dim {
            return Err(SomError::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(som_config.seed);
    let mut grid = SomGrid::random(som_config.rows, som_config.cols, dim, &mut rng);
    let n_nodes = grid.node_count();
    let mut particles: Vec<RmoParticle> = (0..n_nodes)
        .map(|i| RmoParticle::at(grid.node_at(i).to_vec()))
        .collect();

    // Gaussian weights depend only on the integer squared grid distance,
    // so one small table per epoch covers every (bmu, node) pair.
    let max_d2 = grid_d2((0, 0), (som_config.rows - 1, som_config.cols - 1)) as usize;

    let (initial_qe, mut distances) = quantization_pass(&grid, data);
    let mut qe_history = vec![initial_qe];
    let mut previous_qe = initial_qe;
    let mut stall = 0usize;
    let mut epochs_run = 0usize;

    for t in 0..som_config.iterations {
        let alpha = decay(som_config.initial_alpha, t, som_config.iterations)?;
        let sigma = decay(som_config.initial_radius, t, som_config.iterations)?;
        let h_by_d2: Vec<f64> = (0..=max_d2)
            .map(|d2| gaussian_by_d2(d2 as f64, sigma))
            .collect();

        // SOM pass: each input pulls the whole lattice toward itself.
        for x in data {
            let bmu = bmu_index(&grid, x);
            let bmu_coords = grid.coords(bmu);
            for idx in 0..n_nodes {
                let d2 = grid_d2(bmu_coords, grid.coords(idx)) as usize;
                blend_node(grid.node_at_mut(idx), x, alpha * h_by_d2[d2]);
            }
        }

        // Assign inputs to their current best node for the particle pass.
        let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        for (i, x) in data.iter().enumerate() {
            assigned[bmu_index(&grid, x)].push(i);
        }
        let fitness = |position: &[f64], members: &[usize]| {
            mean_squared_distance(position, members.iter().map(|&i| data[i].as_slice()))
        };

        // Global best: lowest-fitness node among those that own inputs.
        let mut global_best_idx = 0usize;
        let mut global_best_fit = f64::INFINITY;
        for (idx, members) in assigned.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let f = fitness(grid.node_at(idx), members);
            if f < global_best_fit {
                global_best_fit = f;
                global_best_idx = idx;
            }
        }
        let global_best = grid.node_at(global_best_idx).to_vec();

        for idx in 0..n_nodes {
            refine_node(
                &mut grid,
                idx,
                &mut particles[idx],
                &assigned[idx],
                data,
                &global_best,
                rmo_config,
                &mut rng,
            );
        }

        let (qe, dists) = quantization_pass(&grid, data);
        distances = dists;
        qe_history.push(qe);
        epochs_run = t + 1;
        if previous_qe - qe < DEFAULT_CONVERGENCE_EPSILON {
            stall += 1;
            if stall >= DEFAULT_CONVERGENCE_PATIENCE {
                break;
            }
        } else {
            stall = 0;
        }
        previous_qe = qe;
    }

    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p95_idx = ((0.95 * distances.len() as f64).ceil() as usize)
        .saturating_sub(1)
        .min(distances.len() - 1);
    let qe_ref = distances[p95_idx].max(1e-12);

    Ok(SomModel {
        version: MODEL_VERSION,
        grid,
        config: som_config.clone(),
        qe_ref,
        qe_history,
        epochs_run,
    })
}

/// One particle's refinement of its node: sync the particle onto the node,
/// propose a velocity-driven move, and accept it only when it strictly
/// lowers the node's fitness against its assigned inputs. Returns the
/// (before, after) fitness pair when the move was accepted.
#[allow(clippy::too_many_arguments)]
fn refine_node(
    grid: &mut SomGrid,
    idx: usize,
    particle: &mut RmoParticle,
    members: &[usize],
    data: &[Vec<f64>],
    global_best: &[f64],
    config: &RmoConfig,
    rng: &mut impl Rng,
) -> Option<(f64, f64)> {
    let fitness = |position: &[f64], members: &[usize]| {
        mean_squared_distance(position, members.iter().map(|&i| data[i].as_slice()))
    };
    particle.position.copy_from_slice(grid.node_at(idx));
    let current = fitness(&particle.position, members);
    if current < particle.personal_best_fitness {
        particle.personal_best_fitness = current;
        particle.personal_best.copy_from_slice(&particle.position);
    }
    let (velocity, proposal) = propose_move(particle, global_best, config, rng);
    particle.velocity = velocity;
    if members.is_empty() {
        return None;
    }
    let proposed = fitness(&proposal, members);
    if proposed < current {
        grid.node_at_mut(idx).copy_from_slice(&proposal);
        particle.position.copy_from_slice(&proposal);
        if proposed < particle.personal_best_fitness {
            particle.personal_best_fitness = proposed;
            particle.personal_best.copy_from_slice(&proposal);
        }
        Some((current, proposed))
    } else {
        None
    }
}

fn quantization_pass(grid: &SomGrid, data: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let distances: Vec<f64> = data
        .iter()
        .map(|x| squared_distance(grid.node_at(bmu_index(grid, x)), x).sqrt())
        .collect();
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    (mean, distances)
}

impl SomModel {
    /// Distance from `x` to its best-matching node.
    pub fn quantization_error(&self, x: &[f64]) -> Result<f64, SomError> {
        let (row, col) = find_bmu(&self.grid, x)?;
        Ok(squared_distance(self.grid.node(row, col), x).sqrt())
    }

    /// Reduced representation of a normalized input; all components lie in
    /// [0, 1].
    pub fn extract(&self, x: &[f64], mode: FeatureMode) -> Result<Vec<f64>, SomError> {
        let (row, col) = find_bmu(&self.grid, x)?;
        let qe = squared_distance(self.grid.node(row, col), x).sqrt();
        let norm = |v: usize, n: usize| {
            if n <= 1 {
                0.0
            } else {
                v as f64 / (n - 1) as f64
            }
        };
        let bmu_components = [
            norm(row, self.grid.rows),
            norm(col, self.grid.cols),
            (qe / self.qe_ref).min(1.0),
        ];
        Ok(match mode {
            FeatureMode::Bmu => bmu_components.to_vec(),
            FeatureMode::Concat => x.iter().copied().chain(bmu_components).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<SomModel, SomError> {
        let model: SomModel =
            serde_json::from_str(text).map_err(|e| SomError::Parse(e.to_string()))?;
        if model.version != MODEL_VERSION {
            return Err(SomError::UnsupportedVersion(model.version));
        }
        Ok(model)
    }
}
