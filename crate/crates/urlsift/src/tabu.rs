//! Tabu search over a real parameter vector.
//!
//! Candidate moves are built by per-component Gaussian perturbation plus an
//! occasional block copy from the best-known solution. Visited solutions
//! are remembered through quantized fingerprints in a bounded FIFO list;
//! a tabu candidate may still be taken when it beats the best objective
//! found so far (aspiration), and when every candidate is tabu the least
//! bad one is taken anyway so the search never deadlocks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::hash::{Hash, Hasher};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TabuError {
    #[error("objective returned a non-finite value at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("initial solution is empty")]
    EmptyInitial,
    #[error("cannot write trace to {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub list_size: usize,
    pub iterations: usize,
    pub aspiration_enabled: bool,
    pub stop_after_non_improving: usize,
    pub neighbors_per_iteration: usize,
    /// Probability that a component receives additive Gaussian noise.
    pub mutation_rate: f64,
    /// Probability that a candidate copies a contiguous block from the
    /// best-known solution.
    pub crossover_rate: f64,
    /// Standard deviation of the perturbation noise at iteration 0.
    pub initial_scale: f64,
    /// Per-iteration multiplier applied to the perturbation scale.
    pub cooling_factor: f64,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            list_size: 50,
            iterations: 100,
            aspiration_enabled: true,
            stop_after_non_improving: 10,
            neighbors_per_iteration: 20,
            mutation_rate: 0.1,
            crossover_rate: 0.7,
            initial_scale: 0.1,
            cooling_factor: 0.95,
            seed: 0,
        }
    }
}

impl TabuConfig {
    pub fn validate(&self) -> Result<(), TabuError> {
        let bad = |msg: String| Err(TabuError::InvalidConfig(msg));
        if self.list_size < 1 {
            return bad("list_size must be at least 1".into());
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if self.stop_after_non_improving < 1 {
            return bad("stop_after_non_improving must be at least 1".into());
        }
        if self.neighbors_per_iteration < 1 {
            return bad("neighbors_per_iteration must be at least 1".into());
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return bad(format!("mutation_rate {} not in (0, 1]", self.mutation_rate));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate {} not in [0, 1]", self.crossover_rate));
        }
        if !(self.initial_scale > 0.0) {
            return bad(format!("initial_scale {} must be positive", self.initial_scale));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return bad(format!("cooling_factor {} not in (0, 1)", self.cooling_factor));
        }
        Ok(())
    }
}

/// Quantize each component to 3 decimal places and hash the result, so
/// solutions within ~5e-4 per component collide onto one fingerprint.
pub fn fingerprint(solution: &[f64]) -> u64 {
    let mut hasher = DefaultHasher::new();
    for v in solution {
        let q = (v * 1000.0).round() as i64;
        q.hash(&mut hasher);
    }
    hasher.finish()
}

/// Bounded FIFO of solution fingerprints.
#[derive(Debug, Clone, Default)]
pub struct TabuList {
    entries: VecDeque<u64>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> TabuList {
        TabuList {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn push(&mut self, fp: u64) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(fp);
    }

    pub fn contains(&self, fp: u64) -> bool {
        self.entries.contains(&fp)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Lower bounds applied to selected components after perturbation, as
/// (component index, minimum value) pairs.
pub type ComponentFloors = [(usize, f64)];

/// Generate `neighbors_per_iteration` candidates around `current`.
pub fn neighbors(
    current: &[f64],
    best: &[f64],
    scale: f64,
    config: &TabuConfig,
    floors: &ComponentFloors,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    let dim = current.len();
    let mut out = Vec::with_capacity(config.neighbors_per_iteration);
    for _ in 0..config.neighbors_per_iteration {
        let mut candidate = current.to_vec();
        for v in candidate.iter_mut() {
            if rng.gen::<f64>() < config.mutation_rate {
                let z: f64 = rng.sample(StandardNormal);
                *v += z * scale;
            }
        }
        if rng.gen::<f64>() < config.crossover_rate {
            let start = rng.gen_range(0..dim);
            let len = rng.gen_range(1..=dim - start);
            candidate[start..start + len].copy_from_slice(&best[start..start + len]);
        }
        for &(idx, min) in floors {
            if candidate[idx] < min {
                candidate[idx] = min;
            }
        }
        out.push(candidate);
    }
    out
}

/// Aspiration criterion: a tabu move is admissible when it strictly beats
/// the best objective seen so far.
pub fn aspiration(candidate_objective: f64, best_objective: f64) -> bool {
    candidate_objective < best_objective
}

/// One trace line per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TabuTraceRow {
    pub iteration: usize,
    pub selected_objective: f64,
    pub best_objective: f64,
    pub scale: f64,
    pub tabu_len: usize,
}

#[derive(Debug, Clone)]
pub struct TabuOutcome {
    pub best: Vec<f64>,
    pub best_objective: f64,
    pub trace: Vec<TabuTraceRow>,
    /// Iterations where every candidate was tabu and the least-bad one was
    /// taken anyway.
    pub escapes: usize,
}

/// Run the search from `initial`, minimizing `objective`.
pub fn tabu_search(
    initial: &[f64],
    objective: impl Fn(&[f64]) -> f64,
    config: &TabuConfig,
    floors: &ComponentFloors,
) -> Result<TabuOutcome, TabuError> {
    config.validate()?;
    if initial.is_empty() {
        return Err(TabuError::EmptyInitial);
    }
    let check = |value: f64, iteration: usize| {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(TabuError::NonFiniteObjective { iteration })
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = initial.to_vec();
    let mut best = current.clone();
    let mut best_objective = check(objective(&current), 0)?;
    let mut tabu = TabuList::new(config.list_size);
    let mut scale = config.initial_scale;
    let mut non_improving = 0usize;
    let mut escapes = 0usize;
    let mut trace = Vec::new();

    for iteration in 1..=config.iterations {
        let candidates = neighbors(&current, &best, scale, config, floors, &mut rng);
        let mut objectives = Vec::with_capacity(candidates.len());
        for c in &candidates {
            objectives.push(check(objective(c), iteration)?);
        }

        let mut selected: Option<usize> = None;
        for (i, c) in candidates.iter().enumerate() {
            let is_tabu = tabu.contains(fingerprint(c));
            let admissible = !is_tabu
                || (config.aspiration_enabled && aspiration(objectives[i], best_objective));
            if admissible && selected.is_none_or(|s| objectives[i] < objectives[s]) {
                selected = Some(i);
            }
        }
        let chosen = match selected {
            Some(i) => i,
            None => {
                escapes += 1;
                let mut least_bad = 0;
                for i in 1..objectives.len() {
                    if objectives[i] < objectives[least_bad] {
                        least_bad = i;
                    }
                }
                least_bad
            }
        };

        tabu.push(fingerprint(&current));
        current = candidates[chosen].clone();
        let current_objective = objectives[chosen];
        if current_objective < best_objective {
            best_objective = current_objective;
            best = current.clone();
            non_improving = 0;
        } else {
            non_improving += 1;
        }

        trace.push(TabuTraceRow {
            iteration,
            selected_objective: current_objective,
            best_objective,
            scale,
            tabu_len: tabu.len(),
        });
        scale *= config.cooling_factor;
        if non_improving >= config.stop_after_non_improving {
            break;
        }
    }

    Ok(TabuOutcome {
        best,
        best_objective,
        trace,
        escapes,
    })
}

/// Write the per-iteration trace as CSV.
pub fn write_trace_csv(path: impl AsRef<Path>, trace: &[TabuTraceRow]) -> Result<(), TabuError> {
    let path = path.as_ref();
    let mut out = String::from("iteration,selected,best,scale,tabu_len\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.iteration, row.selected_objective, row.best_objective, row.scale, row.tabu_len
        ));
    }
    std::fs::write(path, out).map_err(|source| TabuError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(seed: u64) -> TabuConfig {
        TabuConfig {
            seed,
            ..TabuConfig::default()
        }
    }

    #[test]
    fn fingerprints_collapse_sub_quantum_differences() {
        let a = vec![0.1000, 0.25, -0.4];
        let b = vec![0.1004, 0.25, -0.4];
        let c = vec![0.11, 0.25, -0.4];
        assert_eq!(fingerprint(&a), fingerprint(&a));
        assert_eq!(fingerprint(&a), fingerprint(&b));
        assert_ne!(fingerprint(&a), fingerprint(&c));
    }

    #[test]
    fn tabu_list_evicts_strictly_fifo() {
        let mut list = TabuList::new(3);
        for fp in [1u64, 2, 3, 4, 5] {
            list.push(fp);
        }
        assert_eq!(list.len(), 3);
        assert!(!list.contains(1));
        assert!(!list.contains(2));
        assert!(list.contains(3));
        assert!(list.contains(4));
        assert!(list.contains(5));
    }

    #[test]
    fn neighbors_without_mutation_or_crossover_copy_the_current_point() {
        let config = TabuConfig {
            mutation_rate: 1e-300, // effectively never fires
            crossover_rate: 0.0,
            ..quick_config(3)
        };
        let current = vec![0.5, -0.25, 0.75];
        let best = vec![0.0, 0.0, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for c in neighbors(&current, &best, 0.1, &config, &[], &mut rng) {
            assert_eq!(c, current);
        }
    }

    #[test]
    fn vanishing_scale_leaves_candidates_at_the_current_point() {
        let config = TabuConfig {
            mutation_rate: 1.0,
            crossover_rate: 0.0,
            ..quick_config(4)
        };
        let current = vec![0.5, -0.25];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for c in neighbors(&current, &[0.0, 0.0], 1e-300, &config, &[], &mut rng) {
            for (got, want) in c.iter().zip(&current) {
                assert!((got - want).abs() < 1e-250);
            }
        }
    }

    #[test]
    fn crossover_with_best_equal_to_current_is_a_no_op() {
        let config = TabuConfig {
            mutation_rate: 1e-300,
            crossover_rate: 1.0,
            ..quick_config(5)
        };
        let current = vec![0.1, 0.2, 0.3, 0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in neighbors(&current, &current, 0.1, &config, &[], &mut rng) {
            assert_eq!(c, current);
        }
    }

    #[test]
    fn floors_are_applied_after_perturbation() {
        let config = TabuConfig {
            mutation_rate: 1.0,
            crossover_rate: 0.0,
            neighbors_per_iteration: 50,
            ..quick_config(6)
        };
        let current = vec![0.0, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let floors = [(0usize, 1e-3)];
        for c in neighbors(&current, &[0.0, 0.0], 2.0, &config, &floors, &mut rng) {
            assert!(c[0] >= 1e-3);
        }
    }

    #[test]
    fn aspiration_requires_strict_improvement() {
        assert!(aspiration(0.10, 0.20));
        assert!(!aspiration(0.20, 0.20));
        assert!(!aspiration(0.30, 0.20));
    }

    #[test]
    fn quadratic_objective_is_optimized_close_to_its_minimum() {
        let target = [0.3, 0.6, 0.4];
        let objective = |v: &[f64]| -> f64 {
            v.iter()
                .zip(target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        };
        let initial = [1.3, 0.6, 0.4]; // distance 1 from the optimum
        let config = TabuConfig {
            mutation_rate: 0.5,
            ..quick_config(7)
        };
        let out = tabu_search(&initial, objective, &config, &[]).unwrap();
        assert!(out.best_objective < 0.01, "objective {}", out.best_objective);
        let dist: f64 = objective(&out.best).sqrt();
        assert!(dist < 0.1, "distance {dist}");
    }

    #[test]
    fn locally_optimal_start_stops_after_the_patience_budget() {
        let origin = vec![0.5, 0.5];
        let origin_clone = origin.clone();
        let objective = move |v: &[f64]| -> f64 {
            if v == origin_clone.as_slice() {
                0.0
            } else {
                1.0
            }
        };
        let config = TabuConfig {
            mutation_rate: 1.0,
            ..quick_config(8)
        };
        let out = tabu_search(&origin, objective, &config, &[]).unwrap();
        assert_eq!(out.trace.len(), config.stop_after_non_improving);
        assert_eq!(out.best, origin);
        assert_eq!(out.best_objective, 0.0);
    }

    #[test]
    fn tabu_list_saturates_at_its_capacity() {
        let objective = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let config = TabuConfig {
            iterations: 60,
            stop_after_non_improving: 60,
            mutation_rate: 1.0,
            ..quick_config(9)
        };
        let out = tabu_search(&[2.0, -1.5, 0.7], objective, &config, &[]).unwrap();
        assert_eq!(out.trace.len(), 60);
        for row in &out.trace {
            assert_eq!(row.tabu_len, row.iteration.min(50));
        }
    }

    #[test]
    fn best_objective_trace_is_monotone_non_increasing() {
        for seed in 0..8 {
            let shift = seed as f64 / 10.0;
            let objective =
                move |v: &[f64]| v.iter().map(|x| (x - shift) * (x - shift)).sum::<f64>();
            let out = tabu_search(&[1.0, -1.0, 0.5, 0.2], objective, &quick_config(seed), &[])
                .unwrap();
            for pair in out.trace.windows(2) {
                assert!(pair[1].best_objective <= pair[0].best_objective);
            }
        }
    }

    #[test]
    fn scale_cools_exponentially() {
        let objective = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let config = TabuConfig {
            iterations: 20,
            stop_after_non_improving: 20,
            ..quick_config(10)
        };
        let out = tabu_search(&[1.0, 1.0], objective, &config, &[]).unwrap();
        for (i, row) in out.trace.iter().enumerate() {
            let expected = config.initial_scale * config.cooling_factor.powi(i as i32);
            assert!((row.scale - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn all_tabu_neighborhoods_escape_and_are_counted() {
        // tiny noise keeps every candidate on the current fingerprint, so
        // once that fingerprint enters the list everything is tabu
        let objective = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let config = TabuConfig {
            iterations: 5,
            stop_after_non_improving: 5,
            mutation_rate: 1.0,
            crossover_rate: 0.0,
            initial_scale: 1e-9,
            aspiration_enabled: false,
            ..quick_config(11)
        };
        let out = tabu_search(&[0.4, 0.4], objective, &config, &[]).unwrap();
        assert!(out.escapes >= 1);
    }

    #[test]
    fn search_is_deterministic() {
        let objective = |v: &[f64]| v.iter().map(|x| (x - 0.2) * (x - 0.2)).sum::<f64>();
        let a = tabu_search(&[1.0, 0.0], objective, &quick_config(12), &[]).unwrap();
        let b = tabu_search(&[1.0, 0.0], objective, &quick_config(12), &[]).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn non_finite_objective_reports_the_iteration() {
        let objective = |v: &[f64]| {
            if v[0] > 0.95 {
                f64::NAN
            } else {
                v[0]
            }
        };
        let err = tabu_search(&[1.0], objective, &quick_config(13), &[]).unwrap_err();
        assert!(matches!(err, TabuError::NonFiniteObjective { iteration: 0 }));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = quick_config(0);
        config.cooling_factor = 1.0;
        assert!(config.validate().is_err());
        let mut config = quick_config(0);
        config.mutation_rate = 0.0;
        assert!(config.validate().is_err());
        let mut config = quick_config(0);
        config.list_size = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn trace_csv_has_one_line_per_iteration() {
        let objective = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let config = TabuConfig {
            iterations: 7,
            stop_after_non_improving: 7,
            ..quick_config(14)
        };
        let out = tabu_search(&[1.0, 1.0], objective, &config, &[]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, &out.trace).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iteration,selected,best,scale,tabu_len");
        assert_eq!(lines.len(), out.trace.len() + 1);
    }
}
