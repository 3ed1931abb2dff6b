//! Flat `key = value` configuration files with dotted section prefixes.
//!
//! Every key has a default; unknown keys and out-of-range values are
//! errors, never warnings. Blank lines and lines starting with `#` are
//! ignored.

use std::path::Path;

use thiserror::Error;

use crate::pipeline::{ClassMode, PipelineConfig};
use crate::som_rmo::FeatureMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Parse { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {key} = {value:?} is not a valid {expected}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("{key} = {value} out of range: must be in {bound}")]
    OutOfRange {
        key: String,
        value: String,
        bound: &'static str,
    },
}

/// Load a configuration file. A missing file (or `None`) yields the full
/// default configuration.
pub fn load_config(path: Option<&Path>) -> Result<PipelineConfig, ConfigError> {
    let Some(path) = path else {
        return Ok(PipelineConfig::default());
    };
    if !path.exists() {
        return Ok(PipelineConfig::default());
    }
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<PipelineConfig, ConfigError> {
    let mut config = PipelineConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                text: trimmed.to_string(),
            });
        };
        apply(&mut config, key.trim(), value.trim(), line)?;
    }
    Ok(config)
}

fn apply(
    config: &mut PipelineConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    let bad = |expected: &'static str| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        expected,
    };
    let range = |bound: &'static str| ConfigError::OutOfRange {
        key: key.to_string(),
        value: value.to_string(),
        bound,
    };
    let parse_f64 = || value.parse::<f64>().map_err(|_| bad("number"));
    let parse_usize = || value.parse::<usize>().map_err(|_| bad("integer"));
    let parse_u64 = || value.parse::<u64>().map_err(|_| bad("integer"));
    let parse_bool = || match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad("boolean (true or false)")),
    };

    match key {
        "dataset.url_column" => config.url_column = value.to_string(),
        "dataset.class_column" => config.class_column = value.to_string(),
        "split.ratios" => {
            let parts: Vec<&str> = value.split('/').collect();
            if parts.len() != 3 {
                return Err(bad("three fractions like 0.7/0.15/0.15"));
            }
            let mut ratios = [0.0; 3];
            for (r, p) in ratios.iter_mut().zip(&parts) {
                *r = p.trim().parse::<f64>().map_err(|_| bad("number"))?;
            }
            let sum: f64 = ratios.iter().sum();
            if ratios.iter().any(|&r| r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(range("positive fractions summing to 1"));
            }
            config.ratios = ratios;
        }
        "som.grid" => {
            let (r, c) = value.split_once('x').ok_or_else(|| bad("grid like 10x10"))?;
            let rows = r.trim().parse::<usize>().map_err(|_| bad("grid like 10x10"))?;
            let cols = c.trim().parse::<usize>().map_err(|_| bad("grid like 10x10"))?;
            if rows * cols < 2 {
                return Err(range("a grid with at least 2 nodes"));
            }
            config.som.rows = rows;
            config.som.cols = cols;
        }
        "som.learning_rate" => {
            let v = parse_f64()?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(range("(0, 1]"));
            }
            config.som.initial_alpha = v;
        }
        "som.iterations" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.som.iterations = v;
        }
        "som.radius" => {
            let v = parse_f64()?;
            if !(v > 0.0) {
                return Err(range("(0, )"));
            }
            config.som.initial_radius = v;
        }
        "rmo.inertia" => {
            let v = parse_f64()?;
            if v < 0.0 {
                return Err(range("[0, )"));
            }
            config.rmo.inertia = v;
        }
        "rmo.cognitive" => {
            let v = parse_f64()?;
            if v < 0.0 {
                return Err(range("[0, )"));
            }
            config.rmo.cognitive = v;
        }
        "rmo.social" => {
            let v = parse_f64()?;
            if v < 0.0 {
                return Err(range("[0, )"));
            }
            config.rmo.social = v;
        }
        "rmo.velocity_clamp" => {
            let v = parse_f64()?;
            if !(v > 0.0) {
                return Err(range("(0, )"));
            }
            config.rmo.velocity_clamp = v;
        }
        "rbfn.centers" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.num_centers = v;
        }
        "rbfn.learning_rate" => {
            let v = parse_f64()?;
            if !(v > 0.0) {
                return Err(range("(0, )"));
            }
            config.gd.learning_rate = v;
        }
        "rbfn.momentum" => {
            let v = parse_f64()?;
            if !(0.0..1.0).contains(&v) {
                return Err(range("[0, 1)"));
            }
            config.gd.momentum = v;
        }
        "rbfn.epochs" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.gd.epochs = v;
        }
        "rbfn.batch_size" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.gd.batch_size = v;
        }
        "tabu.list_size" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.tabu.list_size = v;
        }
        "tabu.iterations" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.tabu.iterations = v;
        }
        "tabu.aspiration" => config.tabu.aspiration_enabled = parse_bool()?,
        "tabu.stop_after_non_improving" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.tabu.stop_after_non_improving = v;
        }
        "tabu.neighbors" => {
            let v = parse_usize()?;
            if v < 1 {
                return Err(range("[1, )"));
            }
            config.tabu.neighbors_per_iteration = v;
        }
        "tabu.mutation_rate" => {
            let v = parse_f64()?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(range("(0, 1]"));
            }
            config.tabu.mutation_rate = v;
        }
        "tabu.crossover_rate" => {
            let v = parse_f64()?;
            if !(0.0..=1.0).contains(&v) {
                return Err(range("[0, 1]"));
            }
            config.tabu.crossover_rate = v;
        }
        "tabu.initial_temperature" => {
            let v = parse_f64()?;
            if !(v > 0.0) {
                return Err(range("(0, )"));
            }
            // temperature maps onto the perturbation scale for parameters
            // normalized to unit range
            config.tabu.initial_scale = v / 1000.0;
        }
        "tabu.cooling_factor" => {
            let v = parse_f64()?;
            if !(v > 0.0 && v < 1.0) {
                return Err(range("(0, 1)"));
            }
            config.tabu.cooling_factor = v;
        }
        "pipeline.feature_mode" => {
            config.feature_mode = match value {
                "concat" => FeatureMode::Concat,
                "bmu" => FeatureMode::Bmu,
                _ => return Err(bad("one of: concat, bmu")),
            }
        }
        "pipeline.class_mode" => {
            config.class_mode = match value {
                "binary" => ClassMode::Binary,
                "four_class" => ClassMode::FourClass,
                _ => return Err(bad("one of: binary, four_class")),
            }
        }
        "pipeline.seed" => config.master_seed = parse_u64()?,
        _ => {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

/// One line per key with its default, for `--help` output.
pub fn config_keys_help() -> String {
    let lines = [
        ("dataset.url_column", "url", "name of the URL column"),
        ("dataset.class_column", "type", "name of the class column"),
        ("split.ratios", "0.7/0.15/0.15", "train/validation/test fractions"),
        ("som.grid", "10x10", "map grid as ROWSxCOLS"),
        ("som.learning_rate", "0.5", "initial learning rate, in (0, 1]"),
        ("som.iterations", "1000", "training epoch budget"),
        ("som.radius", "5", "initial neighborhood radius"),
        ("rmo.inertia", "0.7", "velocity inertia coefficient"),
        ("rmo.cognitive", "1.5", "pull toward a particle's own best"),
        ("rmo.social", "1.5", "pull toward the globally best node"),
        ("rmo.velocity_clamp", "0.25", "per-component velocity cap"),
        ("rbfn.centers", "100", "number of Gaussian centers"),
        ("rbfn.learning_rate", "0.01", "gradient descent step size"),
        ("rbfn.momentum", "0.9", "gradient descent momentum, in [0, 1)"),
        ("rbfn.epochs", "500", "gradient descent epochs"),
        ("rbfn.batch_size", "32", "mini-batch size"),
        ("tabu.list_size", "50", "tabu list capacity"),
        ("tabu.iterations", "100", "search iteration budget"),
        ("tabu.aspiration", "true", "allow tabu moves that beat the best"),
        ("tabu.stop_after_non_improving", "10", "early-stop patience"),
        ("tabu.neighbors", "20", "candidates per iteration"),
        ("tabu.mutation_rate", "0.1", "per-component perturbation probability"),
        ("tabu.crossover_rate", "0.7", "block-copy probability, in [0, 1]"),
        ("tabu.initial_temperature", "100", "initial scale = temperature / 1000"),
        ("tabu.cooling_factor", "0.95", "per-iteration scale multiplier"),
        ("pipeline.feature_mode", "concat", "reduced representation: concat or bmu"),
        ("pipeline.class_mode", "four_class", "four_class or binary"),
        ("pipeline.seed", "42", "master seed; stages derive their own"),
    ];
    let mut out = String::from("Configuration keys (key = value per line, # comments):\n");
    for (key, default, help) in lines {
        out.push_str(&format!("  {key:<32} default {default:<14} {help}\n"));
    }
    out
}
