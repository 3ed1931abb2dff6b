//! End-to-end orchestration: clean, featurize, train the map, transform,
//! place and fit the network, refine with tabu search, evaluate.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{self, DatasetSplit, UrlClass, UrlRecord};
use crate::features::{self, FeatureVector, Normalizer};
use crate::metrics::{self, ConfusionMatrix, MetricsMode, MetricsReport};
use crate::rbfn::{self, GdConfig, LabeledSample, RbfnModel};
use crate::som_rmo::{self, FeatureMode, RmoConfig, SomConfig, SomModel};
use crate::tabu::{self, TabuConfig, TabuTraceRow};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage} stage: {message}")]
    Stage {
        stage: &'static str,
        message: String,
    },
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u64),
    #[error("model file has no version field")]
    MissingVersion,
    #[error("URL is empty")]
    EmptyUrl,
}

impl PipelineError {
    fn stage(stage: &'static str, err: impl fmt::Display) -> PipelineError {
        PipelineError::Stage {
            stage,
            message: err.to_string(),
        }
    }
}

/// Binary collapses the three malicious classes into one positive class;
/// four-class keeps the original labels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMode {
    Binary,
    #[default]
    FourClass,
}

impl ClassMode {
    pub fn num_classes(self) -> usize {
        match self {
            ClassMode::Binary => 2,
            ClassMode::FourClass => 4,
        }
    }

    pub fn class_names(self) -> Vec<String> {
        match self {
            ClassMode::Binary => vec!["benign".into(), "malicious".into()],
            ClassMode::FourClass => UrlClass::ALL.iter().map(|c| c.name().into()).collect(),
        }
    }

    pub fn target(self, class: UrlClass) -> usize {
        match self {
            ClassMode::Binary => usize::from(class != UrlClass::Benign),
            ClassMode::FourClass => class.label() as usize,
        }
    }

    pub fn positive_labels(self) -> Vec<u8> {
        match self {
            ClassMode::Binary => vec![1],
            ClassMode::FourClass => metrics::DEFAULT_POSITIVE_LABELS.to_vec(),
        }
    }

    pub fn metrics_mode(self) -> MetricsMode {
        match self {
            ClassMode::Binary => MetricsMode::Binary,
            ClassMode::FourClass => MetricsMode::MacroFourClass,
        }
    }
}

/// Every stage's settings plus the master seed that derives each stage's
/// generator seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub som: SomConfig,
    pub rmo: RmoConfig,
    pub gd: GdConfig,
    pub tabu: TabuConfig,
    pub num_centers: usize,
    pub feature_mode: FeatureMode,
    pub class_mode: ClassMode,
    pub ratios: [f64; 3],
    pub master_seed: u64,
    pub url_column: String,
    pub class_column: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            som: SomConfig::default(),
            rmo: RmoConfig::default(),
            gd: GdConfig::default(),
            tabu: TabuConfig::default(),
            num_centers: 100,
            feature_mode: FeatureMode::default(),
            class_mode: ClassMode::default(),
            ratios: dataset::DEFAULT_SPLIT_RATIOS,
            master_seed: 42,
            url_column: dataset::DEFAULT_URL_COLUMN.into(),
            class_column: dataset::DEFAULT_CLASS_COLUMN.into(),
        }
    }
}

impl PipelineConfig {
    pub fn split_seed(&self) -> u64 {
        self.master_seed.wrapping_add(1)
    }

    pub fn som_seed(&self) -> u64 {
        self.master_seed.wrapping_add(2)
    }

    pub fn rbfn_seed(&self) -> u64 {
        self.master_seed.wrapping_add(3)
    }

    pub fn tabu_seed(&self) -> u64 {
        self.master_seed.wrapping_add(4)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.som
            .validate()
            .map_err(|e| PipelineError::stage("config", e))?;
        self.rmo
            .validate()
            .map_err(|e| PipelineError::stage("config", e))?;
        self.gd
            .validate()
            .map_err(|e| PipelineError::stage("config", e))?;
        self.tabu
            .validate()
            .map_err(|e| PipelineError::stage("config", e))?;
        if self.num_centers < 1 {
            return Err(PipelineError::stage(
                "config",
                "num_centers must be at least 1",
            ));
        }
        let sum: f64 = self.ratios.iter().sum();
        if self.ratios.iter().any(|&r| r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(PipelineError::stage(
                "config",
                format!("split ratios must be positive and sum to 1, got {:?}", self.ratios),
            ));
        }
        Ok(())
    }
}

const MODEL_VERSION: u64 = 1;

/// A trained pipeline: everything needed to score a raw URL string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineModel {
    version: u64,
    pub normalizer: Normalizer,
    pub som: SomModel,
    pub rbfn: RbfnModel,
    pub feature_mode: FeatureMode,
    pub class_mode: ClassMode,
    pub class_names: Vec<String>,
    pub config: PipelineConfig,
}

/// Scoring result for one URL.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class_name: String,
    pub label: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    pub fn winning_score(&self) -> f64 {
        self.scores[self.label]
    }
}

impl PipelineModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<PipelineModel, PipelineError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| PipelineError::stage("model-io", format!("not a model file: {e}")))?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or(PipelineError::MissingVersion)?;
        if version != MODEL_VERSION {
            return Err(PipelineError::UnsupportedVersion(version));
        }
        serde_json::from_value(value).map_err(|e| PipelineError::stage("model-io", e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        std::fs::write(path.as_ref(), self.to_json())
            .map_err(|e| PipelineError::stage("model-io", e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PipelineModel, PipelineError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            PipelineError::stage(
                "model-io",
                format!("{}: {e}", path.as_ref().display()),
            )
        })?;
        PipelineModel::from_json(&text)
    }

    fn reduce(&self, url: &str) -> Result<Vec<f64>, PipelineError> {
        let raw = features::extract_lexical(url).map_err(|_| PipelineError::EmptyUrl)?;
        let normalized = self.normalizer.normalize(raw);
        self.som
            .extract(normalized.as_slice(), self.feature_mode)
            .map_err(|e| PipelineError::stage("som-rmo", e))
    }

    /// Score one URL: lexical features, normalization, map transform,
    /// network forward pass, argmax.
    pub fn predict_url(&self, url: &str) -> Result<Prediction, PipelineError> {
        let reduced = self.reduce(url)?;
        let scores = self
            .rbfn
            .forward(&reduced)
            .map_err(|e| PipelineError::stage("rbfn", e))?;
        let label = rbfn::argmax(&scores);
        Ok(Prediction {
            class_name: self.class_names[label].clone(),
            label,
            scores,
        })
    }
}

/// Per-split evaluation results.
#[derive(Debug, Clone)]
pub struct SplitEvaluation {
    pub name: String,
    pub confusion: ConfusionMatrix,
    pub report: MetricsReport,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub model: PipelineModel,
    /// Evaluations for the train, validation, and test splits, in order.
    pub evaluations: Vec<SplitEvaluation>,
    pub tabu_trace: Vec<TabuTraceRow>,
    /// Network state after gradient descent, before tabu refinement. The
    /// parameters here depend only on the training split.
    pub rbfn_before_tabu: RbfnModel,
    pub validation_mse_before_tabu: f64,
    pub validation_mse_after_tabu: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CleaningStats {
    pub rows_loaded: usize,
    pub missing_dropped: usize,
    pub duplicates_dropped: usize,
    pub label_conflicts: usize,
}

/// A full run from a corpus file: cleaning stats, the split, and the
/// training outcome.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub outcome: TrainingOutcome,
    pub split: DatasetSplit,
    pub cleaning: CleaningStats,
}

/// Load, clean, split, and train from a corpus CSV.
pub fn train_pipeline(
    data_path: impl AsRef<Path>,
    config: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    config.validate()?;
    let loaded = dataset::load_csv_with(data_path, &config.url_column, &config.class_column)
        .map_err(|e| PipelineError::stage("dataset", e))?;
    let rows_loaded = loaded.records.len();
    let deduped = dataset::dedup(loaded.records);
    let cleaning = CleaningStats {
        rows_loaded,
        missing_dropped: loaded.missing_dropped,
        duplicates_dropped: deduped.duplicates_dropped,
        label_conflicts: deduped.label_conflicts,
    };
    let split = dataset::stratified_split(deduped.records, config.ratios, config.split_seed())
        .map_err(|e| PipelineError::stage("dataset", e))?;
    let outcome = train_on_split(&split, config)?;
    Ok(PipelineRun {
        outcome,
        split,
        cleaning,
    })
}

fn featurize_part(
    records: &[UrlRecord],
    normalizer: &Normalizer,
) -> Result<Vec<FeatureVector>, PipelineError> {
    records
        .iter()
        .map(|r| {
            features::extract_lexical(&r.url)
                .map(|raw| normalizer.normalize(raw))
                .map_err(|e| PipelineError::stage("features", format!("{}: {e}", r.url)))
        })
        .collect()
}

/// Train every stage on an existing split. The normalizer, map, centers,
/// and network are fitted on the training part only; the tabu objective is
/// the validation MSE.
pub fn train_on_split(
    split: &DatasetSplit,
    config: &PipelineConfig,
) -> Result<TrainingOutcome, PipelineError> {
    config.validate()?;
    for (name, part) in [
        ("train", &split.train),
        ("validation", &split.validation),
        ("test", &split.test),
    ] {
        if part.is_empty() {
            return Err(PipelineError::stage(
                "dataset",
                format!("{name} split is empty"),
            ));
        }
    }

    // lexical features and the normalizer, fitted on the training part
    let train_raw: Vec<_> = split
        .train
        .iter()
        .map(|r| {
            features::extract_lexical(&r.url)
                .map_err(|e| PipelineError::stage("features", format!("{}: {e}", r.url)))
        })
        .collect::<Result<_, _>>()?;
    let normalizer =
        Normalizer::fit(&train_raw).map_err(|e| PipelineError::stage("features", e))?;

    let train_features: Vec<FeatureVector> = train_raw
        .iter()
        .map(|&raw| normalizer.normalize(raw))
        .collect();
    let validation_features = featurize_part(&split.validation, &normalizer)?;
    let test_features = featurize_part(&split.test, &normalizer)?;

    // the map trains on the normalized training vectors
    let som_config = SomConfig {
        seed: config.som_seed(),
        ..config.som.clone()
    };
    let train_vectors: Vec<Vec<f64>> = train_features
        .iter()
        .map(|f| f.as_slice().to_vec())
        .collect();
    let som = som_rmo::train_som_rmo(&train_vectors, &som_config, &config.rmo)
        .map_err(|e| PipelineError::stage("som-rmo", e))?;

    let reduce_part = |features: &[FeatureVector]| -> Result<Vec<Vec<f64>>, PipelineError> {
        features
            .iter()
            .map(|f| {
                som.extract(f.as_slice(), config.feature_mode)
                    .map_err(|e| PipelineError::stage("som-rmo", e))
            })
            .collect()
    };
    let train_reduced = reduce_part(&train_features)?;
    let validation_reduced = reduce_part(&validation_features)?;
    let test_reduced = reduce_part(&test_features)?;

    let to_samples = |reduced: &[Vec<f64>], records: &[UrlRecord]| -> Vec<LabeledSample> {
        reduced
            .iter()
            .cloned()
            .zip(records.iter().map(|r| config.class_mode.target(r.class)))
            .collect()
    };
    let train_samples = to_samples(&train_reduced, &split.train);
    let validation_samples = to_samples(&validation_reduced, &split.validation);
    let test_samples = to_samples(&test_reduced, &split.test);

    // center placement is capped by the number of distinct training points
    let distinct = {
        let mut seen = std::collections::HashSet::new();
        train_reduced
            .iter()
            .filter(|v| seen.insert(v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>()))
            .count()
    };
    let k = config.num_centers.min(distinct);
    let kmeans_out = rbfn::kmeans(&train_reduced, k, config.rbfn_seed())
        .map_err(|e| PipelineError::stage("rbfn", e))?;
    let widths = rbfn::init_widths(&kmeans_out.centers);
    let mut model = RbfnModel::new(kmeans_out.centers, widths, config.class_mode.num_classes())
        .map_err(|e| PipelineError::stage("rbfn", e))?;

    let gd_config = GdConfig {
        seed: config.rbfn_seed(),
        ..config.gd.clone()
    };
    rbfn::train_gd(&mut model, &train_samples, &gd_config)
        .map_err(|e| PipelineError::stage("rbfn", e))?;

    let validation_mse_before_tabu = model
        .mse_loss(&validation_samples)
        .map_err(|e| PipelineError::stage("rbfn", e))?;
    let rbfn_before_tabu = model.clone();

    // tabu refinement of the full parameter vector against validation MSE
    let tabu_config = TabuConfig {
        seed: config.tabu_seed(),
        ..config.tabu.clone()
    };
    let floors: Vec<(usize, f64)> = model
        .width_param_range()
        .map(|i| (i, rbfn::WIDTH_FLOOR))
        .collect();
    let template = model.clone();
    let objective_samples = validation_samples.clone();
    let objective = move |params: &[f64]| -> f64 {
        let mut candidate = template.clone();
        if candidate.unpack_params(params).is_err() {
            return f64::NAN;
        }
        candidate.mse_loss(&objective_samples).unwrap_or(f64::NAN)
    };
    let tabu_out = tabu::tabu_search(&model.pack_params(), objective, &tabu_config, &floors)
        .map_err(|e| PipelineError::stage("tabu", e))?;
    model
        .unpack_params(&tabu_out.best)
        .map_err(|e| PipelineError::stage("tabu", e))?;
    let validation_mse_after_tabu = tabu_out.best_objective;

    let pipeline_model = PipelineModel {
        version: MODEL_VERSION,
        normalizer,
        som,
        rbfn: model,
        feature_mode: config.feature_mode,
        class_mode: config.class_mode,
        class_names: config.class_mode.class_names(),
        config: config.clone(),
    };

    let positive = config.class_mode.positive_labels();
    let mode = config.class_mode.metrics_mode();
    let mut evaluations = Vec::new();
    for (name, samples) in [
        ("train", &train_samples),
        ("validation", &validation_samples),
        ("test", &test_samples),
    ] {
        evaluations.push(evaluate_samples(
            &pipeline_model.rbfn,
            name,
            samples,
            &positive,
            mode,
        )?);
    }

    Ok(TrainingOutcome {
        model: pipeline_model,
        evaluations,
        tabu_trace: tabu_out.trace,
        rbfn_before_tabu,
        validation_mse_before_tabu,
        validation_mse_after_tabu,
    })
}

fn evaluate_samples(
    model: &RbfnModel,
    name: &str,
    samples: &[LabeledSample],
    positive: &[u8],
    mode: MetricsMode,
) -> Result<SplitEvaluation, PipelineError> {
    let mut predictions = Vec::with_capacity(samples.len());
    let mut truths = Vec::with_capacity(samples.len());
    for (x, label) in samples {
        predictions.push(
            model
                .predict(x)
                .map_err(|e| PipelineError::stage("metrics", e))? as u8,
        );
        truths.push(*label as u8);
    }
    let confusion = metrics::confusion(&predictions, &truths, positive)
        .map_err(|e| PipelineError::stage("metrics", e))?;
    let report =
        metrics::compute_metrics(&confusion, mode).map_err(|e| PipelineError::stage("metrics", e))?;
    Ok(SplitEvaluation {
        name: name.to_string(),
        confusion,
        report,
    })
}

/// Evaluate a loaded model against a labeled record set.
pub fn evaluate_records(
    model: &PipelineModel,
    name: &str,
    records: &[UrlRecord],
) -> Result<SplitEvaluation, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::stage("metrics", "no records to evaluate"));
    }
    let mut predictions = Vec::with_capacity(records.len());
    let mut truths = Vec::with_capacity(records.len());
    for r in records {
        let p = model.predict_url(&r.url)?;
        predictions.push(p.label as u8);
        truths.push(model.class_mode.target(r.class) as u8);
    }
    let confusion =
        metrics::confusion(&predictions, &truths, &model.class_mode.positive_labels())
            .map_err(|e| PipelineError::stage("metrics", e))?;
    let report = metrics::compute_metrics(&confusion, model.class_mode.metrics_mode())
        .map_err(|e| PipelineError::stage("metrics", e))?;
    Ok(SplitEvaluation {
        name: name.to_string(),
        confusion,
        report,
    })
}
