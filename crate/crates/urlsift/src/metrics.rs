//! Confusion matrices and the five derived metrics, in binary and
//! macro-averaged four-class form.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

use crate::dataset::csv_field;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction and truth lists differ in length: {predictions} vs {truths}")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("no samples to evaluate")]
    EmptyInput,
    #[error("label {0} outside the supported range 0..4")]
    LabelOutOfRange(u8),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub const NUM_CLASSES: usize = 4;

/// Labels counted as "positive" when collapsing to binary counts: every
/// malicious class.
pub const DEFAULT_POSITIVE_LABELS: [u8; 3] = [1, 2, 3];

/// Binary counts plus the full per-class count matrix
/// (rows = true class, columns = predicted class).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positive: u64,
    pub true_negative: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub multi: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    /// Binary counts alone, with an empty per-class matrix. Used when only
    /// aggregate counts are available.
    pub fn from_binary_counts(
        true_positive: u64,
        true_negative: u64,
        false_positive: u64,
        false_negative: u64,
    ) -> ConfusionMatrix {
        ConfusionMatrix {
            true_positive,
            true_negative,
            false_positive,
            false_negative,
            multi: [[0; NUM_CLASSES]; NUM_CLASSES],
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positive + self.true_negative + self.false_positive + self.false_negative
    }

    pub fn multi_total(&self) -> u64 {
        self.multi.iter().flatten().sum()
    }
}

/// Count predictions against truths. `positive_labels` defines the binary
/// collapse; the per-class matrix is filled alongside.
pub fn confusion(
    predictions: &[u8],
    truths: &[u8],
    positive_labels: &[u8],
) -> Result<ConfusionMatrix, MetricsError> {
    if predictions.len() != truths.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut cm = ConfusionMatrix::from_binary_counts(0, 0, 0, 0);
    for (&p, &t) in predictions.iter().zip(truths) {
        if p as usize >= NUM_CLASSES {
            return Err(MetricsError::LabelOutOfRange(p));
        }
        if t as usize >= NUM_CLASSES {
            return Err(MetricsError::LabelOutOfRange(t));
        }
        cm.multi[t as usize][p as usize] += 1;
        let predicted_positive = positive_labels.contains(&p);
        let truly_positive = positive_labels.contains(&t);
        match (predicted_positive, truly_positive) {
            (true, true) => cm.true_positive += 1,
            (false, false) => cm.true_negative += 1,
            (true, false) => cm.false_positive += 1,
            (false, true) => cm.false_negative += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricsMode {
    Binary,
    MacroFourClass,
}

impl fmt::Display for MetricsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricsMode::Binary => "binary",
            MetricsMode::MacroFourClass => "macro-4-class",
        })
    }
}

/// Which metric denominators were zero (those metrics report 0).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroDenominatorFlags {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
    pub specificity: bool,
}

impl ZeroDenominatorFlags {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1 || self.specificity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub accuracy: f64,
    pub recall: f64,
    pub f1: f64,
    pub specificity: f64,
    pub mode: MetricsMode,
    pub zero_flags: ZeroDenominatorFlags,
}

fn ratio(numerator: f64, denominator: f64, flag: &mut bool) -> f64 {
    if denominator == 0.0 {
        *flag = true;
        0.0
    } else {
        numerator / denominator
    }
}

fn binary_metrics(tp: f64, tn: f64, fp: f64, fn_: f64, flags: &mut ZeroDenominatorFlags) -> [f64; 5] {
    let total = tp + tn + fp + fn_;
    let precision = ratio(tp, tp + fp, &mut flags.precision);
    let recall = ratio(tp, tp + fn_, &mut flags.recall);
    let accuracy = (tp + tn) / total;
    let specificity = ratio(tn, tn + fp, &mut flags.specificity);
    let f1 = ratio(2.0 * precision * recall, precision + recall, &mut flags.f1);
    [precision, accuracy, recall, f1, specificity]
}

/// Derive the five metrics. Binary mode reads the four counts directly;
/// four-class mode macro-averages one-vs-rest metrics over the classes.
/// Any zero denominator yields 0 for that metric and sets its flag.
pub fn compute_metrics(
    cm: &ConfusionMatrix,
    mode: MetricsMode,
) -> Result<MetricsReport, MetricsError> {
    let mut flags = ZeroDenominatorFlags::default();
    let values = match mode {
        MetricsMode::Binary => {
            if cm.total() == 0 {
                return Err(MetricsError::EmptyInput);
            }
            binary_metrics(
                cm.true_positive as f64,
                cm.true_negative as f64,
                cm.false_positive as f64,
                cm.false_negative as f64,
                &mut flags,
            )
        }
        MetricsMode::MacroFourClass => {
            let total = cm.multi_total();
            if total == 0 {
                return Err(MetricsError::EmptyInput);
            }
            let mut sums = [0.0; 5];
            for class in 0..NUM_CLASSES {
                let tp = cm.multi[class][class];
                let row: u64 = cm.multi[class].iter().sum();
                let col: u64 = (0..NUM_CLASSES).map(|r| cm.multi[r][class]).sum();
                let fp = col - tp;
                let fn_ = row - tp;
                let tn = total - tp - fp - fn_;
                let values =
                    binary_metrics(tp as f64, tn as f64, fp as f64, fn_ as f64, &mut flags);
                for (s, v) in sums.iter_mut().zip(values) {
                    *s += v;
                }
            }
            sums.map(|s| s / NUM_CLASSES as f64)
        }
    };
    let [precision, accuracy, recall, _, specificity] = values;
    // macro f1 is recomputed from the averaged precision and recall so the
    // harmonic-mean identity holds in both modes
    let f1 = ratio(
        2.0 * precision * recall,
        precision + recall,
        &mut flags.f1,
    );
    Ok(MetricsReport {
        precision,
        accuracy,
        recall,
        f1,
        specificity,
        mode,
        zero_flags: flags,
    })
}

/// Round half away from zero at two decimals, for display.
fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Human-readable metrics table: one row per split.
pub fn report_table(reports: &[(String, MetricsReport)]) -> String {
    let mut out = format!(
        "{:<12} {:>10} {:>9} {:>7} {:>9} {:>12}  {}\n",
        "split", "precision", "accuracy", "recall", "f1-score", "specificity", "mode"
    );
    for (name, r) in reports {
        out.push_str(&format!(
            "{:<12} {:>10.2} {:>9.2} {:>7.2} {:>9.2} {:>12.2}  {}\n",
            name,
            round2(r.precision),
            round2(r.accuracy),
            round2(r.recall),
            round2(r.f1),
            round2(r.specificity),
            r.mode
        ));
    }
    out
}

/// Machine-readable metrics CSV at full precision.
pub fn write_report_csv(
    path: impl AsRef<Path>,
    reports: &[(String, MetricsReport)],
) -> Result<(), MetricsError> {
    let path = path.as_ref();
    let mut out = String::from("split,precision,accuracy,recall,f1,specificity,mode\n");
    for (name, r) in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_field(name),
            r.precision,
            r.accuracy,
            r.recall,
            r.f1,
            r.specificity,
            r.mode
        ));
    }
    std::fs::write(path, out).map_err(|source| MetricsError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Binary confusion counts per split.
pub fn write_confusion_csv(
    path: impl AsRef<Path>,
    rows: &[(String, ConfusionMatrix)],
) -> Result<(), MetricsError> {
    let path = path.as_ref();
    let mut out = String::from("split,tp,tn,fp,fn\n");
    for (name, cm) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(name),
            cm.true_positive,
            cm.true_negative,
            cm.false_positive,
            cm.false_negative
        ));
    }
    std::fs::write(path, out).map_err(|source| MetricsError::Io {
        path: path.display().to_string(),
        source,
    })
}
