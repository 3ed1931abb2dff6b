//! Corpus loading, cleaning, label encoding, and stratified splitting.
//!
//! The input is a two-column CSV (URL string, class string). Rows are
//! validated strictly: wrong field counts and unbalanced quotes are
//! rejected with the offending line number rather than repaired.

use std::borrow::Cow;
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four URL classes, with their fixed integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UrlClass {
    Benign,
    Defacement,
    Phishing,
    Malware,
}

impl UrlClass {
    pub const ALL: [UrlClass; 4] = [
        UrlClass::Benign,
        UrlClass::Defacement,
        UrlClass::Phishing,
        UrlClass::Malware,
    ];

    /// Integer label: benign 0, defacement 1, phishing 2, malware 3.
    pub fn label(self) -> u8 {
        match self {
            UrlClass::Benign => 0,
            UrlClass::Defacement => 1,
            UrlClass::Phishing => 2,
            UrlClass::Malware => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UrlClass::Benign => "benign",
            UrlClass::Defacement => "defacement",
            UrlClass::Phishing => "phishing",
            UrlClass::Malware => "malware",
        }
    }

    /// Case-insensitive parse of a class name.
    pub fn from_name(name: &str) -> Option<UrlClass> {
        UrlClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(name.trim()))
    }

    pub fn from_label(label: u8) -> Option<UrlClass> {
        UrlClass::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for UrlClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One cleaned dataset row: the raw URL string and its class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlRecord {
    pub url: String,
    pub class: UrlClass,
}

impl UrlRecord {
    pub fn new(url: impl Into<String>, class: UrlClass) -> Self {
        Self {
            url: url.into(),
            class,
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("header does not name a {0:?} column")]
    MissingColumn(String),
    #[error("line {row}: expected {expected} fields, found {found}")]
    MalformedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {row}: unbalanced or misplaced quote")]
    UnbalancedQuote { row: usize },
    #[error("line {row}: unknown class {label:?}")]
    UnknownClass { row: usize, label: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("split ratios must be positive and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
}

/// Result of loading a CSV: parsed records plus the count of rows dropped
/// for having an empty URL or class field.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub records: Vec<UrlRecord>,
    pub missing_dropped: usize,
}

pub const DEFAULT_URL_COLUMN: &str = "url";
pub const DEFAULT_CLASS_COLUMN: &str = "type";

/// Load a corpus CSV using the default column names ("url", "type").
pub fn load_csv(path: impl AsRef<Path>) -> Result<LoadOutcome, DatasetError> {
    load_csv_with(path, DEFAULT_URL_COLUMN, DEFAULT_CLASS_COLUMN)
}

/// Load a corpus CSV, naming the URL and class columns explicitly.
///
/// The first line is the header. Rows whose URL or class field is empty
/// after trimming are dropped and counted; a class outside the four-label
/// set is an error carrying the file line number.
pub fn load_csv_with(
    path: impl AsRef<Path>,
    url_column: &str,
    class_column: &str,
) -> Result<LoadOutcome, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv_text(&text, url_column, class_column)
}

fn parse_csv_text(
    text: &str,
    url_column: &str,
    class_column: &str,
) -> Result<LoadOutcome, DatasetError> {
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines.next().ok_or(DatasetError::EmptyDataset)?;
    let header_line = header_line.strip_prefix('\u{feff}').unwrap_or(header_line);
    let header = split_csv_line(header_line, 1)?;
    let find_col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };
    let url_idx = find_col(url_column)?;
    let class_idx = find_col(class_column)?;
    let width = header.len();

    let mut records = Vec::new();
    let mut missing_dropped = 0usize;
    for (idx, line) in lines {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line, row)?;
        if fields.len() != width {
            return Err(DatasetError::MalformedRow {
                row,
                expected: width,
                found: fields.len(),
            });
        }
        let url = fields[url_idx].trim();
        let class_name = fields[class_idx].trim();
        if url.is_empty() || class_name.is_empty() {
            missing_dropped += 1;
            continue;
        }
        let class = UrlClass::from_name(class_name).ok_or_else(|| DatasetError::UnknownClass {
            row,
            label: class_name.to_string(),
        })?;
        records.push(UrlRecord::new(url, class));
    }
    Ok(LoadOutcome {
        records,
        missing_dropped,
    })
}

/// Split one CSV line into fields. Quoted fields may contain commas and
/// doubled quotes; a quote that never closes, or trailing characters after
/// a closing quote, rejects the row.
fn split_csv_line(line: &str, row: usize) -> Result<Vec<String>, DatasetError> {
    enum State {
        FieldStart,
        Unquoted,
        Quoted,
        QuoteClosed,
    }
    let mut state = State::FieldStart;
    let mut fields = Vec::new();
    let mut field = String::new();
    for c in line.chars() {
        state = match state {
            State::FieldStart => match c {
                '"' => State::Quoted,
                ',' => {
                    fields.push(std::mem::take(&mut field));
                    State::FieldStart
                }
                _ => {
                    field.push(c);
                    State::Unquoted
                }
            },
            State::Unquoted => match c {
                ',' => {
                    fields.push(std::mem::take(&mut field));
                    State::FieldStart
                }
                '"' => return Err(DatasetError::UnbalancedQuote { row }),
                _ => {
                    field.push(c);
                    State::Unquoted
                }
            },
            State::Quoted => match c {
                '"' => State::QuoteClosed,
                _ => {
                    field.push(c);
                    State::Quoted
                }
            },
            State::QuoteClosed => match c {
                '"' => {
                    field.push('"');
                    State::Quoted
                }
                ',' => {
                    fields.push(std::mem::take(&mut field));
                    State::FieldStart
                }
                _ => return Err(DatasetError::UnbalancedQuote { row }),
            },
        };
    }
    match state {
        State::Quoted => Err(DatasetError::UnbalancedQuote { row }),
        _ => {
            fields.push(field);
            Ok(fields)
        }
    }
}

/// Quote a field for CSV output when it contains a delimiter, quote, or
/// line break.
pub(crate) fn csv_field(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

/// Result of deduplication: surviving records plus drop statistics.
#[derive(Debug, Clone)]
pub struct DedupOutcome {
    pub records: Vec<UrlRecord>,
    pub duplicates_dropped: usize,
    /// Dropped duplicates whose class disagreed with the kept first
    /// occurrence.
    pub label_conflicts: usize,
}

/// Drop exact-duplicate URLs, keeping the first occurrence of each and
/// preserving input order.
pub fn dedup(records: Vec<UrlRecord>) -> DedupOutcome {
    let mut first_class: HashMap<String, UrlClass> = HashMap::with_capacity(records.len());
    let mut kept = Vec::with_capacity(records.len());
    let mut duplicates_dropped = 0;
    let mut label_conflicts = 0;
    for record in records {
        match first_class.entry(record.url.clone()) {
            Entry::Occupied(e) => {
                duplicates_dropped += 1;
                if *e.get() != record.class {
                    label_conflicts += 1;
                }
            }
            Entry::Vacant(e) => {
                e.insert(record.class);
                kept.push(record);
            }
        }
    }
    DedupOutcome {
        records: kept,
        duplicates_dropped,
        label_conflicts,
    }
}

/// A train/validation/test partition of the cleaned corpus.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<UrlRecord>,
    pub validation: Vec<UrlRecord>,
    pub test: Vec<UrlRecord>,
    pub seed: u64,
    pub ratios: [f64; 3],
}

impl DatasetSplit {
    pub fn total(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    fn parts(&self) -> [(&'static str, &[UrlRecord]); 3] {
        [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ]
    }
}

pub const DEFAULT_SPLIT_RATIOS: [f64; 3] = [0.70, 0.15, 0.15];

/// Per-class counts for (train, validation, test) under the largest-
/// remainder rule, so every count is within one record of `ratio * n`.
fn largest_remainder(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let quotas = ratios.map(|r| r * n as f64);
    let mut counts = quotas.map(|q| q.floor() as usize);
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..n.saturating_sub(assigned) {
        counts[order[i % 3]] += 1;
    }
    counts
}

/// Stratified split: within each class, records are shuffled with a seeded
/// generator and allocated to the three parts by the largest-remainder
/// rule. Identical inputs and seed reproduce the split exactly.
pub fn stratified_split(
    records: Vec<UrlRecord>,
    ratios: [f64; 3],
    seed: u64,
) -> Result<DatasetSplit, DatasetError> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|&r| r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadRatios(ratios));
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }

    let mut by_class: [Vec<usize>; 4] = Default::default();
    for (i, record) in records.iter().enumerate() {
        by_class[record.class.label() as usize].push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // 0 = train, 1 = validation, 2 = test
    let mut assignment = vec![0u8; records.len()];
    for indices in &mut by_class {
        if indices.is_empty() {
            continue;
        }
        indices.shuffle(&mut rng);
        let counts = largest_remainder(indices.len(), ratios);
        let mut cursor = 0;
        for (part, &count) in counts.iter().enumerate() {
            for &record_idx in &indices[cursor..cursor + count] {
                assignment[record_idx] = part as u8;
            }
            cursor += count;
        }
    }

    let mut split = DatasetSplit {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
    };
    for (record, &part) in records.into_iter().zip(assignment.iter()) {
        match part {
            0 => split.train.push(record),
            1 => split.validation.push(record),
            _ => split.test.push(record),
        }
    }
    Ok(split)
}

fn write_records_csv(
    path: &Path,
    records: &[UrlRecord],
    url_column: &str,
    class_column: &str,
) -> Result<(), DatasetError> {
    let mut out = String::new();
    out.push_str(&format!(
        "{},{},class_label\n",
        csv_field(url_column),
        csv_field(class_column)
    ));
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&r.url),
            r.class.name(),
            r.class.label()
        ));
    }
    fs::write(path, out).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write the cleaned corpus with the integer label appended as a third
/// column.
pub fn write_cleaned_csv(
    path: impl AsRef<Path>,
    records: &[UrlRecord],
    url_column: &str,
    class_column: &str,
) -> Result<(), DatasetError> {
    write_records_csv(path.as_ref(), records, url_column, class_column)
}

/// Write one CSV manifest per split part plus a text summary of per-class
/// counts.
pub fn write_split_manifests(
    dir: impl AsRef<Path>,
    split: &DatasetSplit,
    url_column: &str,
    class_column: &str,
) -> Result<(), DatasetError> {
    let dir = dir.as_ref();
    let io_err = |path: &Path, source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    };
    for (name, records) in split.parts() {
        let path = dir.join(format!("split_{name}.csv"));
        write_records_csv(&path, records, url_column, class_column)?;
    }

    let summary_path = dir.join("split_summary.txt");
    let mut file = fs::File::create(&summary_path).map_err(|e| io_err(&summary_path, e))?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(
            file,
            "{:<12} {:>10} {:>12} {:>10} {:>10} {:>10}",
            "split", "benign", "defacement", "phishing", "malware", "total"
        )?;
        for (name, records) in split.parts() {
            let mut counts = [0usize; 4];
            for r in records {
                counts[r.class.label() as usize] += 1;
            }
            writeln!(
                file,
                "{:<12} {:>10} {:>12} {:>10} {:>10} {:>10}",
                name,
                counts[0],
                counts[1],
                counts[2],
                counts[3],
                records.len()
            )?;
        }
        Ok(())
    };
    emit().map_err(|e| io_err(&summary_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn parse(text: &str) -> Result<LoadOutcome, DatasetError> {
        parse_csv_text(text, "url", "type")
    }

    #[test]
    fn label_encoding_is_the_fixed_bijection() {
        assert_eq!(UrlClass::from_name("benign").unwrap().label(), 0);
        assert_eq!(UrlClass::from_name("defacement").unwrap().label(), 1);
        assert_eq!(UrlClass::from_name("phishing").unwrap().label(), 2);
        assert_eq!(UrlClass::from_name("malware").unwrap().label(), 3);
        for class in UrlClass::ALL {
            assert_eq!(UrlClass::from_label(class.label()), Some(class));
            assert_eq!(UrlClass::from_name(class.name()), Some(class));
        }
        assert_eq!(UrlClass::from_name("spam"), None);
        assert_eq!(UrlClass::from_label(4), None);
    }

    #[test]
    fn loads_one_record_per_class() {
        let out = parse(
            "url,type\n\
             http://a.com,benign\n\
             http://b.com,defacement\n\
             http://c.com,phishing\n\
             http://d.com,malware\n",
        )
        .unwrap();
        let labels: Vec<u8> = out.records.iter().map(|r| r.class.label()).collect();
        assert_eq!(labels, vec![0, 1, 2, 3]);
        assert_eq!(out.missing_dropped, 0);
    }

    #[test]
    fn unknown_class_reports_row_and_label() {
        let err = parse("url,type\nhttp://a.com,benign\nhttp://b.com,spam\n").unwrap_err();
        match err {
            DatasetError::UnknownClass { row, label } => {
                assert_eq!(row, 3);
                assert_eq!(label, "spam");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_fields_are_dropped_and_counted() {
        let out = parse("url,type\n,benign\nhttp://a.com,\nhttp://b.com,malware\n").unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.missing_dropped, 2);
    }

    #[test]
    fn quoted_fields_keep_embedded_commas() {
        let out = parse("url,type\n\"http://a.com/x,y\",benign\n").unwrap();
        assert_eq!(out.records[0].url, "http://a.com/x,y");
    }

    #[test]
    fn doubled_quotes_decode_to_one() {
        let fields = split_csv_line("\"a\"\"b\",c", 1).unwrap();
        assert_eq!(fields, vec!["a\"b".to_string(), "c".to_string()]);
    }

    #[test]
    fn unbalanced_quote_rejects_the_row() {
        let err = parse("url,type\n\"http://a.com,benign\n").unwrap_err();
        assert!(matches!(err, DatasetError::UnbalancedQuote { row: 2 }));
        let err = parse("url,type\n\"http://a.com\"x,benign\n").unwrap_err();
        assert!(matches!(err, DatasetError::UnbalancedQuote { row: 2 }));
        let err = parse("url,type\nhttp://a\".com,benign\n").unwrap_err();
        assert!(matches!(err, DatasetError::UnbalancedQuote { row: 2 }));
    }

    #[test]
    fn wrong_field_count_names_the_row() {
        let err = parse("url,type\nhttp://a.com,benign,extra\n").unwrap_err();
        match err {
            DatasetError::MalformedRow {
                row,
                expected,
                found,
            } => {
                assert_eq!((row, expected, found), (2, 2, 3));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn missing_column_is_an_error() {
        let err = parse_csv_text("address,type\nhttp://a.com,benign\n", "url", "type").unwrap_err();
        assert!(matches!(err, DatasetError::MissingColumn(c) if c == "url"));
    }

    #[test]
    fn extra_columns_are_tolerated_when_consistent() {
        let out =
            parse_csv_text("url,type,class_label\nhttp://a.com,benign,0\n", "url", "type").unwrap();
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let recs = vec![
            UrlRecord::new("a", UrlClass::Benign),
            UrlRecord::new("b", UrlClass::Phishing),
            UrlRecord::new("a", UrlClass::Benign),
        ];
        let out = dedup(recs);
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.records[0].url, "a");
        assert_eq!(out.records[1].url, "b");
        assert_eq!(out.duplicates_dropped, 1);
        assert_eq!(out.label_conflicts, 0);
    }

    #[test]
    fn dedup_of_unique_list_is_identity() {
        let recs = vec![
            UrlRecord::new("a", UrlClass::Benign),
            UrlRecord::new("b", UrlClass::Phishing),
        ];
        let out = dedup(recs.clone());
        assert_eq!(out.records, recs);
        assert_eq!(out.duplicates_dropped, 0);
    }

    #[test]
    fn dedup_counts_label_conflicts() {
        let recs = vec![
            UrlRecord::new("a", UrlClass::Benign),
            UrlRecord::new("a", UrlClass::Malware),
        ];
        let out = dedup(recs);
        assert_eq!(out.records[0].class, UrlClass::Benign);
        assert_eq!(out.duplicates_dropped, 1);
        assert_eq!(out.label_conflicts, 1);
    }

    fn three_class_corpus() -> Vec<UrlRecord> {
        let mut recs = Vec::new();
        for i in 0..50 {
            recs.push(UrlRecord::new(format!("http://b{i}.com"), UrlClass::Benign));
        }
        for i in 0..25 {
            recs.push(UrlRecord::new(
                format!("http://p{i}.com"),
                UrlClass::Phishing,
            ));
        }
        for i in 0..25 {
            recs.push(UrlRecord::new(
                format!("http://m{i}.com"),
                UrlClass::Malware,
            ));
        }
        recs
    }

    #[test]
    fn split_counts_follow_largest_remainder() {
        // 50 records at 0.7/0.15/0.15 allocate (35, 8, 7); 25 allocate (17, 4, 4).
        assert_eq!(largest_remainder(50, [0.7, 0.15, 0.15]), [35, 8, 7]);
        assert_eq!(largest_remainder(25, [0.7, 0.15, 0.15]), [17, 4, 4]);

        let split = stratified_split(three_class_corpus(), [0.7, 0.15, 0.15], 9).unwrap();
        let count = |part: &[UrlRecord], class: UrlClass| {
            part.iter().filter(|r| r.class == class).count()
        };
        assert_eq!(count(&split.train, UrlClass::Benign), 35);
        assert_eq!(count(&split.validation, UrlClass::Benign), 8);
        assert_eq!(count(&split.test, UrlClass::Benign), 7);
        for class in [UrlClass::Phishing, UrlClass::Malware] {
            assert_eq!(count(&split.train, class), 17);
            assert_eq!(count(&split.validation, class), 4);
            assert_eq!(count(&split.test, class), 4);
        }
    }

    #[test]
    fn split_is_deterministic_for_a_seed() {
        let a = stratified_split(three_class_corpus(), [0.7, 0.15, 0.15], 42).unwrap();
        let b = stratified_split(three_class_corpus(), [0.7, 0.15, 0.15], 42).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.validation, b.validation);
        assert_eq!(a.test, b.test);
        let c = stratified_split(three_class_corpus(), [0.7, 0.15, 0.15], 43).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn bad_ratios_are_rejected() {
        let err = stratified_split(three_class_corpus(), [0.5, 0.5, 0.5], 1).unwrap_err();
        assert!(matches!(err, DatasetError::BadRatios(_)));
        let err = stratified_split(three_class_corpus(), [1.0, 0.0, 0.0], 1).unwrap_err();
        assert!(matches!(err, DatasetError::BadRatios(_)));
        let err = stratified_split(Vec::new(), [0.7, 0.15, 0.15], 1).unwrap_err();
        assert!(matches!(err, DatasetError::EmptyDataset));
    }

    #[test]
    fn csv_field_quotes_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
    }

    proptest! {
        #[test]
        fn dedup_leaves_no_duplicate_urls(urls in proptest::collection::vec("[a-d]{1,3}", 0..40)) {
            let recs: Vec<UrlRecord> = urls
                .iter()
                .map(|u| UrlRecord::new(u.clone(), UrlClass::Benign))
                .collect();
            let out = dedup(recs);
            let unique: HashSet<&str> = out.records.iter().map(|r| r.url.as_str()).collect();
            prop_assert_eq!(unique.len(), out.records.len());
        }

        #[test]
        fn split_partitions_and_stratifies(
            counts in proptest::collection::vec(1usize..40, 2..5),
            seed in 0u64..1000,
        ) {
            let mut recs = Vec::new();
            for (ci, &n) in counts.iter().enumerate() {
                let class = UrlClass::from_label((ci % 4) as u8).unwrap();
                for i in 0..n {
                    recs.push(UrlRecord::new(format!("http://{ci}-{i}.com"), class));
                }
            }
            let total = recs.len();
            let ratios = [0.7, 0.15, 0.15];
            let split = stratified_split(recs.clone(), ratios, seed).unwrap();
            prop_assert_eq!(split.total(), total);

            let urls = |part: &[UrlRecord]| -> HashSet<String> {
                part.iter().map(|r| r.url.clone()).collect()
            };
            let (tr, va, te) = (urls(&split.train), urls(&split.validation), urls(&split.test));
            prop_assert!(tr.is_disjoint(&va));
            prop_assert!(tr.is_disjoint(&te));
            prop_assert!(va.is_disjoint(&te));

            for class in UrlClass::ALL {
                let class_total = recs.iter().filter(|r| r.class == class).count();
                for (part, ratio) in [(&split.train, 0.7), (&split.validation, 0.15), (&split.test, 0.15)] {
                    let got = part.iter().filter(|r| r.class == class).count() as f64;
                    prop_assert!((got - ratio * class_total as f64).abs() <= 1.0 + 1e-9);
                }
            }
        }
    }
}
