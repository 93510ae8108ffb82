//! Scoring prediction files against gold pairs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{PairInstance, Prediction};
use crate::error::{Error, Result};
use crate::formulas::BASELINE_FORMAT;
use crate::prompts::{parse_output, FormatKind, FormatSpec};

/// One line of a prediction file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub instance_id: String,
    pub raw_output: String,
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<u32>,
}

/// Resolves a record's `format` tag to the rule that turns its raw output
/// into a prediction.
#[derive(Debug, Clone)]
pub struct FormatRegistry {
    specs: HashMap<String, FormatSpec>,
}

impl FormatRegistry {
    /// The nine builtin formats under their machine names.
    pub fn builtin() -> Self {
        let specs = FormatKind::ALL
            .iter()
            .map(|k| (k.as_str().to_string(), k.spec()))
            .collect();
        FormatRegistry { specs }
    }

    pub fn insert(&mut self, name: impl Into<String>, spec: FormatSpec) {
        self.specs.insert(name.into(), spec);
    }

    pub fn interpret(&self, record: &PredictionRecord) -> Result<Prediction> {
        if record.format == BASELINE_FORMAT {
            return Ok(match record.raw_output.trim().to_lowercase().as_str() {
                "text 1" => Prediction::Text1Harder,
                "text 2" => Prediction::Text2Harder,
                _ => Prediction::Invalid,
            });
        }
        let spec = match self.specs.get(&record.format) {
            Some(spec) => spec.clone(),
            None => record.format.parse::<FormatKind>()?.spec(),
        };
        Ok(parse_output(&record.raw_output, &spec))
    }
}

impl Default for FormatRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub total: usize,
    pub correct: usize,
    pub invalid: usize,
    pub accuracy: f64,
}

impl Stratum {
    fn add(&mut self, correct: bool, invalid: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
        self.invalid += usize::from(invalid);
        self.refresh();
    }

    fn absorb(&mut self, other: &Stratum) {
        self.total += other.total;
        self.correct += other.correct;
        self.invalid += other.invalid;
        self.refresh();
    }

    fn refresh(&mut self) {
        self.accuracy = if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        };
    }
}

/// Accuracy of one model (trained on `train_corpus`, `None` for untrained
/// baselines) on one test corpus, optionally at one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub train_corpus: Option<String>,
    pub test_corpus: String,
    pub epoch: Option<u32>,
    pub total: usize,
    pub correct: usize,
    pub invalid: usize,
    pub accuracy: f64,
    /// Keyed by level distance.
    pub by_distance: BTreeMap<u32, Stratum>,
}

impl EvalReport {
    pub fn incorrect(&self) -> usize {
        self.total - self.correct - self.invalid
    }

    /// `0.991(30)`: accuracy with the epoch in brackets.
    pub fn bracketed(&self) -> String {
        match self.epoch {
            Some(e) => format!("{:.3}({e})", self.accuracy),
            None => format!("{:.3}", self.accuracy),
        }
    }

    fn refresh(&mut self) {
        self.accuracy = if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        };
    }

    /// Combines reports over disjoint prediction sets for the same model,
    /// corpora and epoch.
    pub fn merge(&self, other: &EvalReport) -> Result<EvalReport> {
        // A report over no predictions has no test corpus; it is the identity.
        let empty = |r: &EvalReport| r.total == 0 && r.test_corpus.is_empty();
        if empty(other) && self.model == other.model {
            return Ok(self.clone());
        }
        if empty(self) && self.model == other.model {
            return Ok(other.clone());
        }
        let same = self.model == other.model
            && self.train_corpus == other.train_corpus
            && self.test_corpus == other.test_corpus
            && self.epoch == other.epoch;
        if !same {
            return Err(Error::Merge(format!(
                "{}/{:?}/{}/{:?} vs {}/{:?}/{}/{:?}",
                self.model,
                self.train_corpus,
                self.test_corpus,
                self.epoch,
                other.model,
                other.train_corpus,
                other.test_corpus,
                other.epoch
            )));
        }
        let mut out = self.clone();
        out.total += other.total;
        out.correct += other.correct;
        out.invalid += other.invalid;
        for (d, s) in &other.by_distance {
            out.by_distance.entry(*d).or_default().absorb(s);
        }
        out.refresh();
        Ok(out)
    }
}

/// Who produced the predictions being scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub model: String,
    pub train_corpus: Option<String>,
}

impl Provenance {
    pub fn new(model: impl Into<String>, train_corpus: Option<String>) -> Self {
        Provenance {
            model: model.into(),
            train_corpus,
        }
    }

    pub fn baseline() -> Self {
        Provenance::new("Flesch-Kincaid", None)
    }
}

/// Scores predictions against gold. Every gold instance needs exactly one
/// prediction and every prediction must join to gold. Invalid outputs count
/// in the total and never as correct.
pub fn score(
    predictions: &[PredictionRecord],
    gold: &[PairInstance],
    formats: &FormatRegistry,
    provenance: &Provenance,
) -> Result<EvalReport> {
    let by_id: HashMap<&str, &PairInstance> =
        gold.iter().map(|g| (g.instance_id.as_str(), g)).collect();

    let unmatched: Vec<String> = predictions
        .iter()
        .filter(|p| !by_id.contains_key(p.instance_id.as_str()))
        .map(|p| p.instance_id.clone())
        .collect();
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedPredictions(unmatched));
    }
    let mut seen = HashSet::with_capacity(predictions.len());
    for p in predictions {
        if !seen.insert(p.instance_id.as_str()) {
            return Err(Error::DuplicatePrediction(p.instance_id.clone()));
        }
    }
    let missing: Vec<String> = gold
        .iter()
        .filter(|g| !seen.contains(g.instance_id.as_str()))
        .map(|g| g.instance_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }

    let epoch = predictions.first().and_then(|p| p.epoch);
    if let Some(p) = predictions.iter().find(|p| p.epoch != epoch) {
        return Err(Error::MixedEpochs(epoch, p.epoch));
    }

    let mut test_corpora: Vec<&str> = Vec::new();
    for g in gold {
        if !test_corpora.contains(&g.corpus_name()) {
            test_corpora.push(g.corpus_name());
        }
    }

    let mut report = EvalReport {
        model: provenance.model.clone(),
        train_corpus: provenance.train_corpus.clone(),
        test_corpus: test_corpora.join("+"),
        epoch,
        total: 0,
        correct: 0,
        invalid: 0,
        accuracy: 0.0,
        by_distance: BTreeMap::new(),
    };
    for p in predictions {
        let instance = by_id[p.instance_id.as_str()];
        let prediction = formats.interpret(p)?;
        let correct = prediction.is_correct(instance.gold);
        let invalid = prediction == Prediction::Invalid;
        report.total += 1;
        report.correct += usize::from(correct);
        report.invalid += usize::from(invalid);
        report
            .by_distance
            .entry(instance.level_distance)
            .or_default()
            .add(correct, invalid);
    }
    report.refresh();
    Ok(report)
}

/// The report with the highest accuracy; ties go to the earlier epoch.
pub fn best_epoch(reports: &[EvalReport]) -> Result<(u32, &EvalReport)> {
    let first = reports
        .first()
        .ok_or_else(|| Error::BestEpoch("no reports".into()))?;
    let mut epochs = HashSet::new();
    for r in reports {
        let epoch = r
            .epoch
            .ok_or_else(|| Error::BestEpoch(format!("report on {} has no epoch", r.test_corpus)))?;
        if !epochs.insert(epoch) {
            return Err(Error::BestEpoch(format!("epoch {epoch} appears twice")));
        }
        if r.model != first.model
            || r.train_corpus != first.train_corpus
            || r.test_corpus != first.test_corpus
        {
            return Err(Error::BestEpoch("reports describe different runs".into()));
        }
    }
    let best = reports
        .iter()
        .max_by(|a, b| {
            a.accuracy
                .total_cmp(&b.accuracy)
                .then_with(|| b.epoch.cmp(&a.epoch))
        })
        .expect("non-empty");
    Ok((best.epoch.expect("checked"), best))
}

/// How a matrix cell relates to the row's training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// The row has no training corpus.
    Untrained,
    InDomain,
    CrossDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub model: String,
    pub train_corpus: Option<String>,
    pub test_corpus: String,
    pub domain: Domain,
    pub accuracy: f64,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epoch: Option<u32>,
}

/// Models × test corpora. Rows and columns keep first-appearance order; a
/// later report for the same cell replaces an earlier one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Matrix {
    pub rows: Vec<(String, Option<String>)>,
    pub columns: Vec<String>,
    cells: HashMap<(usize, usize), MatrixCell>,
}

fn domain_of(train: Option<&str>, test: &str) -> Domain {
    match train {
        None => Domain::Untrained,
        Some(train) => {
            let test = test.to_ascii_lowercase();
            if train
                .split('+')
                .any(|t| t.trim().to_ascii_lowercase() == test)
            {
                Domain::InDomain
            } else {
                Domain::CrossDomain
            }
        }
    }
}

pub fn matrix(reports: &[EvalReport]) -> Matrix {
    let mut m = Matrix::default();
    for r in reports {
        let row_key = (r.model.clone(), r.train_corpus.clone());
        let row = m
            .rows
            .iter()
            .position(|k| *k == row_key)
            .unwrap_or_else(|| {
                m.rows.push(row_key);
                m.rows.len() - 1
            });
        let col = m
            .columns
            .iter()
            .position(|c| *c == r.test_corpus)
            .unwrap_or_else(|| {
                m.columns.push(r.test_corpus.clone());
                m.columns.len() - 1
            });
        m.cells.insert(
            (row, col),
            MatrixCell {
                model: r.model.clone(),
                train_corpus: r.train_corpus.clone(),
                test_corpus: r.test_corpus.clone(),
                domain: domain_of(r.train_corpus.as_deref(), &r.test_corpus),
                accuracy: r.accuracy,
                total: r.total,
                epoch: r.epoch,
            },
        );
    }
    m
}

impl Matrix {
    pub fn cell(&self, row: usize, col: usize) -> Option<&MatrixCell> {
        self.cells.get(&(row, col))
    }

    pub fn row_label(&self, row: usize) -> String {
        let (model, train) = &self.rows[row];
        format!("{model} / {}", train.as_deref().unwrap_or("None"))
    }

    /// Aligned text table. In-domain cells are wrapped in `[ ]`, cross-domain
    /// cells carry a trailing `*`, untrained rows are plain. Best-epoch cells
    /// show the epoch in parentheses.
    pub fn render_text(&self) -> String {
        let header = "Model / Fine-Tune Data".to_string();
        let mut table: Vec<Vec<String>> = vec![std::iter::once(header)
            .chain(self.columns.iter().cloned())
            .collect()];
        for row in 0..self.rows.len() {
            let mut line = vec![self.row_label(row)];
            for col in 0..self.columns.len() {
                line.push(match self.cell(row, col) {
                    None => "-".to_string(),
                    Some(c) => {
                        let value = match c.epoch {
                            Some(e) => format!("{:.3}({e})", c.accuracy),
                            None => format!("{:.3}", c.accuracy),
                        };
                        match c.domain {
                            Domain::Untrained => value,
                            Domain::InDomain => format!("[{value}]"),
                            Domain::CrossDomain => format!("{value}*"),
                        }
                    }
                });
            }
            table.push(line);
        }
        let ncols = table[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|c| {
                table
                    .iter()
                    .map(|r| r[c].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for line in &table {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if c == 0 {
                        format!("{s:<w$}", w = widths[c])
                    } else {
                        format!("{s:>w$}", w = widths[c])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> Vec<&MatrixCell> {
        let mut out = Vec::new();
        for row in 0..self.rows.len() {
            for col in 0..self.columns.len() {
                if let Some(c) = self.cell(row, col) {
                    out.push(c);
                }
            }
        }
        out
    }
}
