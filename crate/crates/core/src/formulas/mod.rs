//! Traditional readability formulas and the pairwise formula baseline.

pub mod text;

use std::collections::HashMap;

use crate::corpus::{PairInstance, Prediction, TextRecord};
use crate::error::{Error, Result};
use crate::eval::PredictionRecord;
use crate::prompts::truncate_tokens;

/// Format tag carried by baseline prediction records.
pub const BASELINE_FORMAT: &str = "baseline:fkgl";

/// Counts feeding the formulas. All three are at least 1, and
/// `syllables >= words`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
}

impl TextStats {
    pub fn new(sentences: usize, words: usize, syllables: usize) -> Result<Self> {
        if sentences == 0 || words == 0 || syllables < words {
            return Err(Error::Unanalyzable);
        }
        Ok(TextStats {
            sentences,
            words,
            syllables,
        })
    }
}

/// Counts sentences, words and syllables. See [`text`] for the rules.
pub fn analyze(input: &str) -> Result<TextStats> {
    let words = text::words(input);
    if words.is_empty() {
        return Err(Error::Unanalyzable);
    }
    let sentences = text::sentences(input).len().max(1);
    let syllables = words.iter().map(|w| text::syllables(w)).sum();
    TextStats::new(sentences, words.len(), syllables)
}

/// Flesch-Kincaid grade level.
pub fn fkgl(stats: &TextStats) -> f64 {
    let words_per_sentence = stats.words as f64 / stats.sentences as f64;
    let syllables_per_word = stats.syllables as f64 / stats.words as f64;
    0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59
}

fn grade(body: &str, truncate_to: Option<usize>) -> Option<f64> {
    let body = match truncate_to {
        Some(budget) => truncate_tokens(body, budget).0,
        None => body.into(),
    };
    analyze(&body).ok().map(|s| fkgl(&s))
}

fn compare(g1: Option<f64>, g2: Option<f64>) -> Prediction {
    match (g1, g2) {
        (Some(a), Some(b)) if a > b => Prediction::Text1Harder,
        (Some(a), Some(b)) if a < b => Prediction::Text2Harder,
        _ => Prediction::Invalid,
    }
}

/// Higher grade level is predicted harder. Ties and unanalyzable texts give
/// `Invalid`.
pub fn rank_pair(instance: &PairInstance) -> Prediction {
    compare(
        grade(&instance.text1.body, None),
        grade(&instance.text2.body, None),
    )
}

/// Pair ranker that grades each distinct text once.
#[derive(Debug, Default)]
pub struct FkglBaseline {
    /// Score only the first N whitespace tokens of each text.
    pub truncate_to: Option<usize>,
    cache: HashMap<(String, String), Option<f64>>,
}

impl FkglBaseline {
    pub fn new(truncate_to: Option<usize>) -> Self {
        FkglBaseline {
            truncate_to,
            cache: HashMap::new(),
        }
    }

    pub fn grade(&mut self, record: &TextRecord) -> Option<f64> {
        let key = (record.corpus_name.clone(), record.id.clone());
        let truncate_to = self.truncate_to;
        *self
            .cache
            .entry(key)
            .or_insert_with(|| grade(&record.body, truncate_to))
    }

    pub fn rank(&mut self, instance: &PairInstance) -> Prediction {
        let g1 = self.grade(&instance.text1);
        let g2 = self.grade(&instance.text2);
        compare(g1, g2)
    }

    /// Prediction records in the shared prediction-file format.
    pub fn predict(&mut self, instances: &[PairInstance]) -> Vec<PredictionRecord> {
        instances
            .iter()
            .map(|inst| PredictionRecord {
                instance_id: inst.instance_id.clone(),
                raw_output: baseline_output(self.rank(inst)).to_string(),
                format: BASELINE_FORMAT.to_string(),
                epoch: None,
            })
            .collect()
    }
}

/// Raw-output spelling of a baseline prediction.
pub fn baseline_output(p: Prediction) -> &'static str {
    match p {
        Prediction::Text1Harder => "Text 1",
        Prediction::Text2Harder => "Text 2",
        Prediction::Invalid => "tie",
    }
}
