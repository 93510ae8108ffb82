//! Readability corpora and the pairwise instances derived from them.
//!
//! A corpus is either *parallel* (texts grouped into slugs, each slug holding
//! the same content at several reading levels) or *distinct* (independent
//! texts, each with one level). Both are turned into ordered
//! "which text is harder?" pairs by [`permute_parallel`] and
//! [`permute_distinct`], then partitioned by [`split`].

mod ingest;
mod levels;
mod permute;
mod split;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use ingest::{ingest, Adapter, CorpusKind, IngestOutput};
pub use levels::LevelMap;
pub use permute::{permute_distinct, permute_parallel};
pub use split::{split, Ratios, Split, SplitMode};

/// A reading level: the corpus-local `rank` orders difficulty, `label` is
/// the annotation as it appeared in the source.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReadingLevel {
    pub rank: i32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub body: String,
    pub level: ReadingLevel,
    pub slug_id: Option<String>,
    pub corpus_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slug {
    pub slug_id: String,
    pub members: Vec<Arc<TextRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub name: String,
    pub slugs: Vec<Slug>,
}

impl ParallelCorpus {
    pub fn text_count(&self) -> usize {
        self.slugs.iter().map(|s| s.members.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctCorpus {
    pub name: String,
    pub records: Vec<Arc<TextRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Corpus {
    Parallel(ParallelCorpus),
    Distinct(DistinctCorpus),
}

impl Corpus {
    pub fn name(&self) -> &str {
        match self {
            Corpus::Parallel(c) => &c.name,
            Corpus::Distinct(c) => &c.name,
        }
    }

    pub fn text_count(&self) -> usize {
        match self {
            Corpus::Parallel(c) => c.text_count(),
            Corpus::Distinct(c) => c.records.len(),
        }
    }

    pub fn records(&self) -> Box<dyn Iterator<Item = &Arc<TextRecord>> + '_> {
        match self {
            Corpus::Parallel(c) => Box::new(c.slugs.iter().flat_map(|s| s.members.iter())),
            Corpus::Distinct(c) => Box::new(c.records.iter()),
        }
    }

    /// All ordered pairs, using the permutation appropriate to the corpus kind.
    pub fn permute(&self) -> Vec<PairInstance> {
        match self {
            Corpus::Parallel(c) => permute_parallel(c),
            Corpus::Distinct(c) => permute_distinct(c),
        }
    }

    /// SHA-256 over every normalized record, in corpus order.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for record in self.records() {
            for field in [
                record.id.as_str(),
                record.slug_id.as_deref().unwrap_or(""),
                record.level.label.as_str(),
                &record.level.rank.to_string(),
                record.body.as_str(),
            ] {
                hasher.update(field.as_bytes());
                hasher.update([0x1f]);
            }
            hasher.update([0x1e]);
        }
        hex::encode(hasher.finalize())
    }
}

/// Which of the two texts is the harder one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gold {
    Text1Harder,
    Text2Harder,
}

impl Gold {
    pub fn flipped(self) -> Self {
        match self {
            Gold::Text1Harder => Gold::Text2Harder,
            Gold::Text2Harder => Gold::Text1Harder,
        }
    }
}

/// A predicted answer. `Invalid` covers unparseable model output and
/// baseline ties; it is never correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Text1Harder,
    Text2Harder,
    Invalid,
}

impl Prediction {
    pub fn is_correct(self, gold: Gold) -> bool {
        matches!(
            (self, gold),
            (Prediction::Text1Harder, Gold::Text1Harder)
                | (Prediction::Text2Harder, Gold::Text2Harder)
        )
    }

    pub fn flipped(self) -> Self {
        match self {
            Prediction::Text1Harder => Prediction::Text2Harder,
            Prediction::Text2Harder => Prediction::Text1Harder,
            Prediction::Invalid => Prediction::Invalid,
        }
    }
}

impl From<Gold> for Prediction {
    fn from(gold: Gold) -> Self {
        match gold {
            Gold::Text1Harder => Prediction::Text1Harder,
            Gold::Text2Harder => Prediction::Text2Harder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Origin {
    Parallel(String),
    Distinct,
}

impl Origin {
    pub fn slug_id(&self) -> Option<&str> {
        match self {
            Origin::Parallel(slug) => Some(slug),
            Origin::Distinct => None,
        }
    }
}

/// An ordered pair of texts at different levels with its gold answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairInstance {
    pub instance_id: String,
    pub text1: Arc<TextRecord>,
    pub text2: Arc<TextRecord>,
    pub gold: Gold,
    pub level_distance: u32,
    pub origin: Origin,
}

impl PairInstance {
    /// Builds the pair, or `None` when both texts share a rank.
    pub fn new(text1: Arc<TextRecord>, text2: Arc<TextRecord>, origin: Origin) -> Option<Self> {
        let (r1, r2) = (text1.level.rank, text2.level.rank);
        if r1 == r2 {
            return None;
        }
        let gold = if r1 > r2 {
            Gold::Text1Harder
        } else {
            Gold::Text2Harder
        };
        Some(PairInstance {
            instance_id: instance_id(&text1.corpus_name, &text1.id, &text2.id),
            level_distance: r1.abs_diff(r2),
            text1,
            text2,
            gold,
            origin,
        })
    }

    pub fn corpus_name(&self) -> &str {
        &self.text1.corpus_name
    }

    /// The same pair with the texts in the other order.
    pub fn swapped(&self) -> Self {
        PairInstance::new(self.text2.clone(), self.text1.clone(), self.origin.clone())
            .expect("ranks already differ")
    }
}

/// Stable identifier of an ordered pair: the first 16 hex digits of
/// SHA-256 over `corpus \x1f text1 \x1f text2`.
pub fn instance_id(corpus: &str, text1: &str, text2: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(corpus.as_bytes());
    hasher.update([0x1f]);
    hasher.update(text1.as_bytes());
    hasher.update([0x1f]);
    hasher.update(text2.as_bytes());
    let digest = hasher.finalize();
    hex::encode(&digest[..8])
}

/// Strips a byte-order mark and collapses every whitespace run (line breaks
/// included) to one space.
pub fn normalize_whitespace(raw: &str) -> String {
    let raw = raw.strip_prefix('\u{feff}').unwrap_or(raw);
    let mut out = String::with_capacity(raw.len());
    for token in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

impl fmt::Display for Gold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gold::Text1Harder => "text1_harder",
            Gold::Text2Harder => "text2_harder",
        })
    }
}
