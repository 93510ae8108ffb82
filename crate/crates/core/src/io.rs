//! Line-delimited JSON files: gold pairs, rendered instances, predictions.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::{instance_id, Gold, Origin, PairInstance, ReadingLevel, TextRecord};
use crate::error::{Error, Result};

/// Serializes one object per line, LF-terminated.
pub fn to_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(to_jsonl(items).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            serde_json::from_str(line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldText {
    pub id: String,
    pub label: String,
    pub rank: i32,
    pub body: String,
}

/// One line of a gold file: a pair with everything needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLine {
    pub instance_id: String,
    pub corpus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slug_id: Option<String>,
    pub text1: GoldText,
    pub text2: GoldText,
    pub gold: Gold,
    pub level_distance: u32,
}

impl From<&PairInstance> for GoldLine {
    fn from(p: &PairInstance) -> Self {
        let text = |t: &TextRecord| GoldText {
            id: t.id.clone(),
            label: t.level.label.clone(),
            rank: t.level.rank,
            body: t.body.clone(),
        };
        GoldLine {
            instance_id: p.instance_id.clone(),
            corpus: p.corpus_name().to_string(),
            slug_id: p.origin.slug_id().map(str::to_string),
            text1: text(&p.text1),
            text2: text(&p.text2),
            gold: p.gold,
            level_distance: p.level_distance,
        }
    }
}

pub fn write_gold(path: &Path, instances: &[PairInstance]) -> Result<()> {
    write_jsonl(path, instances.iter().map(GoldLine::from))
}

/// Reads a gold file back into pairs, sharing text records by id and
/// checking that every line is internally consistent.
pub fn read_gold(path: &Path) -> Result<Vec<PairInstance>> {
    let lines: Vec<GoldLine> = read_jsonl(path)?;
    let mut texts: HashMap<(String, String), Arc<TextRecord>> = HashMap::new();
    let mut out = Vec::with_capacity(lines.len());
    for (n, line) in lines.into_iter().enumerate() {
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        };
        let mut intern = |t: GoldText| {
            texts
                .entry((line.corpus.clone(), t.id.clone()))
                .or_insert_with(|| {
                    Arc::new(TextRecord {
                        id: t.id,
                        body: t.body,
                        level: ReadingLevel {
                            rank: t.rank,
                            label: t.label,
                        },
                        slug_id: line.slug_id.clone(),
                        corpus_name: line.corpus.clone(),
                    })
                })
                .clone()
        };
        let text1 = intern(line.text1.clone());
        let text2 = intern(line.text2.clone());
        let origin = match &line.slug_id {
            Some(s) => Origin::Parallel(s.clone()),
            None => Origin::Distinct,
        };
        let pair = PairInstance::new(text1, text2, origin)
            .ok_or_else(|| bad("texts share a rank".into()))?;
        if pair.gold != line.gold || pair.level_distance != line.level_distance {
            return Err(bad("gold or level_distance disagrees with ranks".into()));
        }
        if line.instance_id != instance_id(&line.corpus, &line.text1.id, &line.text2.id) {
            return Err(bad(format!(
                "instance_id {:?} does not match its texts",
                line.instance_id
            )));
        }
        out.push(pair);
    }
    Ok(out)
}
