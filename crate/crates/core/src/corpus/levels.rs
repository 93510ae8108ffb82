use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::ReadingLevel;
use crate::error::{Error, Result};

/// Bijective label → rank table for one corpus. Lookups ignore ASCII case
/// and surrounding whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    entries: Vec<(String, i32)>,
    by_key: HashMap<String, usize>,
}

fn key(label: &str) -> String {
    label.trim().to_ascii_uppercase()
}

impl LevelMap {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, i32)>) -> Result<Self> {
        let entries: Vec<(String, i32)> = entries.into_iter().map(|(l, r)| (l.into(), r)).collect();
        let mut by_key = HashMap::new();
        let mut ranks = HashMap::new();
        for (i, (label, rank)) in entries.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(Error::LevelMap("empty label".into()));
            }
            if by_key.insert(key(label), i).is_some() {
                return Err(Error::LevelMap(format!("label {label:?} listed twice")));
            }
            if let Some(other) = ranks.insert(*rank, label) {
                return Err(Error::LevelMap(format!(
                    "labels {other:?} and {label:?} share rank {rank}"
                )));
            }
        }
        Ok(LevelMap { entries, by_key })
    }

    /// CEFR: A2 < B1 < B2 < C1 < C2.
    pub fn cefr() -> Self {
        Self::new([("A2", 0), ("B1", 1), ("B2", 2), ("C1", 3), ("C2", 4)]).unwrap()
    }

    /// OneStopEnglish: elementary < intermediate < advanced.
    pub fn osen() -> Self {
        Self::new([("ELE", 0), ("INT", 1), ("ADV", 2)]).unwrap()
    }

    /// Reads a `label<TAB>rank` file. Blank lines and `#` comments are skipped.
    pub fn from_tsv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message,
            };
            let (label, rank) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected label<TAB>rank".into()))?;
            let rank = rank
                .trim()
                .parse::<i32>()
                .map_err(|e| parse_err(format!("rank {rank:?}: {e}")))?;
            entries.push((label.trim().to_string(), rank));
        }
        Self::new(entries)
    }

    pub fn resolve(&self, label: &str) -> Option<ReadingLevel> {
        self.by_key.get(&key(label)).map(|&i| ReadingLevel {
            rank: self.entries[i].1,
            label: label.trim().to_string(),
        })
    }

    pub fn entries(&self) -> &[(String, i32)] {
        &self.entries
    }

    /// Picks a table for a set of raw labels when none was supplied: CEFR if
    /// every label is a CEFR level, otherwise integer labels as their own rank.
    pub fn infer<'a>(labels: impl IntoIterator<Item = &'a str>) -> Option<Self> {
        let labels: Vec<&str> = labels.into_iter().collect();
        let cefr = Self::cefr();
        if !labels.is_empty() && labels.iter().all(|l| cefr.resolve(l).is_some()) {
            return Some(cefr);
        }
        let mut seen: Vec<(String, i32)> = Vec::new();
        for label in labels {
            let rank = integer_grade(label)?;
            match seen.iter().find(|(_, r)| *r == rank) {
                // Two spellings of one grade ("3" and "3.0") break the bijection.
                Some((l, _)) if l != label.trim() => return None,
                Some(_) => {}
                None => seen.push((label.trim().to_string(), rank)),
            }
        }
        Self::new(seen).ok()
    }
}

/// Parses `"7"` or `"7.0"` as grade 7.
pub(crate) fn integer_grade(label: &str) -> Option<i32> {
    let label = label.trim();
    if let Ok(v) = label.parse::<i32>() {
        return Some(v);
    }
    let v = label.parse::<f64>().ok()?;
    (v.fract() == 0.0 && v.abs() < i32::MAX as f64).then_some(v as i32)
}
