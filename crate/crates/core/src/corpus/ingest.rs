//! Corpus adapters.
//!
//! * `generic_rows`: one JSON object per line with `id`, `body`, `level` and
//!   optional `slug_id`.
//! * `osen_dirs`: three sibling directories whose names contain `Ele`, `Int`
//!   and `Adv`; files whose stems agree once the level suffix (`-ele`,
//!   `-int`, `-adv`) is removed form a slug.
//! * `newsela_meta`: a Newsela release directory with `articles_metadata.csv`
//!   and an `articles/` folder.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde_json::Value;

use super::{
    normalize_whitespace, Corpus, DistinctCorpus, LevelMap, ParallelCorpus, Slug, TextRecord,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Parallel,
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adapter {
    OsenDirs,
    NewselaMeta,
    GenericRows,
}

impl FromStr for CorpusKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "parallel" => Ok(CorpusKind::Parallel),
            "distinct" => Ok(CorpusKind::Distinct),
            _ => Err(format!("unknown corpus kind {s:?} (parallel|distinct)")),
        }
    }
}

impl FromStr for Adapter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "osen_dirs" => Ok(Adapter::OsenDirs),
            "newsela_meta" => Ok(Adapter::NewselaMeta),
            "generic_rows" => Ok(Adapter::GenericRows),
            _ => Err(format!(
                "unknown adapter {s:?} (osen_dirs|newsela_meta|generic_rows)"
            )),
        }
    }
}

impl Adapter {
    pub fn as_str(self) -> &'static str {
        match self {
            Adapter::OsenDirs => "osen_dirs",
            Adapter::NewselaMeta => "newsela_meta",
            Adapter::GenericRows => "generic_rows",
        }
    }
}

impl CorpusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusKind::Parallel => "parallel",
            CorpusKind::Distinct => "distinct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub corpus: Corpus,
    /// Records dropped because their body was empty after normalization.
    pub skipped_empty: usize,
}

/// A record before level resolution.
struct RawRecord {
    id: String,
    body: String,
    label: String,
    slug_id: Option<String>,
}

/// Loads a corpus from disk. `levels` overrides the adapter's default
/// label → rank table.
pub fn ingest(
    source: &Path,
    kind: CorpusKind,
    adapter: Adapter,
    name: &str,
    levels: Option<&LevelMap>,
) -> Result<IngestOutput> {
    let raw = match adapter {
        Adapter::GenericRows => read_generic_rows(source)?,
        Adapter::OsenDirs => read_osen_dirs(source)?,
        Adapter::NewselaMeta => read_newsela(source)?,
    };

    let default_map = match (levels, adapter) {
        (Some(_), _) => None,
        (None, Adapter::OsenDirs) => Some(LevelMap::osen()),
        (None, _) => LevelMap::infer(raw.iter().map(|r| r.label.as_str())),
    };
    let map = levels.or(default_map.as_ref());

    let mut skipped_empty = 0;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(raw.len());
    for r in raw {
        let body = normalize_whitespace(&r.body);
        if body.is_empty() {
            log::warn!("{name}: skipping record {:?} with empty body", r.id);
            skipped_empty += 1;
            continue;
        }
        if !seen.insert(r.id.clone()) {
            return Err(Error::DuplicateId(r.id));
        }
        let level = map
            .and_then(|m| m.resolve(&r.label))
            .ok_or_else(|| Error::UnknownLevel {
                record: r.id.clone(),
                label: r.label.clone(),
            })?;
        let slug_id = match kind {
            CorpusKind::Parallel => Some(
                r.slug_id
                    .ok_or_else(|| Error::MissingSlugId(r.id.clone()))?,
            ),
            CorpusKind::Distinct => None,
        };
        records.push(TextRecord {
            id: r.id,
            body,
            level,
            slug_id,
            corpus_name: name.to_string(),
        });
    }
    if skipped_empty > 0 {
        log::warn!("{name}: {skipped_empty} record(s) skipped for empty bodies");
    }

    let corpus = match kind {
        CorpusKind::Distinct => Corpus::Distinct(DistinctCorpus {
            name: name.to_string(),
            records: records.into_iter().map(Arc::new).collect(),
        }),
        CorpusKind::Parallel => Corpus::Parallel(group_slugs(name, records)),
    };
    Ok(IngestOutput {
        corpus,
        skipped_empty,
    })
}

/// Groups records by slug id; slugs keep first-appearance order and members
/// keep input order.
fn group_slugs(name: &str, records: Vec<TextRecord>) -> ParallelCorpus {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut slugs: Vec<Slug> = Vec::new();
    for record in records {
        let slug_id = record
            .slug_id
            .clone()
            .expect("parallel records carry a slug");
        let i = *index.entry(slug_id.clone()).or_insert_with(|| {
            slugs.push(Slug {
                slug_id,
                members: Vec::new(),
            });
            slugs.len() - 1
        });
        slugs[i].members.push(Arc::new(record));
    }
    ParallelCorpus {
        name: name.to_string(),
        slugs,
    }
}

fn scalar_to_string(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn read_generic_rows(path: &Path) -> Result<Vec<RawRecord>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        };
        let value: Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err("expected a JSON object".into()))?;
        let field = |key: &str| -> Result<String> {
            obj.get(key)
                .and_then(scalar_to_string)
                .ok_or_else(|| parse_err(format!("missing or non-scalar `{key}`")))
        };
        let slug_id = match obj.get("slug_id") {
            None | Some(Value::Null) => None,
            Some(v) => {
                Some(scalar_to_string(v).ok_or_else(|| parse_err("non-scalar `slug_id`".into()))?)
            }
        };
        out.push(RawRecord {
            id: field("id")?,
            body: field("body")?,
            label: field("level")?,
            slug_id,
        });
    }
    Ok(out)
}

const OSEN_LEVELS: [(&str, &str, &str); 3] = [
    ("Ele", "ELE", "elementary"),
    ("Int", "INT", "intermediate"),
    ("Adv", "ADV", "advanced"),
];

/// Finds the three level directories directly under `root`, or one level
/// below it (so the repository root works as well as the text folder).
fn find_osen_dirs(root: &Path) -> Result<[PathBuf; 3]> {
    let layout_err = |message: String| Error::Layout {
        path: root.to_path_buf(),
        message,
    };
    let subdirs = |dir: &Path| -> Result<Vec<PathBuf>> {
        let mut dirs: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        Ok(dirs)
    };
    let pick = |dirs: &[PathBuf]| -> Result<Option<[PathBuf; 3]>> {
        let mut found: [Option<PathBuf>; 3] = [None, None, None];
        for dir in dirs {
            let name = dir.file_name().and_then(|n| n.to_str()).unwrap_or("");
            for (i, (marker, _, _)) in OSEN_LEVELS.iter().enumerate() {
                if name.contains(marker) {
                    if found[i].is_some() {
                        return Err(layout_err(format!(
                            "more than one directory name contains {marker:?}"
                        )));
                    }
                    found[i] = Some(dir.clone());
                }
            }
        }
        Ok(match found {
            [Some(a), Some(b), Some(c)] => Some([a, b, c]),
            _ => None,
        })
    };

    let top = subdirs(root)?;
    if let Some(found) = pick(&top)? {
        return Ok(found);
    }
    for dir in &top {
        if let Some(found) = pick(&subdirs(dir)?)? {
            return Ok(found);
        }
    }
    Err(layout_err(
        "expected sibling directories containing `Ele`, `Int` and `Adv`".into(),
    ))
}

/// `Amazon-ele` → `Amazon`.
fn osen_stem(stem: &str) -> &str {
    let lower = stem.to_ascii_lowercase();
    for (_, short, long) in OSEN_LEVELS {
        for suffix in [short.to_ascii_lowercase().as_str(), long] {
            if lower.ends_with(suffix) {
                let head = &stem[..stem.len() - suffix.len()];
                if let Some(head) = head.strip_suffix(['-', '_', ' ', '.']) {
                    if !head.trim().is_empty() {
                        return head.trim_end();
                    }
                }
            }
        }
    }
    stem
}

/// Drops a leading line that only names the level ("Intermediate").
fn strip_level_header<'a>(body: &'a str, long_name: &str) -> &'a str {
    let trimmed = body.trim_start_matches('\u{feff}').trim_start();
    let (first, rest) = trimmed.split_once('\n').unwrap_or((trimmed, ""));
    if first.trim().eq_ignore_ascii_case(long_name) {
        rest
    } else {
        body
    }
}

fn read_osen_dirs(root: &Path) -> Result<Vec<RawRecord>> {
    let dirs = find_osen_dirs(root)?;
    let mut by_stem: HashMap<String, Vec<RawRecord>> = HashMap::new();
    for (dir, (_, label, long)) in dirs.iter().zip(OSEN_LEVELS) {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| !n.starts_with('.'))
            })
            .collect();
        files.sort();
        for file in files {
            let stem = file
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Layout {
                    path: file.clone(),
                    message: "file name is not valid UTF-8".into(),
                })?;
            let slug = osen_stem(stem).to_string();
            let body = read_text(&file)?;
            by_stem.entry(slug.clone()).or_default().push(RawRecord {
                id: format!("{label}/{stem}"),
                body: strip_level_header(&body, long).to_string(),
                label: label.to_string(),
                slug_id: Some(slug),
            });
        }
    }
    let mut stems: Vec<String> = by_stem.keys().cloned().collect();
    stems.sort();
    Ok(stems
        .into_iter()
        .flat_map(|s| by_stem.remove(&s).unwrap())
        .collect())
}

fn read_newsela(source: &Path) -> Result<Vec<RawRecord>> {
    let (meta, root) = if source.is_dir() {
        (source.join("articles_metadata.csv"), source.to_path_buf())
    } else {
        let root = source.parent().unwrap_or(Path::new(".")).to_path_buf();
        (source.to_path_buf(), root)
    };
    let articles = root.join("articles");
    let mut reader = csv::Reader::from_path(&meta).map_err(|e| csv_err(&meta, e))?;
    let headers = reader.headers().map_err(|e| csv_err(&meta, e))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let missing = |name: &str| Error::Layout {
        path: meta.clone(),
        message: format!("metadata has no `{name}` column"),
    };
    let slug_col = column("slug").ok_or_else(|| missing("slug"))?;
    let grade_col = column("grade_level").ok_or_else(|| missing("grade_level"))?;
    let file_col = column("filename").ok_or_else(|| missing("filename"))?;
    let lang_col = column("language");

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(&meta, e))?;
        if let Some(c) = lang_col {
            if row.get(c).map(str::trim) != Some("en") {
                continue;
            }
        }
        let get = |c: usize| row.get(c).unwrap_or("").trim().to_string();
        let filename = get(file_col);
        let body = read_text(&articles.join(&filename))?;
        out.push(RawRecord {
            id: filename,
            body,
            label: get(grade_col),
            slug_id: Some(get(slug_col)),
        });
    }
    Ok(out)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

/// Reads UTF-8, falling back to Windows-1252 for legacy files.
fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("{}: not UTF-8, decoding as Windows-1252", path.display());
            e.into_bytes().iter().map(|&b| cp1252(b)).collect()
        }
    })
}

fn cp1252(b: u8) -> char {
    const HIGH: [char; 32] = [
        '€', '\u{81}', '‚', 'ƒ', '„', '…', '†', '‡', 'ˆ', '‰', 'Š', '‹', 'Œ', '\u{8d}', 'Ž',
        '\u{8f}', '\u{90}', '‘', '’', '“', '”', '•', '–', '—', '˜', '™', 'š', '›', 'œ', '\u{9d}',
        'ž', 'Ÿ',
    ];
    match b {
        0x80..=0x9f => HIGH[(b - 0x80) as usize],
        _ => b as char,
    }
}
