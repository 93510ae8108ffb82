#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SHORT: [&str; 12] = [
    "cat", "sun", "dog", "run", "big", "red", "map", "box", "hat", "cup", "sea", "tree",
];
const LONG: [&str; 12] = [
    "consideration",
    "environmental",
    "organisation",
    "independently",
    "administrative",
    "comprehensive",
    "international",
    "investigation",
    "infrastructure",
    "communication",
    "sustainability",
    "responsibility",
];

/// A passage whose difficulty grows with `level` (0 = elementary): longer
/// sentences and more polysyllabic words.
pub fn passage(slug: usize, level: usize) -> String {
    let sentence_len = 5 + 5 * level;
    let long_every = [0, 4, 2][level.min(2)];
    let mut sentences = Vec::new();
    for s in 0..6 {
        let words: Vec<&str> = (0..sentence_len)
            .map(|w| {
                let k = slug * 7 + s * 3 + w;
                if long_every > 0 && w % long_every == 1 {
                    LONG[k % LONG.len()]
                } else {
                    SHORT[k % SHORT.len()]
                }
            })
            .collect();
        let mut sentence = words.join(" ");
        sentence[..1].make_ascii_uppercase();
        sentences.push(sentence + ".");
    }
    sentences.join(" ")
}

/// Writes a OneStopEnglish-style layout with `slugs` articles at three
/// levels and returns its root.
pub fn osen_layout(root: &Path, slugs: usize) -> PathBuf {
    let base = root.join("OneStopEnglishCorpus/Texts-SeparatedByReadingLevel");
    for (level, (dir, suffix, header)) in [
        ("Ele-Txt", "ele", "Elementary"),
        ("Int-Txt", "int", "Intermediate"),
        ("Adv-Txt", "adv", "Advanced"),
    ]
    .into_iter()
    .enumerate()
    {
        let dir = base.join(dir);
        fs::create_dir_all(&dir).unwrap();
        for slug in 0..slugs {
            let body = format!("{header}\n\n{}\n", passage(slug, level));
            fs::write(dir.join(format!("Article{slug:03}-{suffix}.txt")), body).unwrap();
        }
    }
    root.join("OneStopEnglishCorpus")
}

/// Writes a distinct-text rows file with CEFR labels.
pub fn cefr_rows(path: &Path, per_level: usize) {
    let mut out = String::new();
    for (rank, label) in ["A2", "B1", "B2", "C1", "C2"].iter().enumerate() {
        for i in 0..per_level {
            let row = serde_json::json!({
                "id": format!("{label}-{i}"),
                "level": label,
                "body": passage(i, rank.min(2)),
            });
            out.push_str(&row.to_string());
            out.push('\n');
        }
    }
    fs::write(path, out).unwrap();
}

pub fn readpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readpair"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn lines(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}
