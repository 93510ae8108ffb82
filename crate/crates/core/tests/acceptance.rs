//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! Corpus-backed criteria read their data from environment variables (or the
//! default locations under `data/` in the workspace root):
//!
//! | variable               | default              | adapter        |
//! |------------------------|----------------------|----------------|
//! | `READPAIR_OSEN_DIR`    | `data/OneStopEnglishCorpus` | `osen_dirs` |
//! | `READPAIR_CAMB_ROWS`   | `data/camb.jsonl`    | `generic_rows` |
//! | `READPAIR_NEWS_DIR`    | `data/newsela`       | `newsela_meta` |
//! | `READPAIR_CCSB_ROWS`   | `data/ccsb.jsonl`    | `generic_rows` |
//!
//! `READPAIR_CAMB_LEVELS` / `READPAIR_CCSB_LEVELS` optionally name a
//! `label<TAB>rank` table, and `READPAIR_CCSB_KIND` selects `parallel`
//! (default `distinct`). OSEN and CAMB are freely available, so their absence
//! is a failure; NEWS and CCSB are licensed or scraped and are skipped.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::env;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use readpair::cli::{cmd_baseline, BaselineInput, CorpusSource};
use readpair::corpus::{
    permute_distinct, permute_parallel, split, Adapter, Corpus, CorpusKind, DistinctCorpus, Gold,
    Origin, PairInstance, ParallelCorpus, Ratios, ReadingLevel, Slug, SplitMode, TextRecord,
};
use readpair::eval::{score, EvalReport, FormatRegistry, PredictionRecord, Provenance};
use readpair::prompts::{builtin_formats, parse_output, render};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn workspace() -> PathBuf {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    manifest
        .ancestors()
        .nth(2)
        .unwrap_or(manifest)
        .to_path_buf()
}

fn data_path(var: &str, default: &str) -> PathBuf {
    env::var_os(var)
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace().join("data").join(default))
}

fn source(
    var: &str,
    default: &str,
    adapter: Adapter,
    kind: CorpusKind,
    name: &str,
    levels: Option<&str>,
) -> CorpusSource {
    CorpusSource {
        path: data_path(var, default),
        adapter,
        kind,
        name: name.into(),
        levels: levels.and_then(env::var_os).map(PathBuf::from),
    }
}

struct Baseline {
    texts: usize,
    slugs: Option<usize>,
    pairs: usize,
    report: EvalReport,
    permute_time: Duration,
    total_time: Duration,
}

fn run_baseline(src: &CorpusSource) -> Result<Baseline, String> {
    let start = Instant::now();
    let loaded = src.load().map_err(|e| e.to_string())?;
    let pairs = loaded.corpus.permute();
    let permute_time = start.elapsed();
    let slugs = match &loaded.corpus {
        Corpus::Parallel(c) => Some(c.slugs.len()),
        Corpus::Distinct(_) => None,
    };
    let texts = loaded.corpus.text_count();
    let runs =
        cmd_baseline(&BaselineInput::Corpus(src.clone()), None, None).map_err(|e| e.to_string())?;
    let report = runs.into_iter().next().ok_or("no baseline run")?.report;
    Ok(Baseline {
        texts,
        slugs,
        pairs: pairs.len(),
        report,
        permute_time,
        total_time: start.elapsed(),
    })
}

fn absent(src: &CorpusSource) -> bool {
    !src.path.exists()
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol + 1e-12
}

// ---------------------------------------------------------------- corpora

fn osen_count(osen: &Result<Baseline, String>, path: &Path) -> Outcome {
    match osen {
        Err(e) => Fail(format!(
            "data absent or unreadable at {} ({e})",
            path.display()
        )),
        Ok(b) => check(
            b.pairs == 1134
                && b.slugs == Some(189)
                && b.texts == 567
                && b.permute_time < Duration::from_secs(10),
            format!(
                "{} pairs from {:?} slugs / {} texts in {:.2?} (want 1134 from 189 / 567, < 10 s)",
                b.pairs, b.slugs, b.texts, b.permute_time
            ),
        ),
    }
}

fn osen_fk(osen: &Result<Baseline, String>, path: &Path) -> Outcome {
    match osen {
        Err(e) => Fail(format!(
            "data absent or unreadable at {} ({e})",
            path.display()
        )),
        Ok(b) => check(
            within(b.report.accuracy, 0.978, 0.02) && b.total_time < Duration::from_secs(60),
            format!(
                "accuracy {:.4} on {} pairs in {:.2?} (want 0.978 ± 0.02, < 60 s)",
                b.report.accuracy, b.report.total, b.total_time
            ),
        ),
    }
}

fn camb() -> Outcome {
    let src = source(
        "READPAIR_CAMB_ROWS",
        "camb.jsonl",
        Adapter::GenericRows,
        CorpusKind::Distinct,
        "camb",
        Some("READPAIR_CAMB_LEVELS"),
    );
    if absent(&src) {
        return Fail(format!("data absent at {}", src.path.display()));
    }
    match run_baseline(&src) {
        Err(e) => Fail(e),
        Ok(b) => check(
            b.pairs == 87_574 && within(b.report.accuracy, 0.808, 0.03) && b.total_time < Duration::from_secs(300),
            format!(
                "{} pairs from {} texts, accuracy {:.4} in {:.2?} (want 87574, 0.808 ± 0.03, < 5 min)",
                b.pairs, b.texts, b.report.accuracy, b.total_time
            ),
        ),
    }
}

fn conditional(src: CorpusSource, pairs: usize, accuracy: f64, tol: f64) -> Outcome {
    if absent(&src) {
        return Skip(format!("data absent at {}", src.path.display()));
    }
    match run_baseline(&src) {
        Err(e) => Fail(e),
        Ok(b) => check(
            b.pairs == pairs && within(b.report.accuracy, accuracy, tol),
            format!(
                "{} pairs, accuracy {:.4} (want {pairs}, {accuracy} ± {tol})",
                b.pairs, b.report.accuracy
            ),
        ),
    }
}

fn news() -> Outcome {
    let src = source(
        "READPAIR_NEWS_DIR",
        "newsela",
        Adapter::NewselaMeta,
        CorpusKind::Parallel,
        "news",
        None,
    );
    conditional(src, 43_316, 0.986, 0.02)
}

fn ccsb() -> Outcome {
    let kind = env::var("READPAIR_CCSB_KIND")
        .ok()
        .and_then(|k| k.parse().ok())
        .unwrap_or(CorpusKind::Distinct);
    let src = source(
        "READPAIR_CCSB_ROWS",
        "ccsb.jsonl",
        Adapter::GenericRows,
        kind,
        "ccsb",
        Some("READPAIR_CCSB_LEVELS"),
    );
    conditional(src, 3_846, 0.798, 0.03)
}

// ------------------------------------------------------------ properties

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn text(rng: &mut ChaCha8Rng) -> String {
    const WORDS: [&str; 10] = [
        "Cats",
        "sleep",
        "in",
        "the",
        "warm",
        "afternoon",
        "sun.",
        "Nobody",
        "knows",
        "why!",
    ];
    let n = 1 + below(rng, 40);
    (0..n)
        .map(|_| WORDS[below(rng, WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn record(
    rng: &mut ChaCha8Rng,
    corpus: &str,
    id: String,
    rank: i32,
    slug: Option<String>,
) -> Arc<TextRecord> {
    Arc::new(TextRecord {
        id,
        body: text(rng),
        level: ReadingLevel {
            rank,
            label: format!("L{rank}"),
        },
        slug_id: slug,
        corpus_name: corpus.into(),
    })
}

fn random_parallel(rng: &mut ChaCha8Rng) -> ParallelCorpus {
    let slugs = (0..below(rng, 10))
        .map(|s| {
            let slug_id = format!("slug{s}");
            let members = (0..below(rng, 6))
                .map(|m| {
                    let rank = below(rng, 5) as i32;
                    record(
                        rng,
                        "par",
                        format!("{slug_id}/{m}"),
                        rank,
                        Some(slug_id.clone()),
                    )
                })
                .collect();
            Slug { slug_id, members }
        })
        .collect();
    ParallelCorpus {
        name: "par".into(),
        slugs,
    }
}

fn random_distinct(rng: &mut ChaCha8Rng, n: usize) -> DistinctCorpus {
    let levels = 1 + below(rng, 5);
    DistinctCorpus {
        name: "dis".into(),
        records: (0..n)
            .map(|i| {
                let rank = below(rng, levels) as i32;
                record(rng, "dis", format!("r{i}"), rank, None)
            })
            .collect(),
    }
}

fn antisymmetric(pairs: &[PairInstance]) -> Result<(), String> {
    let index: HashMap<(&str, &str), Gold> = pairs
        .iter()
        .map(|p| ((p.text1.id.as_str(), p.text2.id.as_str()), p.gold))
        .collect();
    if index.len() != pairs.len() {
        return Err("duplicate ordered pair".into());
    }
    for p in pairs {
        if (p.gold == Gold::Text1Harder) != (p.text1.level.rank > p.text2.level.rank) {
            return Err(format!("gold disagrees with ranks for {}", p.instance_id));
        }
        match index.get(&(p.text2.id.as_str(), p.text1.id.as_str())) {
            Some(g) if *g == p.gold.flipped() => {}
            _ => return Err(format!("no flipped partner for {}", p.instance_id)),
        }
    }
    Ok(())
}

fn prop_a(rng: &mut ChaCha8Rng) -> Outcome {
    let mut pairs_seen = 0;
    for i in 0..100 {
        let pairs = if i % 2 == 0 {
            permute_parallel(&random_parallel(rng))
        } else {
            let n = below(rng, 31);
            permute_distinct(&random_distinct(rng, n))
        };
        pairs_seen += pairs.len();
        if let Err(e) = antisymmetric(&pairs) {
            return Fail(format!("corpus {i}: {e}"));
        }
    }
    Pass(format!("100 corpora, {pairs_seen} pairs"))
}

fn prop_b(rng: &mut ChaCha8Rng) -> Outcome {
    for n in 0..=30 {
        for _ in 0..10 {
            let corpus = random_distinct(rng, n);
            let mut brute = 0;
            for a in &corpus.records {
                for b in &corpus.records {
                    if a.id != b.id && a.level.rank != b.level.rank {
                        brute += 1;
                    }
                }
            }
            let mut per_rank: BTreeMap<i32, usize> = BTreeMap::new();
            for r in &corpus.records {
                *per_rank.entry(r.level.rank).or_default() += 1;
            }
            let law =
                n * n.saturating_sub(1) - per_rank.values().map(|k| k * (k - 1)).sum::<usize>();
            let got = permute_distinct(&corpus).len();
            if got != law || law != brute {
                return Fail(format!(
                    "N={n}: permute {got}, law {law}, brute force {brute}"
                ));
            }
        }
    }
    Pass("N = 0..=30, 10 corpora each".into())
}

fn prop_c(rng: &mut ChaCha8Rng) -> Outcome {
    let mut pairs = Vec::new();
    while pairs.len() < 500 {
        let r1 = below(rng, 5) as i32;
        let r2 = below(rng, 5) as i32;
        let a = record(rng, "rt", format!("a{}", pairs.len()), r1, None);
        let b = record(rng, "rt", format!("b{}", pairs.len()), r2, None);
        if let Some(p) = PairInstance::new(a, b, Origin::Distinct) {
            pairs.push(p);
        }
    }
    let formats = builtin_formats();
    for spec in &formats {
        for p in &pairs {
            let budget = 1 + below(rng, 50);
            let r = render(p, spec, budget);
            if parse_output(&r.target, spec) != p.gold.into() {
                return Fail(format!(
                    "{} lost gold for {}",
                    spec.kind.as_str(),
                    p.instance_id
                ));
            }
        }
    }
    Pass(format!("{} formats × {} pairs", formats.len(), pairs.len()))
}

fn prop_d(rng: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for i in 0..50 {
        let pairs = if i % 2 == 0 {
            permute_parallel(&random_parallel(rng))
        } else {
            let n = below(rng, 25);
            permute_distinct(&random_distinct(rng, n))
        };
        let seed = rng.next_u64();
        for mode in [SplitMode::InstanceLevel, SplitMode::SlugLevel] {
            let ratios = Ratios::default();
            let out = split(&pairs, ratios, seed, mode);
            if out != split(&pairs, ratios, seed, mode) {
                return Fail(format!("corpus {i}: split not deterministic"));
            }
            let mut ids: Vec<&str> = out
                .buckets()
                .iter()
                .flat_map(|(_, b)| b.iter().map(|p| p.instance_id.as_str()))
                .collect();
            let mut input: Vec<&str> = pairs.iter().map(|p| p.instance_id.as_str()).collect();
            ids.sort_unstable();
            input.sort_unstable();
            if ids != input {
                return Fail(format!(
                    "corpus {i}: buckets are not a partition of the input"
                ));
            }
            match mode {
                SplitMode::InstanceLevel => {
                    let want = ratios.sizes(pairs.len());
                    let got = [out.train.len(), out.dev.len(), out.test.len()];
                    if got != want {
                        return Fail(format!("corpus {i}: sizes {got:?}, want {want:?}"));
                    }
                }
                SplitMode::SlugLevel => {
                    let mut home: HashMap<&str, usize> = HashMap::new();
                    for (b, (_, insts)) in out.buckets().iter().enumerate() {
                        for p in insts.iter() {
                            if let Some(slug) = p.origin.slug_id() {
                                if *home.entry(slug).or_insert(b) != b {
                                    return Fail(format!(
                                        "corpus {i}: slug {slug} straddles buckets"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            checked += 1;
        }
    }
    Pass(format!("{checked} splits"))
}

fn predictions(rng: &mut ChaCha8Rng, gold: &[PairInstance], format: &str) -> Vec<PredictionRecord> {
    let spec: readpair::prompts::FormatKind = format.parse().unwrap();
    let spec = spec.spec();
    gold.iter()
        .map(|g| {
            let raw = match below(rng, 3) {
                0 => spec.target(g.gold).to_string(),
                1 => spec.target(g.gold.flipped()).to_string(),
                _ => "I am not sure".to_string(),
            };
            PredictionRecord {
                instance_id: g.instance_id.clone(),
                raw_output: raw,
                format: format.into(),
                epoch: Some(3),
            }
        })
        .collect()
}

fn prop_e(rng: &mut ChaCha8Rng) -> Outcome {
    let reg = FormatRegistry::builtin();
    let who = Provenance::new("m", Some("dis".into()));
    for i in 0..50 {
        let n = 2 + below(rng, 20);
        let gold = permute_distinct(&random_distinct(rng, n));
        if gold.is_empty() {
            continue;
        }
        let preds = predictions(rng, &gold, "alternate-s");
        let cut = below(rng, gold.len() + 1);
        let (Ok(whole), Ok(left), Ok(right)) = (
            score(&preds, &gold, &reg, &who),
            score(&preds[..cut], &gold[..cut], &reg, &who),
            score(&preds[cut..], &gold[cut..], &reg, &who),
        ) else {
            return Fail(format!("corpus {i}: scoring failed"));
        };
        let merged = match left.merge(&right) {
            Ok(m) => m,
            Err(e) => return Fail(format!("corpus {i}: {e}")),
        };
        if (merged.total, merged.correct, merged.invalid)
            != (whole.total, whole.correct, whole.invalid)
            || merged.by_distance != whole.by_distance
            || (merged.accuracy - whole.accuracy).abs() > 1e-12
        {
            return Fail(format!("corpus {i}: merged {merged:?} != whole {whole:?}"));
        }
    }
    Pass("50 random prediction sets split and merged".into())
}

fn prop_f(rng: &mut ChaCha8Rng) -> Outcome {
    let reg = FormatRegistry::builtin();
    let who = Provenance::new("oracle", None);
    let gold = permute_parallel(&random_parallel(rng));
    let mut formats_checked = HashSet::new();
    for spec in builtin_formats() {
        let preds: Vec<PredictionRecord> = gold
            .iter()
            .map(|g| PredictionRecord {
                instance_id: g.instance_id.clone(),
                raw_output: render(g, &spec, 230).target,
                format: spec.kind.as_str().into(),
                epoch: None,
            })
            .collect();
        match score(&preds, &gold, &reg, &who) {
            Ok(r) if gold.is_empty() || r.accuracy == 1.0 => {
                formats_checked.insert(spec.kind);
            }
            Ok(r) => return Fail(format!("{}: accuracy {}", spec.kind.as_str(), r.accuracy)),
            Err(e) => return Fail(e.to_string()),
        }
    }
    check(
        formats_checked.len() == 9 && !gold.is_empty(),
        format!(
            "{} pairs scored 1.0 under {} formats",
            gold.len(),
            formats_checked.len()
        ),
    )
}

// --------------------------------------------------------------- formats

const TABLE: &str = concat!(
    "Question\t\"Which Text is more difficult? Text 1: ... Text 2: ...\"\t\"Text 1\" or \"Text 2\"\n",
    "Statement\t\"Text 1 is more difficult than Text 2. Text 1: ... Text 2: ...\"\t\"True\" or \"False\"\n",
    "Follow-up\t\"Text 1: ... Text2: ... More difficult:\"\t\"Text 1\" or \"Text 2\"\n",
    "Reverse-Question\t\"Which Text is easier? Text 1: ... Text 2: ...\"\t\"Text 2\" or \"Text 1\"\n",
    "Reverse-Statement\t\"Text 1 is easier than Text 2. Text 1: ... Text 2: ...\"\t\"False\" or \"True\"\n",
    "Reverse-Follow-up\t\"Text 1: ... Text2: ... Easier:\"\t\"Text 2\" or \"Text 1\"\n",
    "Alternate-Question\t\"Which Text is harder? Text 1: ... Text 2: ...\"\t\"Text 1\" or \"Text 2\"\n",
    "Alternate-Statement\t\"Text 1 is harder than Text 2. Text 1: ... Text 2: ...\"\t\"True\" or \"False\"\n",
    "Alternate-Follow-up\t\"Text 1: ... Text2: ... Harder:\"\t\"Text 1\" or \"Text 2\"\n",
);

fn formats_table() -> Outcome {
    let out = match Command::new(env!("CARGO_BIN_EXE_readpair"))
        .arg("formats")
        .output()
    {
        Ok(o) => o,
        Err(e) => return Fail(e.to_string()),
    };
    let printed = String::from_utf8_lossy(&out.stdout);
    if out.status.success() && printed == TABLE {
        return Pass("9 rows identical".into());
    }
    let first_diff = printed
        .lines()
        .zip(TABLE.lines())
        .find(|(a, b)| a != b)
        .map(|(a, b)| format!("got {a:?}, want {b:?}"))
        .unwrap_or_else(|| format!("{} rows printed", printed.lines().count()));
    Fail(first_diff)
}

fn main() -> ExitCode {
    // libtest-style arguments (e.g. filters from `cargo test <name>`) are ignored.
    let mut rng = ChaCha8Rng::seed_from_u64(20_221_028);
    let osen_src = source(
        "READPAIR_OSEN_DIR",
        "OneStopEnglishCorpus",
        Adapter::OsenDirs,
        CorpusKind::Parallel,
        "osen",
        None,
    );
    let osen = if absent(&osen_src) {
        Err("no such path".to_string())
    } else {
        run_baseline(&osen_src)
    };

    let results: Vec<(&str, Outcome)> = vec![
        (
            "osen pair count 1,134 from 189 slugs / 567 texts",
            osen_count(&osen, &osen_src.path),
        ),
        (
            "flesch-kincaid on osen 0.978 ± 0.02",
            osen_fk(&osen, &osen_src.path),
        ),
        ("camb 87,574 pairs, flesch-kincaid 0.808 ± 0.03", camb()),
        ("news 43,316 pairs, flesch-kincaid 0.986 ± 0.02", news()),
        ("ccsb 3,846 pairs, flesch-kincaid 0.798 ± 0.03", ccsb()),
        ("property (a) permutation antisymmetry", prop_a(&mut rng)),
        (
            "property (b) distinct-count law vs brute force",
            prop_b(&mut rng),
        ),
        ("property (c) render→parse round trip", prop_c(&mut rng)),
        (
            "property (d) split determinism and partition",
            prop_d(&mut rng),
        ),
        ("property (e) eval additivity under merge", prop_e(&mut rng)),
        (
            "property (f) gold-as-predictions scores 1.0",
            prop_f(&mut rng),
        ),
        ("formats table", formats_table()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        let (status, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("{status}  {name}: {detail}");
    }
    println!("acceptance: {} criteria, {failed} failed", results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
