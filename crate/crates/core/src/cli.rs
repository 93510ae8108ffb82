//! Pipeline subcommands: `prepare`, `baseline`, `evaluate`, `formats`.
//!
//! Artifacts are write-once: every subcommand stages its output, refuses to
//! replace an existing file with different bytes, and leaves identical files
//! untouched.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{
    ingest, split, Adapter, Corpus, CorpusKind, LevelMap, PairInstance, Ratios, SplitMode,
};
use crate::error::{Error, Result};
use crate::eval::{
    best_epoch, matrix, score, EvalReport, FormatRegistry, Matrix, PredictionRecord, Provenance,
};
use crate::formulas::{FkglBaseline, BASELINE_FORMAT};
use crate::io::{read_gold, read_jsonl, to_jsonl, GoldLine};
use crate::prompts::{builtin_formats, render, FormatKind, DEFAULT_TOKEN_BUDGET};

pub const DEFAULT_SEED: u64 = 42;

/// Where a corpus comes from and how to read it.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSource {
    pub path: PathBuf,
    pub adapter: Adapter,
    pub kind: CorpusKind,
    pub name: String,
    pub levels: Option<PathBuf>,
}

impl CorpusSource {
    pub fn load(&self) -> Result<LoadedCorpus> {
        let levels = self.levels.as_deref().map(LevelMap::from_tsv).transpose()?;
        let out = ingest(
            &self.path,
            self.kind,
            self.adapter,
            &self.name,
            levels.as_ref(),
        )?;
        Ok(LoadedCorpus {
            corpus: out.corpus,
            skipped_empty: out.skipped_empty,
            levels,
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub skipped_empty: usize,
    pub levels: Option<LevelMap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: CorpusSource,
    pub ratios: Ratios,
    pub seed: u64,
    pub split_mode: SplitMode,
    pub formats: Vec<FormatKind>,
    pub token_budget: usize,
    pub out: PathBuf,
}

impl PipelineConfig {
    pub fn new(source: CorpusSource, out: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source,
            ratios: Ratios::default(),
            seed: DEFAULT_SEED,
            split_mode: SplitMode::default(),
            formats: vec![FormatKind::Question],
            token_budget: DEFAULT_TOKEN_BUDGET,
            out: out.into(),
        }
    }
}

/// Fine-tuning defaults recorded for the external trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerDefaults {
    pub batch_size: u32,
    pub learning_rate: f64,
    /// Epochs per training corpus; `default` applies to unlisted corpora.
    pub epochs: BTreeMap<String, u32>,
    /// Extra epochs when continuing a trained model on a second corpus.
    pub joint_stage2_epochs: u32,
    pub max_sequence_length: u32,
    pub optimizer: String,
    pub lr_schedule: String,
    pub decoding: String,
    pub checkpoint_selection: String,
}

impl Default for TrainerDefaults {
    fn default() -> Self {
        TrainerDefaults {
            batch_size: 8,
            learning_rate: 1e-5,
            epochs: [("default", 30), ("news", 3), ("osen", 30)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            joint_stage2_epochs: 3,
            max_sequence_length: 512,
            optimizer: "adamw".into(),
            lr_schedule: "constant".into(),
            decoding: "greedy".into(),
            checkpoint_selection: "best_dev".into(),
        }
    }
}

/// The hashed part of a prepare run: everything that determines the bytes
/// of its artifacts. Paths are left out; the corpus enters by content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestConfig {
    pub corpus: String,
    pub adapter: String,
    pub kind: String,
    pub corpus_digest: String,
    pub levels: Option<Vec<(String, i32)>>,
    pub ratios: [f64; 3],
    pub seed: u64,
    pub split_mode: String,
    pub formats: Vec<FormatKind>,
    pub token_budget: usize,
}

impl ManifestConfig {
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("plain data serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub config_hash: String,
    pub config: ManifestConfig,
    pub source_path: String,
    pub texts: usize,
    pub slugs: Option<usize>,
    pub skipped_empty: usize,
    pub pairs: usize,
    pub buckets: BTreeMap<String, usize>,
    pub files: Vec<String>,
    pub trainer: TrainerDefaults,
}

#[derive(Debug, Clone)]
pub struct PrepareOutput {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn rendered_file_name(corpus: &str, format: FormatKind, bucket: &str) -> String {
    format!("{corpus}.{}.{bucket}.txtpairs", format.as_str())
}

pub fn gold_file_name(corpus: &str, bucket: &str) -> String {
    format!("{corpus}.{bucket}.gold")
}

/// Collects artifacts in a staging directory and publishes them only once
/// every file has been written and checked against what is already there.
struct Staging {
    out: PathBuf,
    dir: PathBuf,
    names: Vec<String>,
}

impl Staging {
    fn new(out: &Path, tag: &str) -> Result<Self> {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let dir = out.join(format!(".staging-{tag}-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        fs::create_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Staging {
            out: out.to_path_buf(),
            dir,
            names: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn publish(self) -> Result<Vec<PathBuf>> {
        let result = self.try_publish();
        let _ = fs::remove_dir_all(&self.dir);
        result
    }

    fn try_publish(&self) -> Result<Vec<PathBuf>> {
        let mut fresh = Vec::new();
        for name in &self.names {
            let dest = self.out.join(name);
            if dest.exists() {
                let staged = fs::read(self.dir.join(name)).map_err(|e| Error::io(&dest, e))?;
                let existing = fs::read(&dest).map_err(|e| Error::io(&dest, e))?;
                if staged != existing {
                    return Err(Error::Conflict(dest));
                }
            } else {
                fresh.push(name);
            }
        }
        for name in fresh {
            let dest = self.out.join(name);
            fs::rename(self.dir.join(name), &dest).map_err(|e| Error::io(&dest, e))?;
        }
        Ok(self.names.iter().map(|n| self.out.join(n)).collect())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.dir);
    }
}

fn write_lines<T: Serialize>(
    w: &mut dyn Write,
    items: impl IntoIterator<Item = T>,
) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, &item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// ingest → permute → split → render, writing one rendered file per
/// (format, bucket), one gold file per bucket and a manifest.
pub fn cmd_prepare(config: &PipelineConfig) -> Result<PrepareOutput> {
    if config.token_budget == 0 {
        return Err(Error::EmptyInput("token budget must be at least 1".into()));
    }
    if config.formats.is_empty() {
        return Err(Error::EmptyInput("no formats selected".into()));
    }
    let loaded = config.source.load()?;
    let corpus = &loaded.corpus;
    let name = corpus.name().to_string();
    let pairs = corpus.permute();
    log::info!(
        "{name}: {} texts, {} pairs",
        corpus.text_count(),
        pairs.len()
    );
    let buckets = split(&pairs, config.ratios, config.seed, config.split_mode);

    let manifest_config = ManifestConfig {
        corpus: name.clone(),
        adapter: config.source.adapter.as_str().into(),
        kind: config.source.kind.as_str().into(),
        corpus_digest: corpus.digest(),
        levels: loaded.levels.as_ref().map(|m| m.entries().to_vec()),
        ratios: config.ratios.as_array(),
        seed: config.seed,
        split_mode: config.split_mode.as_str().into(),
        formats: config.formats.clone(),
        token_budget: config.token_budget,
    };
    let config_hash = manifest_config.hash();

    let mut staging = Staging::new(&config.out, &config_hash[..12])?;
    let mut files = Vec::new();
    for (bucket, instances) in buckets.buckets() {
        let gold = gold_file_name(&name, bucket);
        staging.write(&gold, |w| {
            write_lines(w, instances.iter().map(GoldLine::from))
        })?;
        files.push(gold);
        for &format in &config.formats {
            let spec = format.spec();
            let file = rendered_file_name(&name, format, bucket);
            staging.write(&file, |w| {
                write_lines(
                    w,
                    instances
                        .iter()
                        .map(|inst| render(inst, &spec, config.token_budget)),
                )
            })?;
            files.push(file);
        }
    }

    let manifest = Manifest {
        tool: format!("readpair {}", env!("CARGO_PKG_VERSION")),
        config_hash,
        config: manifest_config,
        source_path: config.source.path.display().to_string(),
        texts: corpus.text_count(),
        slugs: match corpus {
            Corpus::Parallel(c) => Some(c.slugs.len()),
            Corpus::Distinct(_) => None,
        },
        skipped_empty: loaded.skipped_empty,
        pairs: pairs.len(),
        buckets: buckets
            .buckets()
            .iter()
            .map(|(b, v)| (b.to_string(), v.len()))
            .collect(),
        files: files.clone(),
        trainer: TrainerDefaults::default(),
    };
    let manifest_name = format!("{name}.manifest.json");
    staging.write(&manifest_name, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        w.write_all(b"\n")
    })?;

    let mut written = staging.publish()?;
    log::info!(
        "{name}: {} files in {}",
        written.len(),
        config.out.display()
    );
    let manifest_path = written.pop().expect("manifest written last");
    Ok(PrepareOutput {
        manifest,
        manifest_path,
        files: written,
    })
}

/// Pairs to score with the formula baseline.
#[derive(Debug, Clone)]
pub enum BaselineInput {
    /// Every pair of a corpus.
    Corpus(CorpusSource),
    /// Pairs from gold files written by `prepare`.
    GoldFiles(Vec<PathBuf>),
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    /// Gold file stem or corpus name.
    pub label: String,
    pub report: EvalReport,
    pub predictions: Vec<PredictionRecord>,
    pub prediction_file: Option<PathBuf>,
}

/// Grades each pair with Flesch-Kincaid and scores the result. With `out`,
/// predictions are written to `<label>.fkgl.pred`.
pub fn cmd_baseline(
    input: &BaselineInput,
    truncate_to: Option<usize>,
    out: Option<&Path>,
) -> Result<Vec<BaselineRun>> {
    let sets: Vec<(String, Vec<PairInstance>)> = match input {
        BaselineInput::Corpus(source) => {
            let loaded = source.load()?;
            vec![(loaded.corpus.name().to_string(), loaded.corpus.permute())]
        }
        BaselineInput::GoldFiles(paths) => paths
            .iter()
            .map(|p| {
                let label = p
                    .file_name()
                    .and_then(|n| n.to_str())
                    .unwrap_or("gold")
                    .trim_end_matches(".gold")
                    .to_string();
                read_gold(p).map(|g| (label, g))
            })
            .collect::<Result<_>>()?,
    };
    if sets.is_empty() {
        return Err(Error::EmptyInput("no test pairs given".into()));
    }

    let mut staging = out.map(|o| Staging::new(o, "baseline")).transpose()?;
    let mut runs = Vec::new();
    let formats = FormatRegistry::builtin();
    for (label, gold) in sets {
        if gold.is_empty() {
            return Err(Error::EmptyInput(format!("{label} has no pairs")));
        }
        log::info!("{label}: grading {} pairs", gold.len());
        let predictions = FkglBaseline::new(truncate_to).predict(&gold);
        let report = score(&predictions, &gold, &formats, &Provenance::baseline())?;
        let prediction_file = match staging.as_mut() {
            Some(s) => {
                let name = format!("{label}.fkgl.pred");
                s.write(&name, |w| w.write_all(to_jsonl(&predictions).as_bytes()))?;
                Some(out.unwrap().join(name))
            }
            None => None,
        };
        runs.push(BaselineRun {
            label,
            report,
            predictions,
            prediction_file,
        });
    }
    if let Some(s) = staging {
        s.publish()?;
    }
    Ok(runs)
}

#[derive(Debug, Clone)]
pub struct EvaluateOutput {
    pub reports: Vec<(PathBuf, EvalReport)>,
    /// Best epoch per run, for runs whose predictions carry epochs.
    pub best: Vec<EvalReport>,
    pub matrix: Matrix,
}

/// Scores each prediction file against the gold file that holds its
/// instances. Runs with per-epoch files are reduced to their best epoch in
/// the matrix.
pub fn cmd_evaluate(
    gold_files: &[PathBuf],
    prediction_files: &[PathBuf],
    provenance: &Provenance,
) -> Result<EvaluateOutput> {
    let golds: Vec<Vec<PairInstance>> = gold_files
        .iter()
        .map(|p| read_gold(p))
        .collect::<Result<_>>()?;
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for (i, g) in golds.iter().enumerate() {
        for inst in g {
            owner.insert(inst.instance_id.as_str(), i);
        }
    }

    let formats = FormatRegistry::builtin();
    let mut reports = Vec::new();
    for path in prediction_files {
        let preds: Vec<PredictionRecord> = read_jsonl(path)?;
        let first = preds
            .first()
            .ok_or_else(|| Error::EmptyInput(format!("{} has no predictions", path.display())))?;
        let gold = owner
            .get(first.instance_id.as_str())
            .map(|&i| &golds[i])
            .ok_or_else(|| Error::UnmatchedPredictions(vec![first.instance_id.clone()]))?;
        let who = if preds.iter().all(|p| p.format == BASELINE_FORMAT) {
            Provenance::baseline()
        } else {
            provenance.clone()
        };
        reports.push((path.clone(), score(&preds, gold, &formats, &who)?));
    }

    // Group per-epoch reports by run, keeping first-appearance order.
    let mut runs: Vec<(String, Option<String>, String)> = Vec::new();
    let mut grouped: HashMap<(String, Option<String>, String), Vec<EvalReport>> = HashMap::new();
    let mut table = Vec::new();
    for (_, r) in &reports {
        if r.epoch.is_none() {
            table.push(r.clone());
            continue;
        }
        let key = (
            r.model.clone(),
            r.train_corpus.clone(),
            r.test_corpus.clone(),
        );
        if !grouped.contains_key(&key) {
            runs.push(key.clone());
        }
        grouped.entry(key).or_default().push(r.clone());
    }
    let mut best = Vec::new();
    for key in runs {
        let (_, report) = best_epoch(&grouped[&key])?;
        best.push(report.clone());
        table.push(report.clone());
    }
    Ok(EvaluateOutput {
        matrix: matrix(&table),
        reports,
        best,
    })
}

/// The nine formats as a tab-separated table: name, input format with `...`
/// holes, target output.
pub fn formats_table() -> String {
    let mut out = String::new();
    for spec in builtin_formats() {
        out.push_str(&format!(
            "{}\t\"{}\"\t{}\n",
            spec.kind.display_name(),
            spec.display_template(),
            spec.display_targets()
        ));
    }
    out
}
