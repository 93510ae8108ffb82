use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use readpair::cli::{
    cmd_baseline, cmd_evaluate, cmd_prepare, formats_table, BaselineInput, CorpusSource,
    PipelineConfig, DEFAULT_SEED,
};
use readpair::corpus::{Adapter, CorpusKind, Ratios, SplitMode};
use readpair::eval::{EvalReport, Provenance};
use readpair::io::write_jsonl;
use readpair::prompts::{FormatKind, DEFAULT_TOKEN_BUDGET};
use readpair::Error;

/// Exit status for usage and configuration errors.
const EXIT_USAGE: u8 = 1;
/// Exit status for data errors (bad corpus, failed joins, conflicts).
const EXIT_DATA: u8 = 2;

#[derive(Parser)]
#[command(
    name = "readpair",
    version,
    about = "Pairwise readability corpora, prompts and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, permute, split and render a corpus into train/dev/test files.
    Prepare(PrepareArgs),
    /// Score the Flesch-Kincaid baseline on gold files or a whole corpus.
    Baseline(BaselineArgs),
    /// Score prediction files against gold files.
    Evaluate(EvaluateArgs),
    /// Print the nine input/output formats.
    Formats,
}

#[derive(Args)]
struct SourceArgs {
    /// Corpus location (directory or rows file, depending on the adapter).
    #[arg(long)]
    corpus: PathBuf,
    /// osen_dirs | newsela_meta | generic_rows
    #[arg(long)]
    adapter: Adapter,
    /// parallel | distinct (default: distinct for generic_rows, parallel otherwise)
    #[arg(long)]
    kind: Option<CorpusKind>,
    /// Corpus tag used in ids and file names (default: derived from the adapter or path).
    #[arg(long)]
    name: Option<String>,
    /// label<TAB>rank table overriding the default level mapping.
    #[arg(long)]
    levels: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> CorpusSource {
        let kind = self.kind.unwrap_or(match self.adapter {
            Adapter::GenericRows => CorpusKind::Distinct,
            _ => CorpusKind::Parallel,
        });
        let name = self.name.clone().unwrap_or_else(|| match self.adapter {
            Adapter::OsenDirs => "osen".into(),
            Adapter::NewselaMeta => "news".into(),
            Adapter::GenericRows => self
                .corpus
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("corpus")
                .to_string(),
        });
        CorpusSource {
            path: self.corpus.clone(),
            adapter: self.adapter,
            kind,
            name,
            levels: self.levels.clone(),
        }
    }
}

#[derive(Args)]
struct PrepareArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Format name, repeatable; `all` selects all nine.
    #[arg(long = "format", default_value = "question")]
    formats: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// train,dev,test proportions (or 6:2:2).
    #[arg(long, default_value = "0.6,0.2,0.2")]
    ratios: Ratios,
    /// instance_level | slug_level
    #[arg(long, default_value = "instance_level")]
    split_mode: SplitMode,
    /// Whitespace tokens kept per text.
    #[arg(long, default_value_t = DEFAULT_TOKEN_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    /// Gold file from `prepare`, repeatable.
    #[arg(long = "gold", conflicts_with = "corpus")]
    gold: Vec<PathBuf>,
    #[arg(long, requires = "adapter")]
    corpus: Option<PathBuf>,
    #[arg(long, requires = "corpus")]
    adapter: Option<Adapter>,
    #[arg(long)]
    kind: Option<CorpusKind>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    levels: Option<PathBuf>,
    /// Score only the first N whitespace tokens of each text.
    #[arg(long)]
    budget: Option<usize>,
    /// Directory for prediction files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write reports as JSON lines to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Gold file, repeatable.
    #[arg(long = "gold", required = true)]
    gold: Vec<PathBuf>,
    /// Prediction file, repeatable (e.g. one per epoch).
    #[arg(long = "pred", required = true)]
    pred: Vec<PathBuf>,
    /// Model name for the matrix rows.
    #[arg(long, default_value = "model")]
    model: String,
    /// Corpus (or `a+b` for joint training) the model was fine-tuned on.
    #[arg(long)]
    train_corpus: Option<String>,
    /// Also write reports as JSON lines to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn print_report(label: &str, r: &EvalReport) {
    println!(
        "{label}: accuracy {} ({}/{} correct, {} invalid)",
        r.bracketed(),
        r.correct,
        r.total,
        r.invalid
    );
    for (d, s) in &r.by_distance {
        println!(
            "  distance {d}: {:.3} ({}/{})",
            s.accuracy, s.correct, s.total
        );
    }
}

fn parse_formats(names: &[String]) -> Result<Vec<FormatKind>, Error> {
    let mut out = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            out.extend(FormatKind::ALL);
        } else {
            out.push(name.parse()?);
        }
    }
    out.dedup();
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Formats => print!("{}", formats_table()),
        Command::Prepare(args) => {
            let mut config = PipelineConfig::new(args.source.source(), args.out);
            config.formats = parse_formats(&args.formats)?;
            config.seed = args.seed;
            config.ratios = args.ratios;
            config.split_mode = args.split_mode;
            config.token_budget = args.budget;
            let out = cmd_prepare(&config)?;
            let m = &out.manifest;
            println!(
                "{}: {} texts, {} pairs; seed {}; train/dev/test {}/{}/{}",
                m.config.corpus,
                m.texts,
                m.pairs,
                m.config.seed,
                m.buckets["train"],
                m.buckets["dev"],
                m.buckets["test"]
            );
            println!("config hash {}", m.config_hash);
            println!("manifest {}", out.manifest_path.display());
        }
        Command::Baseline(args) => {
            let input = match (&args.corpus, args.adapter) {
                (Some(corpus), Some(adapter)) => BaselineInput::Corpus(
                    SourceArgs {
                        corpus: corpus.clone(),
                        adapter,
                        kind: args.kind,
                        name: args.name.clone(),
                        levels: args.levels.clone(),
                    }
                    .source(),
                ),
                _ => BaselineInput::GoldFiles(args.gold.clone()),
            };
            let runs = cmd_baseline(&input, args.budget, args.out.as_deref())?;
            for run in &runs {
                print_report(&run.label, &run.report);
            }
            if let Some(path) = &args.report {
                write_jsonl(path, runs.iter().map(|r| &r.report))?;
            }
        }
        Command::Evaluate(args) => {
            let who = Provenance::new(args.model, args.train_corpus);
            let out = cmd_evaluate(&args.gold, &args.pred, &who)?;
            for (path, r) in &out.reports {
                print_report(&path.display().to_string(), r);
            }
            for r in &out.best {
                println!(
                    "best epoch {} / {} on {}: {}",
                    r.model,
                    r.train_corpus.as_deref().unwrap_or("None"),
                    r.test_corpus,
                    r.bracketed()
                );
            }
            println!();
            print!("{}", out.matrix.render_text());
            if let Some(path) = &args.report {
                write_jsonl(path, out.reports.iter().map(|(_, r)| r))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_DATA })
        }
    }
}
