//! `docsim`: index a bag-of-words corpus, rank documents against a query, and
//! run cross-validated retrieval and kNN classification benchmarks.
//!
//! ```bash
//! docsim index --corpus webkb.txt --out webkb.idx
//! docsim query --corpus webkb.txt --query-doc 12 --exclude-self --measure sp --k 5
//! docsim benchmark --corpus webkb.txt --out map.csv --seed 7
//! docsim classify --corpus webkb.txt --representation binary --out knn.json --format json
//! ```
//!
//! Every long flag can also be set from a `key = value` file passed with
//! `--config`; flags given on the command line take precedence.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use docsim::corpus::parse_line;
use docsim::presets::{classification, retrieval};
use docsim::{
    cross_validate, top_k, Bm25Params, Collection, Corpus, EvalReport, FoldAssignment,
    FrequencyIndex, Measure, MeasureConfig, Representation, Scorer, Task, WeightingScheme,
};

mod config;

#[derive(Parser)]
#[command(
    name = "docsim",
    version,
    about = "Bag-of-words document similarity toolkit"
)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the cumulative frequency index of a corpus and save it
    Index(IndexArgs),
    /// Rank corpus documents against a query document
    Query(QueryArgs),
    /// Cross-validated query-by-example retrieval (MAP@k)
    Benchmark(EvalArgs),
    /// Cross-validated kNN classification (accuracy)
    Classify(EvalArgs),
}

impl Command {
    fn corpus(&self) -> &CorpusArgs {
        match self {
            Command::Index(a) => &a.corpus,
            Command::Query(a) => &a.corpus,
            Command::Benchmark(a) => &a.corpus,
            Command::Classify(a) => &a.corpus,
        }
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file: one `<label> <term>:<count> ...` line per document
    #[arg(long)]
    corpus: PathBuf,
    /// Dictionary size (default: 1 + largest term id)
    #[arg(long)]
    dims: Option<usize>,
    /// `binary` drops frequencies before anything else happens
    #[arg(long, default_value = "tf")]
    representation: Representation,
    /// File of `key = value` defaults for any long flag
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CorpusArgs {
    fn load(&self) -> Result<Corpus> {
        let corpus = Corpus::load(&self.corpus, self.dims)
            .with_context(|| format!("loading {}", self.corpus.display()))?;
        Ok(self.representation.apply(corpus))
    }
}

#[derive(Args)]
struct Bm25Args {
    /// BM25 term-frequency saturation
    #[arg(long, default_value_t = 1.2)]
    bm25_a: f64,
    /// BM25 length normalization, in [0, 1]
    #[arg(long, default_value_t = 0.95)]
    bm25_b: f64,
}

impl Bm25Args {
    fn params(&self) -> Result<Bm25Params> {
        Ok(Bm25Params::new(self.bm25_a, self.bm25_b)?)
    }
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Index file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("query").required(true).args(["query_line", "query_doc"]))]
struct QueryArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "sp")]
    measure: Measure,
    /// Weighting for cosine and wjaccard (default: none)
    #[arg(long)]
    weighting: Option<WeightingScheme>,
    #[command(flatten)]
    bm25: Bm25Args,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Previously built index of the same corpus and representation
    #[arg(long)]
    index: Option<PathBuf>,
    /// Query as a corpus-format line, e.g. "0 3:1 17:2"
    #[arg(long)]
    query_line: Option<String>,
    /// Query with the corpus document at this 0-based position
    #[arg(long)]
    query_doc: Option<usize>,
    /// Leave the query document out of the ranking (with --query-doc)
    #[arg(long)]
    exclude_self: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Comma-separated `measure[:weighting]` list (default: the preset for
    /// the task and representation)
    #[arg(long)]
    configs: Option<String>,
    #[command(flatten)]
    bm25: Bm25Args,
    /// Retrieval depth (default 25) or neighbor count (default 5)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep label proportions equal across folds
    #[arg(long)]
    stratified: bool,
    /// Report file; also writes `<stem>.significance.csv` beside it.
    /// Without it the report goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("docsim: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let mut cli = Cli::parse_from(&argv);
    if let Some(path) = cli.command.corpus().config.clone() {
        cli = Cli::parse_from(config::splice(&argv, config::read(&path)?));
    }
    match cli.command {
        Command::Index(args) => index(args),
        Command::Query(args) => query(args),
        Command::Benchmark(args) => evaluate(Task::Retrieval, args),
        Command::Classify(args) => evaluate(Task::Classification, args),
    }
}

fn index(args: IndexArgs) -> Result<()> {
    let corpus = args.corpus.load()?;
    let start = Instant::now();
    let index = FrequencyIndex::from_corpus(&corpus);
    let elapsed = start.elapsed();
    index
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("documents\t{}", index.num_docs());
    println!("terms\t{}", index.dims());
    println!("avgdl\t{:.6}", index.avgdl());
    eprintln!("built index in {elapsed:.2?}");
    Ok(())
}

fn query(args: QueryArgs) -> Result<()> {
    let corpus = args.corpus.load()?;
    let config = MeasureConfig::new(args.measure, args.weighting.unwrap_or_default())?
        .with_bm25(args.bm25.params()?);
    let mut collection = Collection::full(&corpus);
    if let Some(path) = &args.index {
        let index =
            FrequencyIndex::load(path).with_context(|| format!("loading {}", path.display()))?;
        if &index != collection.index() {
            bail!(
                "{} was not built from this corpus and representation",
                path.display()
            );
        }
        collection = collection.with_index(index)?;
    }
    let (query, exclude) = match (&args.query_line, args.query_doc) {
        (Some(_), _) if args.exclude_self => bail!("--exclude-self needs --query-doc"),
        (Some(line), _) => {
            let doc = parse_line(line).map_err(|e| anyhow::anyhow!("query line: {e}"))?;
            (args.corpus.representation.apply_document(doc.doc), None)
        }
        (None, Some(i)) if i < corpus.len() => {
            (corpus.doc(i).clone(), args.exclude_self.then_some(i))
        }
        (None, Some(i)) => bail!(
            "query document {i} is out of range (corpus has {})",
            corpus.len()
        ),
        (None, None) => unreachable!("clap requires a query"),
    };
    let scorer = Scorer::new(config, &collection)?;
    let ranked = top_k(&scorer, &query, args.k, exclude)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for (rank, r) in ranked.entries().iter().enumerate() {
        writeln!(out, "{}\t{}\t{:.6}", rank + 1, r.doc, r.score)?;
    }
    out.flush()?;
    Ok(())
}

fn evaluate(task: Task, args: EvalArgs) -> Result<()> {
    let corpus = args.corpus.load()?;
    let k = args.k.unwrap_or(match task {
        Task::Retrieval => 25,
        Task::Classification => 5,
    });
    let params = args.bm25.params()?;
    let configs: Vec<MeasureConfig> = match &args.configs {
        Some(list) => list
            .split(',')
            .map(|s| {
                MeasureConfig::parse(s.trim()).with_context(|| format!("config `{}`", s.trim()))
            })
            .collect::<Result<_>>()?,
        None => match task {
            Task::Retrieval => retrieval(args.corpus.representation),
            Task::Classification => classification(args.corpus.representation),
        },
    };
    if configs.is_empty() {
        bail!("no configurations to evaluate");
    }
    let configs: Vec<_> = configs.into_iter().map(|c| c.with_bm25(params)).collect();
    let folds = if args.stratified {
        FoldAssignment::stratified(&corpus.labels(), args.folds, args.seed)?
    } else {
        FoldAssignment::new(corpus.len(), args.folds, args.seed)?
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()?;
    let start = Instant::now();
    let report = pool.install(|| cross_validate(&corpus, &configs, task, k, &folds))?;
    let elapsed = start.elapsed();

    match &args.out {
        Some(path) => {
            write_report(&report, args.format, path)?;
            let significance = significance_path(path);
            let file = File::create(&significance)
                .with_context(|| format!("writing {}", significance.display()))?;
            let mut w = BufWriter::new(file);
            report.write_significance_csv(&mut w)?;
            w.flush()?;
            for r in &report.results {
                eprintln!("{:<14} {:.4} ± {:.4}", r.label, r.mean, r.se);
            }
        }
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            match args.format {
                Format::Csv => report.write_csv(&mut out)?,
                Format::Json => report.write_json(&mut out)?,
            }
            out.flush()?;
        }
    }
    eprintln!(
        "{} over {} folds in {elapsed:.2?}",
        report.metric, report.folds
    );
    Ok(())
}

fn write_report(report: &EvalReport, format: Format, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Csv => report.write_csv(&mut w)?,
        Format::Json => report.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn significance_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().unwrap_or_default().to_string_lossy();
    report.with_file_name(format!("{stem}.significance.csv"))
}
