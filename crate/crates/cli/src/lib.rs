//! The `tagalign` command line: build, process, evaluate, corrupt and bench.
//!
//! [`run`] takes the argument list and output streams so the whole command can
//! be driven from tests. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use tagalign_bench::{run_benchmark_with, synth, BenchError, BenchPair, Buckets};
use tagalign_core::dataset::{load_dataset, Dataset, Format, InstanceRecord};
use tagalign_core::{
    corrupt, evaluate, parse_generation, process_record, sample_label_set, LabelSet, NoiseConfig,
    Normalizer, ProcessOptions, ProcessedRecord, PromptInstance, RepairPolicy, SamplerConfig,
    TaggingScheme, TargetVariant,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tagalign",
    version,
    about = "Structure token-by-token NER generations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a labelled corpus into instruction-tuning JSONL.
    Build(BuildArgs),
    /// Recover tags and entities from the `generation` field of each record.
    Process(ProcessArgs),
    /// Score processed predictions against gold records.
    Evaluate(EvaluateArgs),
    /// Write records whose `generation` is a corrupted gold rendering.
    Corrupt(CorruptArgs),
    /// Time the naive, Hunt–Szymanski and hierarchical aligners.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input corpus.
    #[arg(long, short)]
    input: PathBuf,
    /// conll or jsonl; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<Format>,
    /// Tagging scheme of the input tags.
    #[arg(long, default_value = "bio")]
    scheme: TaggingScheme,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output JSONL; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// bio, bioes, entity:<k> or entity:full.
    #[arg(long, default_value = "bio")]
    variant: TargetVariant,
    /// Marker between entity-centric windows.
    #[arg(long)]
    gap_marker: Option<String>,
    /// Comma-separated types that may be added as absent labels.
    #[arg(long, value_delimiter = ',')]
    external_pool: Vec<String>,
    /// Absent labels per prompt; defaults to twice the present types, at most ten in total.
    #[arg(long)]
    external_count: Option<usize>,
    /// Base seed for label sampling; record k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ProcessArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// identity, unicode or vocab:<file>.
    #[arg(long, default_value = "identity")]
    normalizer: String,
    #[arg(long, default_value = "conservative")]
    repair: RepairPolicy,
    /// Generation segments equal to this string are dropped before parsing.
    #[arg(long)]
    gap_marker: Option<String>,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Gold corpus (records with gold_tags, or CoNLL).
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    gold_format: Option<Format>,
    /// Output of `process`.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value = "bio")]
    scheme: TaggingScheme,
    /// Add a per-type breakdown.
    #[arg(long)]
    per_type: bool,
}

#[derive(Debug, Args)]
struct CorruptArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Total per-token corruption rate, split 39:3:58 over omission, addition and
    /// substitution. Ignored when any explicit probability is given.
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    #[arg(long)]
    p_omit: Option<f64>,
    #[arg(long)]
    p_add: Option<f64>,
    #[arg(long)]
    p_sub: Option<f64>,
    /// Leave entity tokens untouched by omission and substitution.
    #[arg(long)]
    entity_safe: bool,
    /// Base seed; record k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Records with generations to benchmark on; a synthetic corpus otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Synthetic pairs per bucket.
    #[arg(long, default_value_t = 200)]
    per_bucket: usize,
    /// Synthetic per-token noise rate.
    #[arg(long, default_value_t = 0.02)]
    rate: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Bucket edges on original length.
    #[arg(long, value_delimiter = ',', default_value = "0,60,100,200")]
    buckets: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long, default_value_t = 2)]
    warmup: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] tagalign_core::Error),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(a, stdout, stderr),
        Command::Process(a) => cmd_process(a, stdout, stderr),
        Command::Evaluate(a) => cmd_evaluate(a, stdout, stderr),
        Command::Corrupt(a) => cmd_corrupt(a, stdout, stderr),
        Command::Bench(a) => cmd_bench(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn load(
    input: &Path,
    format: Option<Format>,
    scheme: TaggingScheme,
    stderr: &mut dyn Write,
) -> CliResult<Dataset> {
    let ds = load_dataset(
        input,
        format.unwrap_or_else(|| Format::guess(input)),
        scheme,
    )?;
    if let Some(first) = ds.unknown_tags.first() {
        let _ = writeln!(
            stderr,
            "warning: {}: {} unknown tag(s) read as O (first {:?} on line {})",
            input.display(),
            ds.unknown_tags.len(),
            first.tag,
            first.line
        );
    }
    Ok(ds)
}

/// Writes one line per item to `output`, or to `stdout` when absent.
fn write_lines(output: Option<&Path>, stdout: &mut dyn Write, lines: &[String]) -> CliResult<()> {
    let emit = |w: &mut dyn Write| -> io::Result<()> {
        for line in lines {
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    match output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            emit(&mut BufWriter::new(file)).map_err(io_err(path))
        }
        None => emit(stdout).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output types serialize")
}

fn cmd_build(a: BuildArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let ds = load(&a.input.input, a.input.format, a.input.scheme, stderr)?;
    let mut variant = a.variant;
    if let (TargetVariant::EntityCentric { gap_marker, .. }, Some(m)) =
        (&mut variant, &a.gap_marker)
    {
        *gap_marker = m.clone();
    }
    let instruction_scheme = match variant {
        TargetVariant::TokenByToken(s) => s,
        TargetVariant::EntityCentric { .. } => a.input.scheme,
    };
    let pool = if a.external_pool.is_empty() {
        None
    } else {
        Some(LabelSet::new(a.external_pool.iter().cloned())?)
    };

    let mut lines = Vec::with_capacity(ds.records.len());
    for (k, rec) in ds.records.iter().enumerate() {
        let seq = rec
            .gold_sequence(a.input.scheme)?
            .ok_or_else(|| tagalign_core::Error::MissingGold(rec.id.clone()))?;
        let present = rec.labels()?;
        let labels = match &pool {
            None => present,
            Some(pool) => {
                let cfg = SamplerConfig {
                    shuffle_seed: a.seed.wrapping_add(k as u64),
                    external_pool: pool.clone(),
                    external_count: a
                        .external_count
                        .unwrap_or_else(|| SamplerConfig::default_external_count(present.len())),
                };
                sample_label_set(&present, &cfg)
            }
        };
        let inst = PromptInstance::build(&seq, labels, &variant, instruction_scheme)?;
        lines.push(to_json(&inst.into_record(rec.id.clone())));
    }
    write_lines(a.output.as_deref(), stdout, &lines)
}

fn parse_normalizer(spec: &str) -> CliResult<Normalizer> {
    match spec {
        "identity" => Ok(Normalizer::Identity),
        "unicode" => Ok(Normalizer::UnicodeFold),
        _ => match spec.strip_prefix("vocab:") {
            Some(file) => {
                let path = Path::new(file);
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                Ok(Normalizer::vocab_from_text(&text))
            }
            None => Err(CliError::Usage(format!(
                "unknown normalizer {spec:?} (expected identity, unicode or vocab:<file>)"
            ))),
        },
    }
}

/// Runs the pipeline over `records` on `jobs` threads. Output order is input order.
pub fn process_all(
    records: &[InstanceRecord],
    opts: &ProcessOptions,
    jobs: usize,
) -> Vec<ProcessedRecord> {
    if jobs <= 1 {
        return records.iter().map(|r| process_record(r, opts)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        records
            .par_iter()
            .map(|r| process_record(r, opts))
            .collect()
    })
}

fn cmd_process(a: ProcessArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let opts = ProcessOptions {
        scheme: a.input.scheme,
        normalizer: parse_normalizer(&a.normalizer)?,
        repair: a.repair,
        gap_marker: a.gap_marker,
    };
    let ds = load(&a.input.input, a.input.format, a.input.scheme, stderr)?;
    let out = process_all(&ds.records, &opts, a.jobs.into());
    let soft = out.iter().filter(|r| r.diagnostic.is_some()).count();
    if soft > 0 {
        let _ = writeln!(stderr, "warning: {soft} record(s) with diagnostics");
    }
    let lines: Vec<String> = out.iter().map(to_json).collect();
    write_lines(a.output.as_deref(), stdout, &lines)
}

/// Reads `process` output, one record per line.
pub fn read_predictions(path: &Path) -> CliResult<Vec<ProcessedRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|e| tagalign_core::Error::Malformed {
            path: path.display().to_string(),
            line: k + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn cmd_evaluate(a: EvaluateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let gold = load(&a.gold, a.gold_format, a.scheme, stderr)?;
    let pred = read_predictions(&a.pred)?;
    let report = evaluate(&gold.records, &pred, a.scheme, a.per_type)?;
    write_lines(None, stdout, &[to_json(&report)])
}

fn cmd_corrupt(a: CorruptArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let explicit = a.p_omit.is_some() || a.p_add.is_some() || a.p_sub.is_some();
    let base = if explicit {
        NoiseConfig {
            p_omit: a.p_omit.unwrap_or(0.0),
            p_add: a.p_add.unwrap_or(0.0),
            p_sub: a.p_sub.unwrap_or(0.0),
            entity_safe: a.entity_safe,
            seed: a.seed,
        }
    } else {
        NoiseConfig {
            entity_safe: a.entity_safe,
            ..NoiseConfig::mixture(a.rate, a.seed)
        }
    };
    if !base.is_valid() {
        return Err(CliError::Usage(
            "noise probabilities must lie in [0, 1] and sum to at most 1".to_owned(),
        ));
    }
    let ds = load(&a.input.input, a.input.format, a.input.scheme, stderr)?;
    let mut lines = Vec::with_capacity(ds.records.len());
    for (k, rec) in ds.records.iter().enumerate() {
        let seq = rec
            .gold_sequence(a.input.scheme)?
            .ok_or_else(|| tagalign_core::Error::MissingGold(rec.id.clone()))?;
        let cfg = NoiseConfig {
            seed: a.seed.wrapping_add(k as u64),
            ..base
        };
        let mut out = rec.clone();
        out.generation = Some(corrupt(&seq, &cfg));
        lines.push(to_json(&out));
    }
    write_lines(a.output.as_deref(), stdout, &lines)
}

fn cmd_bench(a: BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let buckets = Buckets::new(a.buckets)?;
    let corpus: Vec<BenchPair> = match &a.input {
        Some(path) => {
            let ds = load_dataset(
                path,
                a.format.unwrap_or_else(|| Format::guess(path)),
                TaggingScheme::Bio,
            )?;
            ds.records
                .iter()
                .filter_map(|r| {
                    let generation = r.generation.as_ref()?;
                    Some(BenchPair {
                        orig: r.tokens.clone(),
                        pred: parse_generation(generation)
                            .tokens()
                            .map(str::to_owned)
                            .collect(),
                    })
                })
                .collect()
        }
        None => synth::noisy_corpus(&buckets.ranges(), a.per_bucket, a.rate, a.seed),
    };
    let report = run_benchmark_with(&corpus, a.repetitions, a.warmup, &buckets)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &a.json {
        fs::write(path, format!("{json}\n")).map_err(io_err(path))?;
    }
    write!(stdout, "{}\n{json}\n", report.to_table()).map_err(io_err(Path::new("<stdout>")))
}
