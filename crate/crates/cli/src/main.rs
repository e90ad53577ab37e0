use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use scpd_core::dos::{embed_series, Damping, DosConfig};
use scpd_core::eval::{
    hits_from_ranking, lad_signatures, run_experiment, scaling_probe, sensitivity_sweep, write_sweep_csv,
    EmbeddingKind, ExperimentConfig, ExperimentSource, ScoreSource, SweepAxis, SweepParam,
};
use scpd_core::generators::{AnomalySchedule, Builtin, Schedule};
use scpd_core::io::{load_series, read_json, write_attributes, write_edge_list, write_json, write_scores, write_signatures};
use scpd_core::scoring::{score_attribute_series, score_series, ScoreSeries, ScoringConfig};
use scpd_core::{ScpdError, Snapshot};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "scpd", version, about = "Spectral-density change point detection on dynamic graphs")]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "SCPD_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic benchmark: edge list, attributes and ground truth.
    Generate(GenerateArgs),
    /// Embed and score an edge-list dataset.
    Detect(DetectArgs),
    /// Hits@n of a detection summary against a ground-truth file.
    Eval(EvalArgs),
    /// Multi-seed runs, hyperparameter sweeps and the scaling probe.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct DosArgs {
    /// Probe vectors for the trace estimator.
    #[arg(long, default_value_t = 100)]
    nz: usize,
    /// Chebyshev moments and Lanczos steps.
    #[arg(long, default_value_t = 20)]
    nm: usize,
    /// Histogram bins.
    #[arg(long, default_value_t = 50)]
    bins: usize,
    #[arg(long, default_value_t = 5)]
    short_window: usize,
    #[arg(long, default_value_t = 10)]
    long_window: usize,
    /// Disable Jackson damping of the Chebyshev moments.
    #[arg(long)]
    no_damping: bool,
}

impl DosArgs {
    fn dos(&self, seed: u64) -> DosConfig {
        DosConfig {
            n_probe: self.nz,
            n_moments: self.nm,
            n_bins: self.bins,
            seed,
            damping: if self.no_damping { Damping::None } else { Damping::Jackson },
            per_timestep_seeds: true,
        }
    }

    fn scoring(&self) -> ScoringConfig {
        ScoringConfig { short_window: self.short_window, long_window: self.long_window }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Builtin benchmark: sbm_hybrid, sbm_attribute, sbm_evolving or ba_change.
    #[arg(long, conflicts_with = "schedule", required_unless_present = "schedule")]
    experiment: Option<String>,
    /// JSON schedule file instead of a builtin.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Attribute file; requires --attribute.
    #[arg(long, requires = "attribute")]
    attributes: Option<PathBuf>,
    /// Attribute column scored with the local density of states.
    #[arg(long, requires = "attributes")]
    attribute: Option<String>,
    #[arg(long, value_enum, default_value = "dos")]
    embedding: EmbeddingArg,
    #[arg(long, default_value_t = 7)]
    top_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    dos: DosArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
enum EmbeddingArg {
    Dos,
    Lad,
}

impl From<EmbeddingArg> for EmbeddingKind {
    fn from(e: EmbeddingArg) -> Self {
        match e {
            EmbeddingArg::Dos => EmbeddingKind::Dos,
            EmbeddingArg::Lad => EmbeddingKind::Lad,
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// summary.json written by detect.
    #[arg(long)]
    summary: PathBuf,
    /// truth.json written by generate.
    #[arg(long)]
    truth: PathBuf,
    /// Ranking depth; defaults to the number of true anomalies.
    #[arg(long)]
    top_n: Option<usize>,
    /// Also write the result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value = "sbm_hybrid")]
    experiment: String,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Scale factors for the scaling probe, e.g. 1,2,4.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<f64>>,
    /// Sweep axis such as k=5,10,25,50; repeatable.
    #[arg(long)]
    sweep: Vec<String>,
    #[arg(long, value_enum, default_value = "dos")]
    embedding: EmbeddingArg,
    /// Rank the aggregated attribute scores instead of the structural ones.
    #[arg(long)]
    attribute_scores: bool,
    #[arg(long)]
    top_n: Option<usize>,
    /// Seed of the scaling probe.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    dos: DosArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Configuration echoed into summary.json.
#[derive(Debug, Serialize, Deserialize)]
struct ResolvedConfig {
    dos: DosConfig,
    scoring: ScoringConfig,
    embedding: EmbeddingKind,
    attribute: Option<String>,
    top_n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct AttributeSummary {
    column: String,
    labels: Vec<String>,
    top_n: Vec<usize>,
    ranking: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DetectSummary {
    top_n: Vec<usize>,
    ranking: Vec<usize>,
    timesteps: Vec<usize>,
    config: ResolvedConfig,
    attribute: Option<AttributeSummary>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(ScpdError),
}

impl From<ScpdError> for CliError {
    fn from(e: ScpdError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_compute_error() {
                ExitCode::from(EXIT_COMPUTE)
            } else if matches!(e, ScpdError::InvalidConfig(_)) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_DATA)
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Detect(a) => detect(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
    }
}

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn builtin(name: &str) -> CliResult<Builtin> {
    name.parse().map_err(|e: ScpdError| CliError::Usage(e.to_string()))
}

fn generate(a: GenerateArgs) -> CliResult<()> {
    let schedule: Schedule = match (&a.experiment, &a.schedule) {
        (Some(name), _) => builtin(name)?.schedule(a.scale)?,
        (None, Some(path)) => read_json(path)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    prepare_out(&a.out)?;
    let (graphs, truth) = schedule.generate(a.seed)?;
    write_edge_list(File::create(a.out.join("edges.csv"))?, &graphs)?;
    if schedule.attribute_column().is_some() {
        write_attributes(File::create(a.out.join("attributes.csv"))?, &graphs)?;
    }
    write_json(&a.out.join("truth.json"), &truth)?;
    write_json(&a.out.join("schedule.json"), &schedule)?;
    println!(
        "wrote {} snapshots, {} edges, {} anomalies to {}",
        graphs.len(),
        graphs.iter().map(Snapshot::edge_count).sum::<usize>(),
        truth.len(),
        a.out.display()
    );
    Ok(())
}

fn detect(a: DetectArgs) -> CliResult<()> {
    if !a.edges.is_file() {
        return Err(CliError::Usage(format!("edge file {} not found", a.edges.display())));
    }
    if let Some(p) = &a.attributes {
        if !p.is_file() {
            return Err(CliError::Usage(format!("attribute file {} not found", p.display())));
        }
    }
    if a.top_n < 1 {
        return Err(CliError::Usage("--top-n must be at least 1".into()));
    }
    let embedding: EmbeddingKind = a.embedding.into();
    if embedding == EmbeddingKind::Lad && a.attribute.is_some() {
        return Err(CliError::Usage("attribute scoring needs --embedding dos".into()));
    }
    let dos = a.dos.dos(a.seed);
    let scoring = a.dos.scoring();
    dos.validate()?;
    scoring.validate()?;
    prepare_out(&a.out)?;

    let graphs = load_series(&a.edges, a.attributes.as_deref())?;
    if graphs.len() < 2 {
        return Err(ScpdError::TooFewSignatures { need: 2, got: graphs.len() }.into());
    }
    if let Some(g) = graphs.iter().find(|g| g.node_count() == 0) {
        return Err(ScpdError::EmptyGraph.at_timestep(g.timestep()).into());
    }
    let timesteps: Vec<usize> = graphs.iter().map(Snapshot::timestep).collect();

    let (structural, attribute) = match embedding {
        EmbeddingKind::Lad => {
            let sigs = lad_signatures(&graphs)?;
            (score_series(&sigs, &scoring)?.with_timesteps(timesteps.clone()), None)
        }
        EmbeddingKind::Dos => {
            let emb = embed_series(&graphs, &dos, a.attribute.as_deref())?;
            write_signatures(BufWriter::new(File::create(a.out.join("signatures.csv"))?), &emb)?;
            let global: Vec<Vec<f64>> = emb.iter().map(|e| e.global.bins.clone()).collect();
            let structural = score_series(&global, &scoring)?.with_timesteps(timesteps.clone());
            let attribute = match &a.attribute {
                None => None,
                Some(column) => {
                    let per_t: Vec<BTreeMap<String, Vec<f64>>> = emb
                        .iter()
                        .map(|e| {
                            e.local.iter().flatten().map(|s| (s.kind.label().to_string(), s.bins.clone())).collect()
                        })
                        .collect();
                    let scores = score_attribute_series(&per_t, &scoring)?;
                    for (label, s) in &scores.per_label {
                        let s = s.clone().with_timesteps(timesteps.clone());
                        write_scores(File::create(a.out.join(format!("scores_attr_{}.csv", file_safe(label))))?, &s)?;
                    }
                    let agg = scores.aggregated.with_timesteps(timesteps.clone());
                    Some(AttributeSummary {
                        column: column.clone(),
                        labels: scores.per_label.keys().cloned().collect(),
                        top_n: agg.top_n(a.top_n),
                        ranking: agg.ranking(),
                    })
                }
            };
            (structural, attribute)
        }
    };
    write_scores(File::create(a.out.join("scores.csv"))?, &structural)?;
    let summary = DetectSummary {
        top_n: structural.top_n(a.top_n),
        ranking: structural.ranking(),
        timesteps,
        config: ResolvedConfig { dos, scoring, embedding, attribute: a.attribute.clone(), top_n: a.top_n },
        attribute,
    };
    write_json(&a.out.join("summary.json"), &summary)?;
    print_top("top", &structural, a.top_n);
    if let Some(attr) = &summary.attribute {
        println!("attribute top {}: {:?}", a.top_n, attr.top_n);
    }
    Ok(())
}

fn print_top(name: &str, s: &ScoreSeries, n: usize) {
    println!("{name} {n}: {:?}", s.top_n(n));
}

fn file_safe(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[derive(Serialize)]
struct EvalResult {
    n: usize,
    hits: f64,
    hit_timesteps: Vec<usize>,
    truth: Vec<usize>,
}

fn eval(a: EvalArgs) -> CliResult<()> {
    for p in [&a.summary, &a.truth] {
        if !p.is_file() {
            return Err(CliError::Usage(format!("{} not found", p.display())));
        }
    }
    let summary: DetectSummary = read_json(&a.summary)?;
    let truth: AnomalySchedule = read_json(&a.truth)?;
    let truth_set = truth.timesteps();
    let needed = *truth_set.last().ok_or(ScpdError::EmptyTruth)?;
    let last = summary.timesteps.iter().max().copied().unwrap_or(0);
    if last < needed {
        return Err(ScpdError::ScoresTooShort { last, needed }.into());
    }
    let n = a.top_n.unwrap_or(truth_set.len());
    if n < 1 {
        return Err(CliError::Usage("--top-n must be at least 1".into()));
    }
    let hits = hits_from_ranking(&summary.ranking, &truth, n)?;
    println!("hits@{n} = {hits:.3}");
    if let Some(path) = &a.json {
        let hit_timesteps = summary.ranking.iter().take(n).copied().filter(|t| truth_set.contains(t)).collect();
        write_json(path, &EvalResult { n, hits, hit_timesteps, truth: truth_set.into_iter().collect() })?;
    }
    Ok(())
}

fn parse_sweep(spec: &str) -> CliResult<SweepAxis> {
    let (name, values) = spec.split_once('=').ok_or_else(|| CliError::Usage(format!("sweep '{spec}' is not param=v1,v2")))?;
    let param = SweepParam::parse(name.trim()).ok_or_else(|| CliError::Usage(format!("unknown sweep parameter '{name}'")))?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid sweep value '{v}'"))))
        .collect::<CliResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("sweep '{spec}' has no values")));
    }
    Ok(SweepAxis { param, values })
}

fn bench(a: BenchArgs) -> CliResult<()> {
    let b = builtin(&a.experiment)?;
    if a.seeds.is_empty() {
        return Err(CliError::Usage("--seeds is empty".into()));
    }
    if let Some(out) = &a.out {
        prepare_out(out)?;
    }
    let cfg = ExperimentConfig {
        dos: a.dos.dos(0),
        scoring: a.dos.scoring(),
        embedding: a.embedding.into(),
        source: if a.attribute_scores { ScoreSource::Attribute } else { ScoreSource::Structural },
        top_n: a.top_n,
        scale: a.scale,
    };
    let source = ExperimentSource::Builtin(b);

    if let Some(sizes) = &a.sizes {
        if sizes.len() < 3 {
            return Err(CliError::Usage("--sizes needs at least 3 scale factors".into()));
        }
        let report = scaling_probe(b, sizes, a.seed, &cfg.dos, 1)?;
        println!("{:>8}  {:>12}  {:>10}", "scale", "edges", "embed_s");
        for p in &report.points {
            println!("{:>8}  {:>12}  {:>10.3}", p.scale, p.edges, p.embed_seconds);
        }
        println!("slope {:.3e} s/edge  R^2 {:.4}", report.slope, report.r_squared);
        if let Some(out) = &a.out {
            write_json(&out.join("scaling.json"), &report)?;
        }
    }
    if !a.sweep.is_empty() {
        let axes = a.sweep.iter().map(|s| parse_sweep(s)).collect::<CliResult<Vec<_>>>()?;
        let rows = sensitivity_sweep(&source, &cfg, &axes, &a.seeds)?;
        match &a.out {
            Some(out) => write_sweep_csv(File::create(out.join("sweep.csv"))?, &rows)?,
            None => write_sweep_csv(std::io::stdout().lock(), &rows)?,
        }
        if a.out.is_some() {
            for r in &rows {
                println!("{}={}  hits {:.2} +/- {:.2}", r.param.name(), r.value, r.mean, r.std);
            }
        }
    }
    if a.sizes.is_none() && a.sweep.is_empty() {
        let report = run_experiment(&source, &cfg, &a.seeds)?;
        print!("{}", report.to_table());
        if let Some(out) = &a.out {
            write_json(&out.join("report.json"), &report)?;
        }
    }
    Ok(())
}
