//! Hits@n, multi-seed experiment runs, hyperparameter sweeps and the
//! embedding-time scaling probe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dos::{embed_series, DosConfig, Embedding};
use crate::error::{Result, ScpdError};
use crate::generators::{AnomalySchedule, Builtin, Schedule};
use crate::graph::Snapshot;
use crate::oracle::lad_embedding;
use crate::scoring::{score_attribute_series, score_series, ScoreSeries, ScoringConfig};

/// Fraction of true anomalies among the first `n` entries of `ranking`.
pub fn hits_from_ranking(ranking: &[usize], truth: &AnomalySchedule, n: usize) -> Result<f64> {
    let truth = truth.timesteps();
    if truth.is_empty() {
        return Err(ScpdError::EmptyTruth);
    }
    if n < 1 {
        return Err(ScpdError::InvalidConfig("n must be at least 1".into()));
    }
    let hit = ranking.iter().take(n).filter(|t| truth.contains(t)).count();
    Ok(hit as f64 / truth.len() as f64)
}

/// `|top_n(scores) & truth| / |truth|`.
pub fn hits_at_n(scores: &ScoreSeries, truth: &AnomalySchedule, n: usize) -> Result<f64> {
    let needed = truth.timesteps().last().copied().ok_or(ScpdError::EmptyTruth)?;
    let last = scores.timesteps.iter().max().copied().unwrap_or(0);
    if last < needed {
        return Err(ScpdError::ScoresTooShort { last, needed });
    }
    hits_from_ranking(&scores.ranking(), truth, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    #[default]
    Dos,
    Lad,
}

/// Which score series is ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    /// Global signatures.
    #[default]
    Structural,
    /// Per-timestep maximum over attribute-label LDOS scores.
    Attribute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dos: DosConfig,
    pub scoring: ScoringConfig,
    pub embedding: EmbeddingKind,
    pub source: ScoreSource,
    /// Ranking depth for Hits@n; the number of planted anomalies when unset.
    pub top_n: Option<usize>,
    pub scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dos: DosConfig::default(),
            scoring: ScoringConfig::default(),
            embedding: EmbeddingKind::Dos,
            source: ScoreSource::Structural,
            top_n: None,
            scale: 1.0,
        }
    }
}

/// Wall-clock seconds per pipeline phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub generate: f64,
    pub embed: f64,
    pub score: f64,
}

impl PhaseTimings {
    fn add(&mut self, o: &PhaseTimings) {
        self.generate += o.generate;
        self.embed += o.embed;
        self.score += o.score;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub hits: f64,
    pub top_n: Vec<usize>,
    pub edges: usize,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub n: usize,
    pub truth: Vec<usize>,
    pub seeds: Vec<SeedResult>,
    pub mean: f64,
    /// Population standard deviation over seeds.
    pub std: f64,
    pub timings: PhaseTimings,
    pub total_edges: usize,
}

impl ExperimentReport {
    /// Aligned plain-text table, one row per seed plus a summary row.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}  embedding: {:?}  n: {}", self.experiment, self.config.embedding, self.n);
        let _ = writeln!(s, "{:>8}  {:>8}  {:>10}  {:>10}  {:>10}  {:>10}  top_n", "seed", "hits", "edges", "gen_s", "embed_s", "score_s");
        for r in &self.seeds {
            let _ = writeln!(
                s,
                "{:>8}  {:>8.3}  {:>10}  {:>10.3}  {:>10.3}  {:>10.3}  {:?}",
                r.seed, r.hits, r.edges, r.timings.generate, r.timings.embed, r.timings.score, r.top_n
            );
        }
        let _ = writeln!(
            s,
            "{:>8}  {:>8.3}  {:>10}  {:>10.3}  {:>10.3}  {:>10.3}  std {:.3}",
            "mean", self.mean, self.total_edges, self.timings.generate, self.timings.embed, self.timings.score, self.std
        );
        s
    }
}

/// Experiment input: a builtin benchmark or an explicit schedule.
#[derive(Debug, Clone)]
pub enum ExperimentSource {
    Builtin(Builtin),
    Schedule { name: String, schedule: Schedule },
}

impl ExperimentSource {
    pub fn name(&self) -> String {
        match self {
            ExperimentSource::Builtin(b) => b.name().to_string(),
            ExperimentSource::Schedule { name, .. } => name.clone(),
        }
    }

    pub fn schedule(&self, scale: f64) -> Result<Schedule> {
        match self {
            ExperimentSource::Builtin(b) => b.schedule(scale),
            ExperimentSource::Schedule { schedule, .. } => {
                schedule.validate()?;
                Ok(schedule.clone())
            }
        }
    }
}

/// LAD signatures: `L_sym` eigenvalues in descending order, zero-padded to
/// the largest snapshot so every vector has the same length.
pub fn lad_signatures(graphs: &[Snapshot]) -> Result<Vec<Vec<f64>>> {
    let mut sigs = graphs
        .par_iter()
        .map(|g| {
            let mut v = lad_embedding(g).map_err(|e| e.at_timestep(g.timestep()))?;
            v.reverse();
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let width = sigs.iter().map(Vec::len).max().unwrap_or(0);
    for s in &mut sigs {
        s.resize(width, 0.0);
    }
    Ok(sigs)
}

/// Embedded series ready for scoring.
pub enum Signatures {
    Dos(Vec<Embedding>),
    Lad(Vec<Vec<f64>>),
}

pub fn embed(graphs: &[Snapshot], cfg: &ExperimentConfig, attribute: Option<&str>) -> Result<Signatures> {
    match cfg.embedding {
        EmbeddingKind::Dos => Ok(Signatures::Dos(embed_series(graphs, &cfg.dos, attribute)?)),
        EmbeddingKind::Lad => Ok(Signatures::Lad(lad_signatures(graphs)?)),
    }
}

/// Score embedded signatures and relabel with the snapshot timesteps.
pub fn score(sigs: &Signatures, cfg: &ExperimentConfig, timesteps: Vec<usize>) -> Result<ScoreSeries> {
    let series = match (sigs, cfg.source) {
        (Signatures::Lad(v), ScoreSource::Structural) => score_series(v, &cfg.scoring)?,
        (Signatures::Dos(e), ScoreSource::Structural) => {
            let v: Vec<Vec<f64>> = e.iter().map(|x| x.global.bins.clone()).collect();
            score_series(&v, &cfg.scoring)?
        }
        (Signatures::Dos(e), ScoreSource::Attribute) => {
            let per_t: Vec<BTreeMap<String, Vec<f64>>> = e
                .iter()
                .map(|x| {
                    x.local
                        .iter()
                        .flatten()
                        .map(|s| (s.kind.label().to_string(), s.bins.clone()))
                        .collect()
                })
                .collect();
            score_attribute_series(&per_t, &cfg.scoring)?.aggregated
        }
        (Signatures::Lad(_), ScoreSource::Attribute) => {
            return Err(ScpdError::InvalidConfig("attribute scoring needs the dos embedding".into()))
        }
    };
    Ok(series.with_timesteps(timesteps))
}

fn run_seed(schedule: &Schedule, cfg: &ExperimentConfig, seed: u64, n: usize) -> Result<SeedResult> {
    let attribute = match cfg.source {
        ScoreSource::Structural => None,
        ScoreSource::Attribute => Some(schedule.attribute_column().ok_or_else(|| {
            ScpdError::InvalidConfig("attribute scoring requested but the schedule has no attributes".into())
        })?),
    };
    let clock = Instant::now();
    let (graphs, truth) = schedule.generate(seed)?;
    let generate = clock.elapsed().as_secs_f64();

    let mut run_cfg = cfg.clone();
    run_cfg.dos.seed = seed;
    let clock = Instant::now();
    let sigs = embed(&graphs, &run_cfg, attribute)?;
    let embed_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let scores = score(&sigs, &run_cfg, graphs.iter().map(Snapshot::timestep).collect())?;
    let score_s = clock.elapsed().as_secs_f64();

    Ok(SeedResult {
        seed,
        hits: hits_at_n(&scores, &truth, n)?,
        top_n: scores.top_n(n),
        edges: graphs.iter().map(Snapshot::edge_count).sum(),
        timings: PhaseTimings { generate, embed: embed_s, score: score_s },
    })
}

/// Generate, embed, score and evaluate the experiment once per seed. The
/// probe seed of each run is the experiment seed. Seeds run concurrently;
/// results are listed in input order.
pub fn run_experiment(source: &ExperimentSource, cfg: &ExperimentConfig, seeds: &[u64]) -> Result<ExperimentReport> {
    cfg.dos.validate()?;
    cfg.scoring.validate()?;
    if seeds.is_empty() {
        return Err(ScpdError::InvalidConfig("at least one seed is required".into()));
    }
    let schedule = source.schedule(cfg.scale)?;
    let truth = schedule.truth();
    if truth.is_empty() {
        return Err(ScpdError::EmptyTruth);
    }
    let n = cfg.top_n.unwrap_or(truth.len());
    if n < 1 {
        return Err(ScpdError::InvalidConfig("top_n must be at least 1".into()));
    }
    let results = seeds
        .par_iter()
        .map(|&seed| run_seed(&schedule, cfg, seed, n).map_err(|e| e.at_seed(seed)))
        .collect::<Result<Vec<_>>>()?;

    let hits: Vec<f64> = results.iter().map(|r| r.hits).collect();
    let (mean, std) = mean_std(&hits);
    let mut timings = PhaseTimings::default();
    results.iter().for_each(|r| timings.add(&r.timings));
    Ok(ExperimentReport {
        experiment: source.name(),
        config: cfg.clone(),
        n,
        truth: truth.timesteps().into_iter().collect(),
        total_edges: results.iter().map(|r| r.edges).sum(),
        seeds: results,
        mean,
        std,
        timings,
    })
}

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Probe count.
    Nz,
    /// Moment count.
    Nm,
    /// Bin count.
    K,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Nz => "nz",
            SweepParam::Nm => "nm",
            SweepParam::K => "k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nz" | "n_z" | "probes" => Some(SweepParam::Nz),
            "nm" | "n_m" | "moments" => Some(SweepParam::Nm),
            "k" | "bins" => Some(SweepParam::K),
            _ => None,
        }
    }

    fn apply(&self, dos: &mut DosConfig, value: usize) {
        match self {
            SweepParam::Nz => dos.n_probe = value,
            SweepParam::Nm => dos.n_moments = value,
            SweepParam::K => dos.n_bins = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: usize,
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Per-axis sweep: each value of each axis is run with every other parameter
/// at its base value.
pub fn sensitivity_sweep(
    source: &ExperimentSource,
    base: &ExperimentConfig,
    axes: &[SweepAxis],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    if axes.iter().all(|a| a.values.is_empty()) {
        return Err(ScpdError::InvalidConfig("sweep grid is empty".into()));
    }
    let mut rows = Vec::new();
    for axis in axes {
        for &value in &axis.values {
            let mut cfg = base.clone();
            axis.param.apply(&mut cfg.dos, value);
            let report = run_experiment(source, &cfg, seeds)?;
            rows.push(SweepRow {
                param: axis.param,
                value,
                per_seed: report.seeds.iter().map(|s| s.hits).collect(),
                mean: report.mean,
                std: report.std,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv(out: impl Write, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(["param", "value", "mean", "std", "per_seed"])?;
    for r in rows {
        let per_seed = r.per_seed.iter().map(|h| format!("{h:.4}")).collect::<Vec<_>>().join(";");
        w.write_record([
            r.param.name().to_string(),
            r.value.to_string(),
            format!("{:.4}", r.mean),
            format!("{:.4}", r.std),
            per_seed,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub scale: f64,
    pub edges: usize,
    pub embed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub experiment: String,
    pub points: Vec<ScalingPoint>,
    /// Seconds per edge of the through-origin fit.
    pub slope: f64,
    pub r_squared: f64,
}

/// Least-squares line through the origin. R² uses the centred total sum of
/// squares.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let slope = sxy / sxx;
    let mean_y = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - mean_y).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, r2)
}

/// Embedding wall-clock against total edge count over several scales. Each
/// size is embedded `repeats` times and the fastest run is kept.
pub fn scaling_probe(
    builtin: Builtin,
    sizes: &[f64],
    seed: u64,
    dos: &DosConfig,
    repeats: usize,
) -> Result<ScalingReport> {
    let distinct: BTreeSet<u64> = sizes.iter().map(|s| s.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(ScpdError::InvalidConfig("scaling probe needs at least 3 distinct sizes".into()));
    }
    let mut points = Vec::new();
    for &scale in sizes {
        let (graphs, _) = builtin.schedule(scale)?.generate(seed)?;
        let edges = graphs.iter().map(Snapshot::edge_count).sum();
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let clock = Instant::now();
            embed_series(&graphs, dos, None)?;
            best = best.min(clock.elapsed().as_secs_f64());
        }
        points.push(ScalingPoint { scale, edges, embed_seconds: best });
    }
    let x: Vec<f64> = points.iter().map(|p| p.edges as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.embed_seconds).collect();
    let (slope, r_squared) = fit_through_origin(&x, &y);
    Ok(ScalingReport { experiment: builtin.name().to_string(), points, slope, r_squared })
}
