//! Synthetic dynamic-graph benchmarks with planted anomalies.
//!
//! Every snapshot is an independent draw from the generative model active at
//! its timestep, using the stream `stream_rng(seed, t)` (see [`crate::rng`]).
//! Timesteps run `1..=total_steps`. A schedule row starting at time `s`
//! applies from timestep `max(s, 1)` until the next non-event row; an event
//! row applies to its own timestep only.
//!
//! SBM nodes are laid out as contiguous id ranges, one per community, in the
//! order of `community_sizes`. Growing the list appends fresh ids; splitting
//! a community into halves partitions its id range.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpdError};
use crate::graph::{AttributeColumn, AttributeTable, NodeId, Snapshot};
use crate::rng::stream_rng;

/// Name of the categorical column emitted by attributed SBM segments.
pub const LABEL_COLUMN: &str = "label";
pub const LABEL_ONE: &str = "one";
pub const LABEL_TWO: &str = "two";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    Event,
    ChangePoint,
    AttributeChangePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Start,
    Event,
    ChangePoint,
    AttributeChangePoint,
}

impl RowKind {
    fn anomaly(self) -> Option<AnomalyKind> {
        match self {
            RowKind::Start => None,
            RowKind::Event => Some(AnomalyKind::Event),
            RowKind::ChangePoint => Some(AnomalyKind::ChangePoint),
            RowKind::AttributeChangePoint => Some(AnomalyKind::AttributeChangePoint),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub timestep: usize,
    pub kind: AnomalyKind,
}

/// Ground-truth anomalous timesteps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalySchedule {
    pub anomalies: Vec<Anomaly>,
}

impl AnomalySchedule {
    pub fn timesteps(&self) -> BTreeSet<usize> {
        self.anomalies.iter().map(|a| a.timestep).collect()
    }

    pub fn of_kind(&self, kind: AnomalyKind) -> BTreeSet<usize> {
        self.anomalies.iter().filter(|a| a.kind == kind).map(|a| a.timestep).collect()
    }

    pub fn len(&self) -> usize {
        self.anomalies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anomalies.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeMode {
    #[default]
    None,
    /// Every node in a community shares a label; the first half of the
    /// communities are labelled one, the rest two.
    Homogeneous,
    /// Each node independently labelled one or two with probability 1/2.
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmRow {
    pub time: usize,
    pub kind: RowKind,
    pub community_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    #[serde(default)]
    pub attributes: AttributeMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSchedule {
    pub total_steps: usize,
    pub rows: Vec<SbmRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaRow {
    pub time: usize,
    pub kind: RowKind,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaSchedule {
    pub total_steps: usize,
    pub nodes: usize,
    pub rows: Vec<BaRow>,
}

/// Schedule file contents; JSON with a `model` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Schedule {
    Sbm(SbmSchedule),
    Ba(BaSchedule),
}

fn check_times<'a>(total_steps: usize, rows: impl Iterator<Item = (usize, RowKind)> + 'a) -> Result<()> {
    let mut last: Option<usize> = None;
    let mut any = false;
    for (time, kind) in rows {
        if last.is_none() && time > 1 {
            return Err(ScpdError::InvalidSchedule(format!("first row starts at {time}, must start at 0 or 1")));
        }
        if last.is_none() && kind == RowKind::Event {
            return Err(ScpdError::InvalidSchedule("first row cannot be an event".into()));
        }
        if let Some(prev) = last {
            if time <= prev {
                return Err(ScpdError::InvalidSchedule(format!("row times must increase ({prev} then {time})")));
            }
        }
        if kind != RowKind::Start && (time < 1 || time > total_steps) {
            return Err(ScpdError::InvalidSchedule(format!("anomaly at {time} outside [1, {total_steps}]")));
        }
        last = Some(time);
        any = true;
    }
    if !any {
        return Err(ScpdError::InvalidSchedule("schedule has no rows".into()));
    }
    if total_steps < 2 {
        return Err(ScpdError::InvalidSchedule("need at least 2 timesteps".into()));
    }
    Ok(())
}

/// Index of the row governing timestep `t`.
fn active_row(times: &[(usize, RowKind)], t: usize) -> usize {
    if let Some(i) = times.iter().position(|&(time, kind)| kind == RowKind::Event && time == t) {
        return i;
    }
    times
        .iter()
        .enumerate()
        .filter(|(_, &(time, kind))| kind != RowKind::Event && time <= t)
        .map(|(i, _)| i)
        .last()
        .unwrap_or(0)
}

fn truth_from(rows: impl Iterator<Item = (usize, RowKind)>) -> AnomalySchedule {
    AnomalySchedule {
        anomalies: rows
            .filter_map(|(timestep, kind)| kind.anomaly().map(|kind| Anomaly { timestep, kind }))
            .collect(),
    }
}

impl SbmSchedule {
    pub fn validate(&self) -> Result<()> {
        check_times(self.total_steps, self.rows.iter().map(|r| (r.time, r.kind)))?;
        for r in &self.rows {
            if !(0.0..=1.0).contains(&r.p_in) || !(0.0..=1.0).contains(&r.p_out) {
                return Err(ScpdError::InvalidSchedule(format!("row {}: probabilities must lie in [0, 1]", r.time)));
            }
            if r.community_sizes.iter().sum::<usize>() == 0 {
                return Err(ScpdError::InvalidSchedule(format!("row {}: community sizes sum to 0", r.time)));
            }
            if r.attributes == AttributeMode::Homogeneous && r.community_sizes.len() % 2 == 1 {
                return Err(ScpdError::InvalidSchedule(format!(
                    "row {}: homogeneous labels need an even community count, got {}",
                    r.time,
                    r.community_sizes.len()
                )));
            }
        }
        Ok(())
    }

    pub fn truth(&self) -> AnomalySchedule {
        truth_from(self.rows.iter().map(|r| (r.time, r.kind)))
    }

    pub fn row_at(&self, t: usize) -> &SbmRow {
        let times: Vec<_> = self.rows.iter().map(|r| (r.time, r.kind)).collect();
        &self.rows[active_row(&times, t)]
    }

    pub fn has_attributes(&self) -> bool {
        self.rows.iter().any(|r| r.attributes != AttributeMode::None)
    }
}

impl BaSchedule {
    pub fn validate(&self) -> Result<()> {
        check_times(self.total_steps, self.rows.iter().map(|r| (r.time, r.kind)))?;
        for r in &self.rows {
            if r.m < 1 {
                return Err(ScpdError::InvalidSchedule(format!("row {}: m must be at least 1", r.time)));
            }
            if r.m >= self.nodes {
                return Err(ScpdError::InvalidSchedule(format!(
                    "row {}: m = {} must be below the node count {}",
                    r.time, r.m, self.nodes
                )));
            }
        }
        Ok(())
    }

    pub fn truth(&self) -> AnomalySchedule {
        truth_from(self.rows.iter().map(|r| (r.time, r.kind)))
    }

    pub fn row_at(&self, t: usize) -> &BaRow {
        let times: Vec<_> = self.rows.iter().map(|r| (r.time, r.kind)).collect();
        &self.rows[active_row(&times, t)]
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::Sbm(s) => s.validate(),
            Schedule::Ba(s) => s.validate(),
        }
    }

    pub fn truth(&self) -> AnomalySchedule {
        match self {
            Schedule::Sbm(s) => s.truth(),
            Schedule::Ba(s) => s.truth(),
        }
    }

    pub fn total_steps(&self) -> usize {
        match self {
            Schedule::Sbm(s) => s.total_steps,
            Schedule::Ba(s) => s.total_steps,
        }
    }

    /// Attribute column the series carries, if any.
    pub fn attribute_column(&self) -> Option<&'static str> {
        match self {
            Schedule::Sbm(s) if s.has_attributes() => Some(LABEL_COLUMN),
            _ => None,
        }
    }

    pub fn generate(&self, seed: u64) -> Result<(Vec<Snapshot>, AnomalySchedule)> {
        match self {
            Schedule::Sbm(s) => generate_sbm_series(s, seed),
            Schedule::Ba(s) => generate_ba_series(s, seed),
        }
    }
}

/// Visit increasing positions in `0..total`, each kept with probability `p`,
/// by geometric skipping.
fn bernoulli_positions(total: u64, p: f64, rng: &mut ChaCha8Rng, mut visit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(visit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut pos = 0u64;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if skip >= (total - pos) as f64 {
            return;
        }
        pos += skip as u64;
        visit(pos);
        pos += 1;
        if pos >= total {
            return;
        }
    }
}

/// One SBM draw: each pair `i < j` is linked with `p_in` inside a community
/// and `p_out` across. Blocks are visited in `(a, b)` order with `a <= b`.
pub fn sample_sbm(sizes: &[usize], p_in: f64, p_out: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId, f64)> {
    let offsets: Vec<u64> = sizes
        .iter()
        .scan(0u64, |acc, &s| {
            let o = *acc;
            *acc += s as u64;
            Some(o)
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..sizes.len() {
        let (oa, sa) = (offsets[a], sizes[a] as u64);
        // upper triangle of block (a, a), row by row
        let total = sa * sa.saturating_sub(1) / 2;
        let (mut row, mut row_start) = (0u64, 0u64);
        bernoulli_positions(total, p_in, rng, |pos| {
            while pos >= row_start + (sa - 1 - row) {
                row_start += sa - 1 - row;
                row += 1;
            }
            let col = row + 1 + (pos - row_start);
            edges.push((oa + row, oa + col, 1.0));
        });
        for b in a + 1..sizes.len() {
            let (ob, sb) = (offsets[b], sizes[b] as u64);
            bernoulli_positions(sa * sb, p_out, rng, |pos| {
                edges.push((oa + pos / sb, ob + pos % sb, 1.0));
            });
        }
    }
    edges
}

fn sbm_labels(sizes: &[usize], mode: AttributeMode, rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let half = sizes.len() / 2;
    let mut labels = Vec::with_capacity(sizes.iter().sum());
    for (c, &s) in sizes.iter().enumerate() {
        for _ in 0..s {
            labels.push(match mode {
                AttributeMode::Heterogeneous => {
                    if rng.random_bool(0.5) {
                        LABEL_ONE
                    } else {
                        LABEL_TWO
                    }
                }
                _ => {
                    if c < half {
                        LABEL_ONE
                    } else {
                        LABEL_TWO
                    }
                }
            });
        }
    }
    labels
}

pub fn generate_sbm_series(schedule: &SbmSchedule, seed: u64) -> Result<(Vec<Snapshot>, AnomalySchedule)> {
    schedule.validate()?;
    let attributed = schedule.has_attributes();
    let snapshots = (1..=schedule.total_steps)
        .into_par_iter()
        .map(|t| {
            let row = schedule.row_at(t);
            let mut rng = stream_rng(seed, t as u64);
            let edges = sample_sbm(&row.community_sizes, row.p_in, row.p_out, &mut rng);
            let n = row.community_sizes.iter().sum::<usize>() as u64;
            let nodes: Vec<NodeId> = (0..n).collect();
            let attributes = if attributed {
                let labels = sbm_labels(&row.community_sizes, row.attributes, &mut rng);
                Some(AttributeTable::new(nodes.clone(), vec![AttributeColumn::categorical(LABEL_COLUMN, labels)])?)
            } else {
                None
            };
            Snapshot::build_with_nodes(t, &nodes, &edges, attributes).map_err(|e| e.at_timestep(t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((snapshots, schedule.truth()))
}

/// One Barabasi-Albert draw on `n` nodes: an `m`-clique seed, then each new
/// node links to `m` distinct existing nodes chosen proportionally to degree.
/// When no existing node has positive degree (only for `m = 1`), the target
/// is uniform.
pub fn sample_ba(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId, f64)> {
    let mut edges = Vec::with_capacity(m * (m.saturating_sub(1)) / 2 + m * n.saturating_sub(m));
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * m * n);
    for i in 0..m as u64 {
        for j in i + 1..m as u64 {
            edges.push((i, j, 1.0));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    for v in m as u64..n as u64 {
        targets.clear();
        while targets.len() < m {
            let cand = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&cand) {
                targets.push(cand);
            }
        }
        for &u in &targets {
            edges.push((u, v, 1.0));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    edges
}

pub fn generate_ba_series(schedule: &BaSchedule, seed: u64) -> Result<(Vec<Snapshot>, AnomalySchedule)> {
    schedule.validate()?;
    let nodes: Vec<NodeId> = (0..schedule.nodes as u64).collect();
    let snapshots = (1..=schedule.total_steps)
        .into_par_iter()
        .map(|t| {
            let m = schedule.row_at(t).m;
            let mut rng = stream_rng(seed, t as u64);
            let edges = sample_ba(schedule.nodes, m, &mut rng);
            Snapshot::build_with_nodes(t, &nodes, &edges, None).map_err(|e| e.at_timestep(t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((snapshots, schedule.truth()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    SbmHybrid,
    SbmAttribute,
    SbmEvolving,
    BaChange,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::SbmHybrid, Builtin::SbmAttribute, Builtin::SbmEvolving, Builtin::BaChange];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::SbmHybrid => "sbm_hybrid",
            Builtin::SbmAttribute => "sbm_attribute",
            Builtin::SbmEvolving => "sbm_evolving",
            Builtin::BaChange => "ba_change",
        }
    }

    /// Canonical schedule with community sizes and node counts multiplied by
    /// `scale`; probabilities and times are unchanged.
    pub fn schedule(&self, scale: f64) -> Result<Schedule> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ScpdError::InvalidConfig(format!("scale must be positive, got {scale}")));
        }
        let sz = |base: usize| -> Result<usize> {
            let s = (base as f64 * scale).round() as usize;
            if s < 2 {
                return Err(ScpdError::InvalidConfig(format!("scale {scale} shrinks a {base}-node block below 2 nodes")));
            }
            Ok(s)
        };
        let equal = |count: usize| -> Result<Vec<usize>> { Ok(vec![sz(1200 / count)?; count]) };
        const P_IN: f64 = 0.030;
        const P_OUT: f64 = 0.005;
        const P_EVENT: f64 = 0.015;
        let sbm_row = |time, kind, sizes: Vec<usize>, p_out, attributes| SbmRow {
            time,
            kind,
            community_sizes: sizes,
            p_in: P_IN,
            p_out,
            attributes,
        };
        use AttributeMode::{Heterogeneous as Het, Homogeneous as Hom, None as NoAttr};
        use RowKind::*;
        let schedule = match self {
            Builtin::SbmHybrid => Schedule::Sbm(SbmSchedule {
                total_steps: 151,
                rows: vec![
                    sbm_row(0, Start, equal(4)?, P_OUT, NoAttr),
                    sbm_row(16, Event, equal(4)?, P_EVENT, NoAttr),
                    sbm_row(31, ChangePoint, equal(10)?, P_OUT, NoAttr),
                    sbm_row(61, Event, equal(10)?, P_EVENT, NoAttr),
                    sbm_row(76, ChangePoint, equal(2)?, P_OUT, NoAttr),
                    sbm_row(91, Event, equal(2)?, P_EVENT, NoAttr),
                    sbm_row(106, ChangePoint, equal(4)?, P_OUT, NoAttr),
                    sbm_row(136, Event, equal(4)?, P_EVENT, NoAttr),
                ],
            }),
            Builtin::SbmAttribute => Schedule::Sbm(SbmSchedule {
                total_steps: 151,
                rows: vec![
                    sbm_row(0, Start, equal(4)?, P_OUT, Hom),
                    sbm_row(16, AttributeChangePoint, equal(4)?, P_OUT, Het),
                    sbm_row(31, ChangePoint, equal(10)?, P_OUT, Het),
                    sbm_row(61, AttributeChangePoint, equal(10)?, P_OUT, Hom),
                    sbm_row(76, ChangePoint, equal(2)?, P_OUT, Hom),
                    sbm_row(91, AttributeChangePoint, equal(2)?, P_OUT, Het),
                    sbm_row(106, ChangePoint, equal(4)?, P_OUT, Het),
                    sbm_row(136, AttributeChangePoint, equal(4)?, P_OUT, Hom),
                ],
            }),
            Builtin::SbmEvolving => {
                let (f, h) = (sz(300)?, sz(150)?);
                Schedule::Sbm(SbmSchedule {
                    total_steps: 151,
                    rows: vec![
                        sbm_row(0, Start, vec![f, f], P_OUT, NoAttr),
                        sbm_row(16, ChangePoint, vec![f, f, f], P_OUT, NoAttr),
                        sbm_row(31, ChangePoint, vec![f, f, f, f], P_OUT, NoAttr),
                        sbm_row(61, ChangePoint, vec![f, f, h, h, h, h], P_OUT, NoAttr),
                        sbm_row(76, ChangePoint, vec![f, f, f, f], P_OUT, NoAttr),
                        sbm_row(91, ChangePoint, vec![h, h, h, h, f, f], P_OUT, NoAttr),
                        sbm_row(106, ChangePoint, vec![f, f, f, f], P_OUT, NoAttr),
                        sbm_row(136, Event, vec![f, f, f, f], P_EVENT, NoAttr),
                    ],
                })
            }
            Builtin::BaChange => Schedule::Ba(BaSchedule {
                total_steps: 151,
                nodes: sz(500)?,
                rows: [(0, Start), (16, ChangePoint), (31, ChangePoint), (61, ChangePoint), (76, ChangePoint), (91, ChangePoint), (106, ChangePoint), (136, ChangePoint)]
                    .into_iter()
                    .enumerate()
                    .map(|(i, (time, kind))| BaRow { time, kind, m: i + 1 })
                    .collect(),
            }),
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

impl FromStr for Builtin {
    type Err = ScpdError;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| ScpdError::UnknownExperiment(s.to_string()))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Generate a builtin benchmark by name.
pub fn builtin_experiment(name: &str, scale: f64, seed: u64) -> Result<(Vec<Snapshot>, AnomalySchedule)> {
    name.parse::<Builtin>()?.schedule(scale)?.generate(seed)
}
