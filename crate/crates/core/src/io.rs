//! Flat-file formats.
//!
//! * Edge list: one `t,i,j[,w]` record per line, `w` defaulting to 1.0;
//!   lines starting with `#` are comments.
//! * Attributes: CSV with header `t,node_id,name:kind,...`, where `kind` is
//!   `categorical` or `numerical`.
//! * Signatures: CSV `t,kind,label,b0..b{k-1}`.
//! * Scores: CSV `t,Z,Zstar`.
//!
//! Floats are written in shortest round-trip form, so output is
//! byte-identical across runs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::dos::Embedding;
use crate::error::{Result, ScpdError};
use crate::graph::{AttributeColumn, AttributeTable, ColumnKind, ColumnValues, NodeId, Snapshot};
use crate::scoring::ScoreSeries;

pub type EdgeRecords = BTreeMap<usize, Vec<(NodeId, NodeId, f64)>>;

fn reader_builder() -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.flexible(true).trim(csv::Trim::All);
    b
}

fn line_of(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn csv_error(e: csv::Error) -> ScpdError {
    let line = e.position().map(|p| p.line() as usize);
    match line {
        Some(line) => ScpdError::Parse { line, msg: e.to_string() },
        None => ScpdError::Csv(e),
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| ScpdError::Parse { line: line_of(rec), msg: format!("invalid {name} '{raw}'") })
}

/// Parse an edge list into per-timestep edge records.
pub fn read_edge_list(input: impl Read) -> Result<EdgeRecords> {
    let mut out = EdgeRecords::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(ScpdError::Parse {
                line: lineno,
                msg: format!("expected t,i,j[,w], got {} fields", fields.len()),
            });
        }
        let parse_err = |name: &str, raw: &str| ScpdError::Parse { line: lineno, msg: format!("invalid {name} '{raw}'") };
        let t: usize = fields[0].parse().map_err(|_| parse_err("timestep", fields[0]))?;
        let i: NodeId = fields[1].parse().map_err(|_| parse_err("node id", fields[1]))?;
        let j: NodeId = fields[2].parse().map_err(|_| parse_err("node id", fields[2]))?;
        let w: f64 = match fields.get(3) {
            Some(raw) => raw.parse().map_err(|_| parse_err("weight", raw))?,
            None => 1.0,
        };
        out.entry(t).or_default().push((i, j, w));
    }
    Ok(out)
}

pub fn write_edge_list(out: impl Write, snapshots: &[Snapshot]) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "# t,i,j,w")?;
    for s in snapshots {
        for (i, j, wt) in s.edges() {
            writeln!(w, "{},{},{},{}", s.timestep(), i, j, wt)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parse an attribute file into one table per timestep, rows in file order.
pub fn read_attributes(input: impl Read) -> Result<BTreeMap<usize, AttributeTable>> {
    let mut rdr = reader_builder().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || header.get(0) != Some("t") || header.get(1) != Some("node_id") {
        return Err(ScpdError::Parse { line: 1, msg: "header must start with t,node_id".into() });
    }
    let mut schema = Vec::new();
    for h in header.iter().skip(2) {
        let (name, kind) = h
            .rsplit_once(':')
            .ok_or_else(|| ScpdError::Parse { line: 1, msg: format!("column '{h}' lacks a :kind suffix") })?;
        let kind = match kind {
            "categorical" => ColumnKind::Categorical,
            "numerical" => ColumnKind::Numerical,
            other => return Err(ScpdError::Parse { line: 1, msg: format!("unknown column kind '{other}'") }),
        };
        schema.push((name.to_string(), kind));
    }

    struct Partial {
        ids: Vec<NodeId>,
        columns: Vec<ColumnValues>,
    }
    let mut per_t: BTreeMap<usize, Partial> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != header.len() {
            return Err(ScpdError::Parse {
                line: line_of(&rec),
                msg: format!("expected {} fields, got {}", header.len(), rec.len()),
            });
        }
        let t: usize = field(&rec, 0, "timestep")?;
        let id: NodeId = field(&rec, 1, "node id")?;
        let part = per_t.entry(t).or_insert_with(|| Partial {
            ids: Vec::new(),
            columns: schema
                .iter()
                .map(|(_, k)| match k {
                    ColumnKind::Categorical => ColumnValues::Categorical(Vec::new()),
                    ColumnKind::Numerical => ColumnValues::Numerical(Vec::new()),
                })
                .collect(),
        });
        part.ids.push(id);
        for (c, values) in part.columns.iter_mut().enumerate() {
            match values {
                ColumnValues::Categorical(v) => v.push(rec.get(c + 2).unwrap_or("").to_string()),
                ColumnValues::Numerical(v) => v.push(field(&rec, c + 2, &schema[c].0)?),
            }
        }
    }
    per_t
        .into_iter()
        .map(|(t, p)| {
            let columns = schema
                .iter()
                .zip(p.columns)
                .map(|((name, _), values)| AttributeColumn { name: name.clone(), values })
                .collect();
            Ok((t, AttributeTable::new(p.ids, columns)?))
        })
        .collect()
}

/// Write attribute tables of every snapshot that has one. All tables must
/// share the column schema of the first.
pub fn write_attributes(out: impl Write, snapshots: &[Snapshot]) -> Result<()> {
    let mut tables = snapshots.iter().filter_map(|s| s.attributes().map(|a| (s.timestep(), a))).peekable();
    let Some((_, first)) = tables.peek() else {
        return Err(ScpdError::InvalidConfig("no snapshot carries attributes".into()));
    };
    let schema: Vec<(String, ColumnKind)> = first.columns().iter().map(|c| (c.name.clone(), c.kind())).collect();
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut header = vec!["t".to_string(), "node_id".to_string()];
    header.extend(schema.iter().map(|(n, k)| {
        format!("{n}:{}", if *k == ColumnKind::Categorical { "categorical" } else { "numerical" })
    }));
    w.write_record(&header)?;
    for (t, tbl) in tables {
        let cols: Vec<&AttributeColumn> = schema
            .iter()
            .map(|(n, _)| tbl.column(n).ok_or_else(|| ScpdError::UnknownColumn(n.clone())))
            .collect::<Result<_>>()?;
        for (r, id) in tbl.node_ids().iter().enumerate() {
            let mut row = vec![t.to_string(), id.to_string()];
            for c in &cols {
                row.push(match &c.values {
                    ColumnValues::Categorical(v) => v[r].clone(),
                    ColumnValues::Numerical(v) => v[r].to_string(),
                });
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Assemble snapshots from parsed records. The timestep set is the union of
/// both inputs; nodes listed only in the attribute table are kept as
/// isolated nodes.
pub fn assemble_series(
    mut edges: EdgeRecords,
    mut attributes: BTreeMap<usize, AttributeTable>,
) -> Result<Vec<Snapshot>> {
    let mut timesteps: Vec<usize> = edges.keys().chain(attributes.keys()).copied().collect();
    timesteps.sort_unstable();
    timesteps.dedup();
    timesteps
        .into_iter()
        .map(|t| {
            let e = edges.remove(&t).unwrap_or_default();
            let a = attributes.remove(&t);
            Snapshot::build(t, &e, a).map_err(|err| err.at_timestep(t))
        })
        .collect()
}

/// Read an edge list and optional attribute file from disk.
pub fn load_series(edges: &Path, attributes: Option<&Path>) -> Result<Vec<Snapshot>> {
    let e = read_edge_list(BufReader::new(File::open(edges)?))?;
    let a = match attributes {
        Some(p) => read_attributes(BufReader::new(File::open(p)?))?,
        None => BTreeMap::new(),
    };
    assemble_series(e, a)
}

pub fn write_signatures(out: impl Write, embeddings: &[Embedding]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let k = embeddings.first().map(|e| e.global.bins.len()).unwrap_or(0);
    let mut header = vec!["t".to_string(), "kind".to_string(), "label".to_string()];
    header.extend((0..k).map(|i| format!("b{i}")));
    w.write_record(&header)?;
    for e in embeddings {
        let sigs = std::iter::once(&e.global).chain(e.local.iter().flatten());
        for sig in sigs {
            let mut row = vec![e.timestep.to_string(), sig.kind.name().to_string(), sig.kind.label().to_string()];
            row.extend(sig.bins.iter().map(|b| b.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_scores(out: impl Write, scores: &ScoreSeries) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(["t", "Z", "Zstar"])?;
    for i in 0..scores.len() {
        w.write_record([scores.timesteps[i].to_string(), scores.z[i].to_string(), scores.z_star[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores(input: impl Read) -> Result<ScoreSeries> {
    let mut rdr = reader_builder().has_headers(true).from_reader(input);
    let mut s = ScoreSeries { timesteps: Vec::new(), z: Vec::new(), z_star: Vec::new() };
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        s.timesteps.push(field(&rec, 0, "timestep")?);
        s.z.push(field(&rec, 1, "Z")?);
        s.z_star.push(field(&rec, 2, "Zstar")?);
    }
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
