//! Spectral-density signature vectors.
//!
//! The global density of states is estimated with the Kernel Polynomial
//! Method ([`kpm_dos`]); the attribute-conditioned local density of states
//! with Lanczos-based Gauss quadrature ([`gql_ldos`]). Both are binned into
//! `k` equal-width bins over the `H` spectrum `[-1, 1]` (see [`BinLayout`]).

mod gql;
mod kpm;

pub use gql::{gql_ldos, lanczos, tridiagonal_eigen, LanczosRun};
pub use kpm::{chebyshev_histogram, jackson_coefficients, kpm_dos, kpm_moments, rademacher_probes, ChebyshevMoments};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpdError};
use crate::graph::{encode_attribute, Snapshot, SpectralOperator};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Damping {
    Jackson,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosConfig {
    /// Number of probe vectors for the trace estimator.
    pub n_probe: usize,
    /// Number of Chebyshev moments (KPM) and Lanczos steps (GQL).
    pub n_moments: usize,
    pub n_bins: usize,
    pub seed: u64,
    pub damping: Damping,
    /// Derive an independent probe stream per timestep from `seed`. When
    /// off, every snapshot reuses the same probe stream.
    pub per_timestep_seeds: bool,
}

impl Default for DosConfig {
    fn default() -> Self {
        DosConfig {
            n_probe: 100,
            n_moments: 20,
            n_bins: 50,
            seed: 0,
            damping: Damping::Jackson,
            per_timestep_seeds: true,
        }
    }
}

impl DosConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_probe < 1 {
            return Err(ScpdError::InvalidConfig("n_probe must be at least 1".into()));
        }
        if self.n_moments < 2 {
            return Err(ScpdError::InvalidConfig("n_moments must be at least 2".into()));
        }
        if self.n_bins < 2 {
            return Err(ScpdError::InvalidConfig("n_bins must be at least 2".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> BinLayout {
        BinLayout::new(self.n_bins)
    }

    /// Probe seed used for the snapshot at `timestep`.
    pub fn probe_seed(&self, timestep: usize) -> u64 {
        if self.per_timestep_seeds {
            derive_seed(self.seed, timestep as u64)
        } else {
            self.seed
        }
    }
}

/// `k` equal-width bins over `[-1, 1]`.
///
/// Bins are left-closed `[a, b)` except the last, which is closed `[a, 1]`,
/// so a value on an interior edge lands in the bin to its right. Values within
/// `1e-9` bin widths below an edge are snapped onto it, which keeps
/// histograms of rounded eigenvalues deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinLayout {
    k: usize,
}

const EDGE_SNAP: f64 = 1e-9;

impl BinLayout {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need at least one bin");
        BinLayout { k }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Edge `i` for `i` in `0..=k`.
    pub fn edge(&self, i: usize) -> f64 {
        if i == self.k {
            1.0
        } else {
            -1.0 + 2.0 * i as f64 / self.k as f64
        }
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let pos = (x + 1.0) * self.k as f64 / 2.0;
        let idx = (pos + EDGE_SNAP).floor();
        if idx <= 0.0 {
            0
        } else {
            (idx as usize).min(self.k - 1)
        }
    }

    /// Histogram of `values` with per-value `weights`.
    pub fn histogram(&self, values: impl IntoIterator<Item = (f64, f64)>) -> Vec<f64> {
        let mut bins = vec![0.0; self.k];
        for (x, w) in values {
            bins[self.bin_of(x)] += w;
        }
        bins
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum SignatureKind {
    GlobalDos,
    LocalDos(String),
    Lad,
}

impl SignatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignatureKind::GlobalDos => "global_dos",
            SignatureKind::LocalDos(_) => "local_dos",
            SignatureKind::Lad => "lad",
        }
    }

    pub fn label(&self) -> &str {
        match self {
            SignatureKind::LocalDos(l) => l,
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureVector {
    pub bins: Vec<f64>,
    pub kind: SignatureKind,
    pub timestep: usize,
}

impl SignatureVector {
    pub fn mass(&self) -> f64 {
        self.bins.iter().sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.bins.iter().map(|b| b * b).sum::<f64>().sqrt()
    }

    /// Unit-L2 copy; a zero vector stays zero.
    pub fn l2_normalized(&self) -> SignatureVector {
        SignatureVector {
            bins: l2_normalize(&self.bins),
            kind: self.kind.clone(),
            timestep: self.timestep,
        }
    }
}

pub(crate) fn l2_normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter().map(|b| b / norm).collect()
    } else {
        v.to_vec()
    }
}

/// Signature vectors of one snapshot, L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub timestep: usize,
    pub global: SignatureVector,
    pub local: Option<Vec<SignatureVector>>,
}

/// Embed every snapshot: one global DOS vector each and, when `attribute`
/// is given, one LDOS vector per encoded label. All outputs are
/// L2-normalized. Snapshots are embedded in parallel; results are identical
/// to sequential execution.
pub fn embed_series(graphs: &[Snapshot], cfg: &DosConfig, attribute: Option<&str>) -> Result<Vec<Embedding>> {
    cfg.validate()?;
    if graphs.is_empty() {
        return Err(ScpdError::TooFewSignatures { need: 1, got: 0 });
    }
    graphs
        .par_iter()
        .map(|g| embed_snapshot(g, cfg, attribute).map_err(|e| e.at_timestep(g.timestep())))
        .collect()
}

fn embed_snapshot(g: &Snapshot, cfg: &DosConfig, attribute: Option<&str>) -> Result<Embedding> {
    let op = SpectralOperator::new(g);
    let global = kpm_dos(&op, cfg)?.l2_normalized();
    let local = match attribute {
        None => None,
        Some(column) => {
            let tbl = g.attributes().ok_or_else(|| ScpdError::UnknownColumn(column.to_string()))?;
            let mut out = Vec::new();
            for (label, v) in encode_attribute(tbl, column)? {
                let mut sig = gql_ldos(&op, &v, cfg)?;
                sig.kind = SignatureKind::LocalDos(label);
                out.push(sig.l2_normalized());
            }
            Some(out)
        }
    };
    Ok(Embedding { timestep: g.timestep(), global, local })
}
