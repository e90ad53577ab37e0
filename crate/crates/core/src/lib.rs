//! Change point detection on dynamic graphs from spectral-density
//! signatures.
//!
//! Each snapshot is embedded as a binned density of states of its shifted
//! normalized Laplacian (KPM) and, optionally, one local density per
//! attribute label (Lanczos quadrature). A dual-window SVD scorer then ranks
//! timesteps by how far each signature departs from recent behaviour.

pub mod dos;
pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod scoring;

pub use dos::{embed_series, gql_ldos, kpm_dos, BinLayout, Damping, DosConfig, Embedding, SignatureKind, SignatureVector};
pub use error::{Result, ScpdError};
pub use eval::{hits_at_n, run_experiment, EmbeddingKind, ExperimentConfig, ExperimentReport, ExperimentSource, ScoreSource};
pub use generators::{builtin_experiment, AnomalyKind, AnomalySchedule, Builtin, Schedule};
pub use graph::{encode_attribute, AttributeColumn, AttributeTable, NodeId, Snapshot, SpectralOperator};
pub use oracle::{exact_histogram, exact_spectrum, lad_embedding, ExactSpectrum};
pub use scoring::{normal_behavior, score_attribute_series, score_series, ScoreSeries, ScoringConfig};
