use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, ScpdError>;

#[derive(Debug, Error)]
pub enum ScpdError {
    #[error("edge ({i}, {j}) has negative weight {w}")]
    NegativeWeight { i: NodeId, j: NodeId, w: f64 },

    #[error("edge ({i}, {j}) has non-finite weight {w}")]
    NonFiniteWeight { i: NodeId, j: NodeId, w: f64 },

    #[error("attribute table has {rows} rows but the snapshot has {nodes} nodes")]
    AttributeRowMismatch { rows: usize, nodes: usize },

    #[error("attribute table lists node {0} more than once")]
    DuplicateAttributeRow(NodeId),

    #[error("attribute column '{column}' has {got} values, expected {expected}")]
    ColumnLength { column: String, got: usize, expected: usize },

    #[error("unknown attribute column '{0}'")]
    UnknownColumn(String),

    #[error("numerical column '{0}' sums to zero; sum normalization is undefined")]
    ZeroSumColumn(String),

    #[error("numerical column '{0}' contains a non-finite value")]
    NonFiniteAttribute(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("start vector is zero")]
    ZeroVector,

    #[error("start vector has length {got}, operator dimension is {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("context window is empty")]
    EmptyContext,

    #[error("need at least {need} signatures, got {got}")]
    TooFewSignatures { need: usize, got: usize },

    #[error("label set is empty")]
    EmptyLabelSet,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),

    #[error("graph has {nodes} nodes, above the dense oracle cap of {cap}; use the KPM embedding instead")]
    SpectrumCapExceeded { nodes: usize, cap: usize },

    #[error("local histogram requested but the spectrum was computed without eigenvectors")]
    MissingEigenvectors,

    #[error("dense eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("score series ends at timestep {last} but ground truth reaches {needed}")]
    ScoresTooShort { last: usize, needed: usize },

    #[error("ground truth is empty")]
    EmptyTruth,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("timestep {t}: {source}")]
    AtTimestep {
        t: usize,
        #[source]
        source: Box<ScpdError>,
    },

    #[error("seed {seed}: {source}")]
    AtSeed {
        seed: u64,
        #[source]
        source: Box<ScpdError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ScpdError {
    pub fn at_timestep(self, t: usize) -> Self {
        ScpdError::AtTimestep { t, source: Box::new(self) }
    }

    pub fn at_seed(self, seed: u64) -> Self {
        ScpdError::AtSeed { seed, source: Box::new(self) }
    }

    /// True for failures caused by the numerical pipeline rather than by the
    /// input data or configuration.
    pub fn is_compute_error(&self) -> bool {
        match self {
            ScpdError::Eigen(_) | ScpdError::SpectrumCapExceeded { .. } => true,
            ScpdError::AtTimestep { source, .. } | ScpdError::AtSeed { source, .. } => {
                source.is_compute_error()
            }
            _ => false,
        }
    }
}
