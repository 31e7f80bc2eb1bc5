use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("vertex `{vertex}` referenced by {context} is not declared")]
    DanglingVertex { vertex: String, context: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("partition covers {got} vertices, expected {expected}")]
    PartitionDomain { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{n} vertices exceeds the exhaustive limit of {limit}; use the local-search strategy")]
    ExhaustiveLimit { n: usize, limit: usize },

    #[error("total dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown subsystem or party label `{0}`")]
    UnknownLabel(String),

    #[error("overlapping party groups: subsystem `{0}` appears twice")]
    OverlappingGroups(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not an isometry/unitary (deviation {0:.3e})")]
    NotIsometric(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("missing channel weight for edge `{edge}` with signature {signature:?}")]
    MissingWeight { edge: String, signature: Vec<u8> },

    #[error("b*epsilon = {0} >= 1, the bound is unbounded")]
    UnboundedConstraint(f64),

    #[error("no admissible partition: {0}")]
    NoAdmissiblePartition(String),

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("invalid hypergraph operation: {0}")]
    Hypergraph(String),

    #[error("instance has {got} hyperedges, exhaustive limit is {limit}")]
    HyperedgeLimit { got: usize, limit: usize },

    #[error("qubit cap exceeded: {got} > {cap}")]
    QubitCap { got: usize, cap: usize },

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("invalid script: {0}")]
    Script(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
