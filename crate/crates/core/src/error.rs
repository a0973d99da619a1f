use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid boundary {0:?}, expected \"open-box\" or \"torus\"")]
    InvalidBoundary(String),
    #[error("density must be finite and non-negative, got {0}")]
    InvalidDensity(f64),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("point at index {index} ({x}, {y}) lies outside the region")]
    PointOutsideRegion { index: usize, x: f64, y: f64 },
    #[error("mask has length {got}, graph has {expected} nodes")]
    MaskLength { expected: usize, got: usize },
    #[error("crossings are undefined on a torus")]
    CrossingOnTorus,
    #[error("rectangle {0} does not lie inside the region")]
    RectOutsideRegion(String),
    #[error("node {node} out of range for a graph with {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    Probability { name: String, value: f64 },
    #[error("degree table must be non-empty")]
    EmptyTable,
    #[error("cannot parse failure rule {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("failure rule must be {expected} in the degree")]
    NotMonotone { expected: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("threshold distribution needs at least one piece")]
    Empty,
    #[error("piece {index}: {reason}")]
    Piece { index: usize, reason: String },
    #[error("pieces must partition (0, 1): {0}")]
    Partition(String),
    #[error("total mass is {mass}, expected 1")]
    Mass { mass: f64 },
    #[error("cannot parse threshold distribution {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("vulnerability is undefined for degree 0")]
    ZeroDegree,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("lambda = {lambda} is not above the critical density {lambda_c}")]
    Subcritical { lambda: f64, lambda_c: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("series did not reach tolerance {tolerance} within {max_terms} terms")]
    NotConverged { tolerance: f64, max_terms: usize },
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("initial interval [{lo}, {hi}] does not bracket the 0.5 crossing (p = {p_lo}, {p_hi})")]
    NotBracketing { lo: f64, hi: f64, p_lo: f64, p_hi: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: field `{field}`: {reason}")]
    Schema {
        path: String,
        field: String,
        reason: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
