use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration model failed to produce a simple graph after {attempts} restarts")]
    GenerationFailed { attempts: usize },
    #[error("node {node} out of range for a graph with {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetheError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no convergence after {iterations} iterations (last value {last}, residual {residual:e})")]
    IterationLimit { last: f64, iterations: usize, residual: f64 },
    #[error("exhaustive neighbor sum over 2^{z} configurations is not supported (max z = {max})")]
    TooManyNeighbors { z: usize, max: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("invalid cost matrix: {0}")]
    InvalidCosts(String),
    #[error("brute force limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColoringError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coloring has length {got}, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("color {color} out of range 1..={q}")]
    ColorOutOfRange { color: usize, q: usize },
    #[error("coloring is not proper: {conflicts} monochromatic edges")]
    IllegalColoring { conflicts: usize },
    #[error("exhaustive search over {q}^{n} colorings exceeds the budget")]
    BudgetExceeded { n: usize, q: usize },
    #[error("empty color list has no forbidden-color image")]
    EmptyList,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurveyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("every incoming warning combination forbids all colors")]
    AllForbidden,
    #[error("population collapsed: {retries} consecutive all-forbidden draws")]
    PopulationCollapse { retries: usize },
    #[error("{rejected} of {total} samples had a zero-probability log argument")]
    Unstable { rejected: usize, total: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
