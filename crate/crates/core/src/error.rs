use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("problem file: {0}")]
    Parse(String),

    #[error("missing self energy for residue {residue}, rotamer {rotamer}")]
    MissingSelfEnergy { residue: usize, rotamer: usize },

    #[error("duplicate self energy for residue {residue}, rotamer {rotamer}")]
    DuplicateSelfEnergy { residue: usize, rotamer: usize },

    #[error(
        "asymmetric pair energy between ({res_i},{rot_i}) and ({res_j},{rot_j}): {forward} vs {backward}"
    )]
    AsymmetricPair {
        res_i: usize,
        rot_i: usize,
        res_j: usize,
        rot_j: usize,
        forward: f64,
        backward: f64,
    },

    #[error("pair energy between residues {res_i} and {res_j} is not allowed in nearest-neighbor mode")]
    NonAdjacentPair { res_i: usize, res_j: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("penalty coefficient must be positive, got {0}")]
    NonPositivePenalty(f64),

    #[error("matrix is not symmetric: Q[{row}][{col}] = {upper} but Q[{col}][{row}] = {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("bitstring length {got} does not match problem dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("too many qubits: {0} (at most {1} supported here)")]
    TooManyQubits(usize, usize),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("expected {expected} ansatz parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("brute force would enumerate {count} configurations, above the cap of {cap}")]
    EnumerationCap { count: f64, cap: u64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
