use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // wavelet
    #[error("unsupported filter order {0} (supported: 2, 4, 8)")]
    UnsupportedFilterOrder(usize),
    #[error("degenerate refinement spectrum: {0}")]
    DegenerateRefinementSpectrum(String),
    #[error("incompatible grids")]
    IncompatibleGrids,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    // parsing / io
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("orbital index exceeds NORB at line {line}: index {index} > {norb}")]
    OrbitalIndexOutOfRange { line: usize, index: usize, norb: usize },
    #[error("inconsistent integral record at line {line}: {msg}")]
    InconsistentIntegral { line: usize, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    // hamiltonian
    #[error("invalid integrals: {0}")]
    InvalidIntegrals(String),
    #[error("invalid active space: {0}")]
    InvalidActiveSpace(String),
    #[error("cannot remove occupied orbital {0}")]
    CannotRemoveOccupied(usize),
    #[error("MP2 denominator degeneracy for excitation {0}")]
    Mp2Degeneracy(String),

    // qubit algebra
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("symmetry violated by term {0}")]
    SymmetryViolated(String),
    #[error("non-Hermitian observable: term {term} has coefficient {coeff}")]
    NonHermitian { term: String, coeff: String },

    // circuits
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("excitation breaks symmetry sector: {0}")]
    ExcitationBreaksSector(String),
    #[error("fold factor must be an odd positive integer, got {0}")]
    InvalidFoldFactor(usize),

    // backend
    #[error("parameter count mismatch: circuit expects {expected}, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("shots must be positive")]
    ZeroShots,
    #[error("coupling pair not calibrated: [{0}, {1}]")]
    CouplingNotCalibrated(usize, usize),
    #[error("density simulation size cap: {0} qubits exceeds the limit of {1}")]
    DensitySizeCap(usize, usize),
    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    // mitigation
    #[error("non-invertible calibration on qubit {0}")]
    NonInvertibleCalibration(usize),
    #[error("invalid ZNE series: {0}")]
    InvalidZneSeries(String),

    // solver
    #[error("non-finite energy encountered: {0}")]
    NonFiniteEnergy(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    // analysis
    #[error("minimum not bracketed: {0}")]
    MinimumNotBracketed(String),
    #[error("saddle or noise: fitted curvature {0} is not positive")]
    SaddleOrNoise(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("missing fixture: {0}")]
    MissingFixture(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
