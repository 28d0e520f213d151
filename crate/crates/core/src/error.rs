use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("boundary vertex {0} listed more than once")]
    RepeatedBoundary(usize),
    #[error("boundary must contain at least one vertex")]
    EmptyBoundary,
    #[error("inflow has {got} amplitudes but the graph has {expected} boundary vertices")]
    InflowLength { expected: usize, got: usize },
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("frequency {0} is not on the unit circle")]
    NotUnitModulus(num_complex::Complex64),
    #[error("{0} is singular at this frequency")]
    Singular(&'static str),
    #[error("eigenvalue computation did not converge")]
    EigenFailure,
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("no internally supported kernel vector at this frequency")]
    EmptyKernel,
    #[error("singular set disagreement: {0}")]
    SingularSetMismatch(String),
    #[error("iteration did not converge after {iterations} steps (last step {last_delta:.3e})")]
    NonConvergence { iterations: usize, last_delta: f64 },
    #[error("boundary injections must sum to zero (sum = {0:.3e})")]
    NonzeroInjectionSum(f64),
    #[error("scattering matrix deviates from unitarity by {0:.3e}")]
    UnitarityViolation(f64),
    #[error("{what}: residual {residual:.3e}")]
    Residual { what: &'static str, residual: f64 },
    #[error("comfortability paths disagree by {0:.3e}")]
    PathDisagreement(f64),
    #[error("invalid complete-graph parameters: {0}")]
    CompleteParams(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
