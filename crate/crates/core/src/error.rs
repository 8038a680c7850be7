use thiserror::Error;

/// Every failure mode reported by the library.
///
/// Numerical quantities inside variants are stored as `f64` regardless of the working precision
/// so that the error type is not generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {pivot_index} below tolerance")]
    SingularMatrix { pivot_index: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("contour passes too close to the spectrum (idempotence defect {defect:.3e} after {nodes} nodes)")]
    ContourTooClose { defect: f64, nodes: usize },
    #[error("subspaces are not complementary (gap {gap:.3e}){}", at_mu(.mu))]
    NotComplementary { gap: f64, mu: Option<(f64, f64)> },
    #[error("matrix is not idempotent (defect {defect:.3e})")]
    NotIdempotent { defect: f64 },
    #[error("gram matrix is not Hermitian positive definite")]
    GramNotPD,
    #[error("basis is rank deficient (relative smallest singular value {ratio:.3e})")]
    RankDeficient { ratio: f64 },
    #[error("covector must be nonzero")]
    ZeroCovector,
    #[error("leading coefficient is not invertible")]
    LeadingCoefficientSingular,
    #[error("Dirichlet component of the range vanishes; graph condition fails")]
    GraphConditionFailed,
    #[error("operator Id + C - C* is not invertible")]
    NotInvertible,
    #[error("ODE integration failed at z = {z:.6e} (step {stepsize:.3e})")]
    IntegrationFailure { z: f64, stepsize: f64 },
    #[error("operation requires an interval fibre, got a point fibre")]
    PointFibre,
    #[error("side condition rg(Pi) ∩ rg(T) = 0 violated (overlap {overlap:.3e})")]
    SideConditionViolated { overlap: f64 },
    #[error("unique continuation fails: a kernel vector is supported in the plus side")]
    UCPViolated,
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("one-sided trace unstable (report {report:.3e} > tol {tol:.3e})")]
    TraceUnstable { report: f64, tol: f64 },
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

fn at_mu(mu: &Option<(f64, f64)>) -> String {
    match mu {
        Some((tau, eta)) => format!(" at mu = ({tau}, {eta})"),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
