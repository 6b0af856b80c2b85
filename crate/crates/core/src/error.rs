use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("function has a jump of size {jump:e} at x = {at}")]
    Discontinuous { at: f64, jump: f64 },
    #[error("spectral parameter must be non-real, got {re}+{im}i")]
    RealSpectralParameter { re: f64, im: f64 },
    #[error("spectral parameter must lie in the {expected} half-plane, got {re}+{im}i")]
    WrongHalfPlane {
        expected: &'static str,
        re: f64,
        im: f64,
    },
    #[error("degenerate exponent: the resolvent of this term is not piecewise exponential")]
    DegenerateExponent,
    #[error("quadrature did not converge within {panels} panels")]
    QuadratureFailure { panels: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("block operator is not Krein-unitary (residual {0:e})")]
    NotKreinUnitary(f64),
    #[error("unitary has eigenvalue 1 (min singular value of U - I is {0:e})")]
    EigenvalueOne(f64),
    #[error("singular matrix in {context} (min singular value {sigma_min:e})")]
    Singular {
        context: &'static str,
        sigma_min: f64,
    },
    #[error("operator norm {0} exceeds 1")]
    NotContraction(f64),
    #[error("function is outside the maximal domain: {0}")]
    OutsideMaximalDomain(String),
    #[error("Green identity violated (residual {0:e})")]
    GreenIdentity(f64),
    #[error("boundary maps are not jointly surjective (rank {rank} < {needed})")]
    NotSurjective { rank: usize, needed: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample violates the boundary condition (residual {0:e})")]
    BoundaryCondition(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
