use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("photon/phonon modes are degenerate (kappa = 0 and omega_b = omega_c)")]
    DegenerateTwoMode,
    #[error("sector dimension {dim} exceeds the cap of {cap}")]
    SizeLimit { dim: usize, cap: usize },
    #[error("argument {x} hits the pole at {pole}")]
    PoleHit { x: f64, pole: f64 },
    #[error("an effective coupling Gamma_j vanishes")]
    GammaZero,
    #[error("dressed eigenvalues are degenerate (minimum gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },
    #[error("division by zero")]
    DivideByZero,
    #[error("omega_b and omega_c are not resonant")]
    NotResonant,
    #[error("couplings must be real (kappa real positive) in the resonant analysis")]
    ComplexCouplings,
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("{energy} is not an eigenvalue (residual {residual:e})")]
    NotAnEigenvalue { energy: f64, residual: f64 },
    #[error("operation requires the one-excitation sector, got sector {ell}")]
    WrongSector { ell: usize },
    #[error("operation requires the harmonic-oscillator atom")]
    WrongAtomKind,
    #[error("tuning condition not satisfied (residual {residual:e})")]
    TuningNotSatisfied { residual: f64 },
    #[error("operation requires kappa = 0")]
    KappaNonzero,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("numerical check failed: {0}")]
    Numerical(String),
}
