use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {rows}x{cols} exceeds the configured cap of {cap}")]
    DimensionOverflow { rows: usize, cols: usize, cap: usize },

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("decomposition did not converge: {0}")]
    NoConvergence(String),

    #[error("no null vector: smallest singular value {sigma_min:.3e} above threshold {threshold:.3e}")]
    NoNullVector { sigma_min: f64, threshold: f64 },

    #[error("null space is degenerate: sigma_min = {sigma_min:.3e}, sigma_next = {sigma_next:.3e}")]
    DegenerateNullSpace { sigma_min: f64, sigma_next: f64 },

    #[error("singular linear system (condition estimate {condition_estimate:.3e})")]
    SingularSystem { condition_estimate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("dissipator builder expects {expected} mode, configuration is {found}")]
    WrongMode { expected: &'static str, found: &'static str },

    #[error("expected {expected} reservoir entries, found {found}")]
    ReservoirCount { expected: usize, found: usize },

    #[error("steady state is not unique: sigma_min = {sigma_min:.3e}, sigma_next = {sigma_next:.3e}")]
    DegenerateSteadyState { sigma_min: f64, sigma_next: f64 },

    #[error("steady state is unphysical: minimum eigenvalue {min_eigenvalue:.3e}")]
    UnphysicalState { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("battery state differs across the stationary manifold (spread {spread:.3e})")]
    AmbiguousBatteryState { spread: f64 },

    #[error("ergotropy normalization undefined for omega0 = 0")]
    UndefinedNormalization,

    #[error("trace drift {drift:.3e} exceeds the allowed bound; reduce the step size")]
    TraceDrift { drift: f64 },

    /// `line` is 1-based; 0 marks a command-line override.
    #[error("{}", parse_location(*line, message))]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NoConvergence(_) => "no_convergence",
            Error::NoNullVector { .. } => "no_null_vector",
            Error::DegenerateNullSpace { .. } => "degenerate_null_space",
            Error::SingularSystem { .. } => "singular_system",
            Error::InvalidConfig(_) => "invalid_config",
            Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::NonPositiveTemperature(_) => "non_positive_temperature",
            Error::WrongMode { .. } => "wrong_mode",
            Error::ReservoirCount { .. } => "reservoir_count",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::UnphysicalState { .. } => "unphysical_state",
            Error::InvalidDensity(_) => "invalid_density",
            Error::AmbiguousBatteryState { .. } => "ambiguous_battery_state",
            Error::UndefinedNormalization => "undefined_normalization",
            Error::TraceDrift { .. } => "trace_drift",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }

    /// True for errors caused by the user's input rather than the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::Parse { .. }
                | Error::NonPositiveTemperature(_)
                | Error::ReservoirCount { .. }
                | Error::UndefinedNormalization
                | Error::DimensionOverflow { .. }
        )
    }
}

fn parse_location(line: usize, message: &str) -> String {
    if line == 0 {
        format!("override: {message}")
    } else {
        format!("line {line}: {message}")
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
