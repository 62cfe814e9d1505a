use thiserror::Error;

pub type Result<T> = std::result::Result<T, LocError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocError {
    /// A position coincides with a sensor, the sensors coincide, or the
    /// pseudo-linear matrix lost rank.
    #[error("DegenerateGeometry: {0}")]
    DegenerateGeometry(String),

    /// Elevation too close to ±90°: azimuth is undefined and the azimuth
    /// row of the noise map vanishes.
    #[error("NearSingularElevation: {0}")]
    NearSingularElevation(String),

    #[error("SingularSystem: reciprocal condition number {rcond:e} below tolerance {tolerance:e}")]
    SingularSystem { rcond: f64, tolerance: f64 },

    #[error("ConfigError: {0}")]
    Config(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<LocError>,
    },
}

impl LocError {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        LocError::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }

    /// The innermost error, with iteration context stripped.
    pub fn root(&self) -> &LocError {
        match self {
            LocError::AtIteration { source, .. } => source.root(),
            other => other,
        }
    }

    /// Stable variant name of the root cause.
    pub fn name(&self) -> &'static str {
        match self.root() {
            LocError::DegenerateGeometry(_) => "DegenerateGeometry",
            LocError::NearSingularElevation(_) => "NearSingularElevation",
            LocError::SingularSystem { .. } => "SingularSystem",
            LocError::Config(_) => "ConfigError",
            LocError::AtIteration { .. } => unreachable!("root() never returns AtIteration"),
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self.root(), LocError::Config(_))
    }
}
