use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot convert between {from} and {to}: different dimensions")]
    DimensionMismatch { from: String, to: String },

    #[error("unknown unit '{0}'")]
    UnknownUnit(String),

    #[error("model fit failed for {what}: {reason}")]
    ModelFit { what: String, reason: String },

    #[error("table ingestion failed at line {line}: {reason}")]
    Ingestion { line: usize, reason: String },

    #[error("table evaluated outside its radial grid at R = {r} (grid [{min}, {max}])")]
    OutOfGrid { r: f64, min: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("energy {energy} Eh lies below every open threshold")]
    BelowThreshold { energy: f64 },

    #[error("propagation failed: singular matrix at R = {r}")]
    Singular { r: f64 },

    #[error("r_min = {r_min} is not deep enough in the classically forbidden region")]
    StartNotForbidden { r_min: f64 },

    #[error("scattering matrix check failed: {0}")]
    MatchingCheck(String),

    #[error("not converged: {0}")]
    Convergence(String),

    #[error("energy grid does not cover the thermal window: {0}")]
    Coverage(String),

    #[error("classically forbidden crossing: E - U = {excess} Eh")]
    ClassicallyForbidden { excess: f64 },

    #[error("network topology error: {0}")]
    Topology(String),

    #[error("archive error: {0}")]
    Archive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the batch driver: 2 for input problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::UnknownUnit(_)
            | Error::Ingestion { .. }
            | Error::Config(_)
            | Error::Io(_)
            | Error::Archive(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
