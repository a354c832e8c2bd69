use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} is not inside the open unit disc")]
    OutsideDisc(String),

    #[error("point {point} is not inside the domain {domain}")]
    OutsideDomain { domain: String, point: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("value is not unimodular: |{0}| != 1")]
    NotUnimodular(String),

    #[error("non-finite component in {0}")]
    NonFinite(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no linear left inverse found (residual {residual:.3e})")]
    NoLinearLeftInverse { residual: f64 },

    #[error("invalid competitor: {0}")]
    InvalidCompetitor(String),

    #[error("invalid geodesic parameters: {0}")]
    InvalidGeodesic(String),

    #[error("uncertified: achieved width {width:.3e} exceeds target {target:.3e}")]
    Uncertified { width: f64, target: f64 },

    #[error("no admissible disc found: {0}")]
    NoAdmissibleDisc(String),

    #[error("insufficient certification: {skipped} of {total} pairs skipped")]
    InsufficientCertification { skipped: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
