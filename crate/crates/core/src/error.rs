use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("arithmetic overflow")]
    Overflow,

    #[error("schedule is empty")]
    EmptySchedule,

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("unsupported relation: {0}")]
    UnsupportedRelation(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed distance table: {0}")]
    MalformedDistance(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Checked arithmetic helpers that surface overflow as [`Error::Overflow`].
pub(crate) trait Checked: Sized {
    fn add_c(self, rhs: Self) -> Result<Self>;
    fn mul_c(self, rhs: Self) -> Result<Self>;
}

impl Checked for i64 {
    #[inline]
    fn add_c(self, rhs: i64) -> Result<i64> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }
    #[inline]
    fn mul_c(self, rhs: i64) -> Result<i64> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }
}

impl Checked for i128 {
    #[inline]
    fn add_c(self, rhs: i128) -> Result<i128> {
        self.checked_add(rhs).ok_or(Error::Overflow)
    }
    #[inline]
    fn mul_c(self, rhs: i128) -> Result<i128> {
        self.checked_mul(rhs).ok_or(Error::Overflow)
    }
}
