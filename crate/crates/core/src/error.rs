use alloc::string::String;
use core::fmt;

use crate::cx::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A base with modulus at least one where convergence needs less.
    NonConvergent(&'static str),
    /// An infinite product did not reach its tail bound within the term budget.
    TruncationFailure { terms: usize },
    DomainError(&'static str),
    PoleHit { at: C64 },
    BalancingViolation { deviation: f64 },
    NonTerminating,
    NotConverged { est_error: f64 },
    ResourceLimit { requested: u64, limit: u64 },
    InadmissibleContour { worst_pole: C64, margin: f64 },
    DomainViolation(String),
    UnsupportedFamily(&'static str),
    SingularStep { n: usize },
    DegenerateConfiguration(&'static str),
    ConstraintViolation(String),
    InvalidParams(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonConvergent(what) => write!(f, "non-convergent: {what}"),
            Error::TruncationFailure { terms } => {
                write!(f, "truncation failure after {terms} terms")
            }
            Error::DomainError(what) => write!(f, "domain error: {what}"),
            Error::PoleHit { at } => write!(f, "pole hit at {} + {}i", at.re, at.im),
            Error::BalancingViolation { deviation } => {
                write!(f, "balancing violation (relative deviation {deviation:e})")
            }
            Error::NonTerminating => write!(f, "not terminating"),
            Error::NotConverged { est_error } => {
                write!(f, "quadrature not converged (estimated error {est_error:e})")
            }
            Error::ResourceLimit { requested, limit } => {
                write!(f, "node budget exceeded ({requested} > {limit})")
            }
            Error::InadmissibleContour { worst_pole, margin } => write!(
                f,
                "inadmissible contour: worst pole {} + {}i (margin {margin:e})",
                worst_pole.re, worst_pole.im
            ),
            Error::DomainViolation(msg) => write!(f, "domain violation: {msg}"),
            Error::UnsupportedFamily(fam) => write!(f, "no closed form for family {fam}"),
            Error::SingularStep { n } => write!(f, "singular recurrence step at n = {n}"),
            Error::DegenerateConfiguration(msg) => write!(f, "degenerate configuration: {msg}"),
            Error::ConstraintViolation(msg) => write!(f, "constraint violation: {msg}"),
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
