use thiserror::Error;

use crate::ordinal::Ordinal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("elements live in different spaces: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),

    #[error("stage must be at least 1, got {0}")]
    InvalidStage(Ordinal),

    #[error("norm has no exact certificate: bounds [{lower}, {upper}]")]
    Uncertifiable { lower: String, upper: String },

    #[error("tail expression has no eventually stable functional value")]
    NonConvergent,

    #[error("not a tree: {0}")]
    InvalidTree(String),

    #[error("node not in tree: {0}")]
    NodeNotFound(String),

    #[error("no child of rank >= {wanted} below node {node}")]
    NoChild { node: String, wanted: Ordinal },

    #[error("missing rank certificate for component {0}")]
    MissingCertificate(String),

    #[error("certificate {have} is below target {target}")]
    CertificateBelowTarget { have: Ordinal, target: Ordinal },

    #[error("link inequality violated at position {0}")]
    LinkViolated(usize),

    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget overflow: {0}")]
    BudgetOverflow(String),

    #[error("schema error: {0}")]
    Schema(String),
}
