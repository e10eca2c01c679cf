//! Exact Bredon cohomology of finite groups.
//!
//! The crate computes with finite permutation groups, families of
//! subgroups, orbit categories and modules over finite categories, all in
//! exact integer arithmetic. The main entry points are
//! [`dimension::cd_report`] for bounded cohomological dimension verdicts and
//! [`zcat::ext::ext_groups`] for Bredon cohomology groups.

#![allow(clippy::needless_range_loop)]

pub mod budget;
pub mod dimension;
pub mod family;
pub mod int;
pub mod linalg;
pub mod matrix;
pub mod modular;
pub mod nonab;
pub mod orbitcat;
pub mod permgroup;
pub mod posetred;
pub mod suites;
pub mod zcat;

pub use int::Int;
pub use linalg::SparseVec;
pub use matrix::{smith_normal_form, IntMatrix};

/// Errors raised by the library. Each carries a machine-readable category.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("family would be empty: {0}")]
    EmptyFamily(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NotSubgroup(_) => "not_subgroup",
            Error::NotNormal(_) => "not_normal",
            Error::EmptyFamily(_) => "empty_family",
            Error::Unsupported(_) => "unsupported",
            Error::Precondition(_) => "precondition",
            Error::Budget(_) => "budget",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
