// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the library.
///
/// Invalid probability values are *not* errors: the rules report them through
/// [`crate::rules::RuleResult::valid`] so that invalid regions can be studied.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("factor mismatch: {0}")]
    FactorMismatch(String),
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("operator is not a projector (residual {0:.3e})")]
    NotProjector(f64),
    #[error("operator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("event times are not strictly increasing")]
    UnorderedSchedule,
    #[error("time {0} coincides with an event time; the conditional state is ambiguous there")]
    AtEventTime(f64),
    #[error("times must be strictly ordered: {0}")]
    TimeOrder(String),
    #[error("conditioning on a null event (probability {0:.3e})")]
    NullCondition(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("outcome index out of family: {0}")]
    OutOfFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
