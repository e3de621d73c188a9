//! Exact representations of bipartite nonlocal boxes (PR-box, racboxes, RAC),
//! classical wirings around them, exhaustive deterministic-strategy sweeps and
//! Shannon-information computations.
//!
//! Everything at the box level is exact rational arithmetic; floating point
//! enters only where a logarithm is taken.

pub mod boxes;
pub mod channel;
pub mod info;
pub mod joint;
pub mod rational;
pub mod strategies;
pub mod vars;
pub mod wiring;

pub use boxes::{
    check_nonsignalling, chsh_score, is_racbox, make_nonsignalling_racbox, make_pr_box,
    make_rac_box, make_signalling_racbox, satisfies_pr_correlations, BipartiteBox,
    SignallingVerdict,
};
pub use channel::{is_postprocessing_of_erasure, ChannelClass, ChannelKind, ClassicalChannel};
pub use joint::JointDistribution;
pub use rational::Rational;
pub use vars::VariableSpec;
pub use wiring::{compose, Wiring, WiredBox};

use thiserror::Error;

/// Error type shared across the crate.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("signature error: {0}")]
    Signature(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("wiring error: {0}")]
    Wiring(String),
    #[error("message budget violation: {0}")]
    BudgetViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
