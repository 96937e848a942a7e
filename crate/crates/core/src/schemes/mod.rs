//! Secret sharing schemes.
//!
//! * [`critical`]: shares are triples of critical sets of the secret square.
//! * [`modular`]: random triple lists that sum, mod `n`, to a critical set.
//! * [`herding`]: random hash-width shares herded into one diamond root,
//!   with public linking records and hash commitments.

pub mod critical;
pub mod herding;
pub mod modular;

use thiserror::Error;

use crate::latin::{LatinError, Triple};
use crate::toy_hash::HashError;

pub use critical::{cds_deal, cds_recover, one_triple_each};
pub use herding::{
    access_structure_size, keystream, minimal_subsets, threshold_recover, threshold_recover_with,
    threshold_setup, vss_verify, AccessStructure, HashShare, PublicStore, SetupOptions,
};
pub use modular::{cgs_combine, cgs_deal, cgs_last_share};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Latin(#[from] LatinError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error("threshold {t} is invalid for {n} participants")]
    InvalidThreshold { n: usize, t: usize },
    #[error("invalid access structure: {0}")]
    InvalidAccessStructure(String),
    #[error("the access structure has no authorized subsets")]
    EmptyAccessStructure,
    #[error("the pooled shares do not cover any authorized subset")]
    NotAuthorized,
    #[error("critical set {0} is not a critical set")]
    NotACriticalSet(usize),
    #[error("critical set {0} completes to a different square")]
    WrongSquare(usize),
    #[error("no participant is assigned triple {0}")]
    IncompleteAssignment(Triple),
    #[error("assigned triple {0} is not in any critical set")]
    ForeignTriple(Triple),
    #[error("the pooled triples complete to more than one square")]
    NotUnique,
    #[error("the pooled triples conflict: {0}")]
    Inconsistent(String),
    #[error("the pooled triples have no completion")]
    NoCompletion,
    #[error("invalid participant count {0}")]
    InvalidParticipants(usize),
    #[error("the secret has no triples")]
    EmptySecret,
    #[error("shares have different lengths")]
    LengthMismatch,
    #[error("share of participant {owner} has {got} blocks, expected {expected}")]
    ShareLength { owner: usize, expected: usize, got: usize },
    #[error("the store publishes no commitments")]
    CommitmentsAbsent,
}

/// A participant's share in the triple-based schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleShare {
    pub owner: usize,
    pub order: usize,
    pub triples: Vec<Triple>,
}
