//! Maps library errors onto the exit-code contract: 1 for domain failures,
//! 2 for bad flags, unreadable files and schema violations.

use lsss::schemes::SchemeError;
use lsss::store::StoreError;
use lsss::{HashError, LatinError, PackingError};

pub const DOMAIN: u8 = 1;
pub const USAGE: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: USAGE, kind: "Usage", message: message.into() }
    }

    pub fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        Self { code: DOMAIN, kind, message: message.into() }
    }

    fn new(code: u8, kind: &'static str, message: String) -> Self {
        Self { code, kind, message }
    }
}

impl From<LatinError> for Failure {
    fn from(e: LatinError) -> Self {
        let (code, kind) = match e {
            LatinError::InvalidGrid(_) => (USAGE, "InvalidGrid"),
            LatinError::InvalidOrder(_) => (USAGE, "InvalidOrder"),
            LatinError::InvalidPartial(_) => (USAGE, "InvalidPartial"),
            LatinError::OrderTooLarge(_) => (USAGE, "OrderTooLarge"),
            LatinError::Parse { .. } => (USAGE, "Parse"),
            LatinError::NoCompletion => (DOMAIN, "NoCompletion"),
            LatinError::Contradiction { .. } => (DOMAIN, "Contradiction"),
            LatinError::InvalidRectangle(_) => (DOMAIN, "InvalidRectangle"),
        };
        Self::new(code, kind, e.to_string())
    }
}

impl From<PackingError> for Failure {
    fn from(e: PackingError) -> Self {
        let (code, kind) = match e {
            PackingError::InvalidOrder(_) => (USAGE, "InvalidOrder"),
            PackingError::CorruptPacking(_) => (DOMAIN, "CorruptPacking"),
            PackingError::NotRecoverable { .. } => (DOMAIN, "NotRecoverable"),
        };
        Self::new(code, kind, e.to_string())
    }
}

impl From<HashError> for Failure {
    fn from(e: HashError) -> Self {
        let (code, kind) = match e {
            HashError::InvalidDigestBits(_) => (USAGE, "InvalidDigestBits"),
            HashError::StateOutOfRange { .. } => (USAGE, "StateOutOfRange"),
            HashError::WidthTooLarge { .. } => (USAGE, "WidthTooLarge"),
            HashError::BadHex(_) => (USAGE, "BadHex"),
            HashError::UnalignedPrefix(_) => (USAGE, "UnalignedPrefix"),
            HashError::InvalidLeafCount(_) => (USAGE, "InvalidLeafCount"),
            HashError::BudgetExceeded { .. } => (DOMAIN, "BudgetExceeded"),
            HashError::DuplicateLeaf { .. } => (DOMAIN, "DuplicateLeaf"),
            HashError::IndexOutOfRange { .. } => (DOMAIN, "IndexOutOfRange"),
        };
        Self::new(code, kind, e.to_string())
    }
}

impl From<SchemeError> for Failure {
    fn from(e: SchemeError) -> Self {
        let (code, kind) = match e {
            SchemeError::Latin(inner) => return inner.into(),
            SchemeError::Hash(inner) => return inner.into(),
            SchemeError::InvalidThreshold { .. } => (USAGE, "InvalidThreshold"),
            SchemeError::InvalidAccessStructure(_) => (USAGE, "InvalidAccessStructure"),
            SchemeError::EmptyAccessStructure => (USAGE, "EmptyAccessStructure"),
            SchemeError::InvalidParticipants(_) => (USAGE, "InvalidParticipants"),
            SchemeError::EmptySecret => (USAGE, "EmptySecret"),
            SchemeError::NotAuthorized => (DOMAIN, "NotAuthorized"),
            SchemeError::NotACriticalSet(_) => (DOMAIN, "NotACriticalSet"),
            SchemeError::WrongSquare(_) => (DOMAIN, "WrongSquare"),
            SchemeError::IncompleteAssignment(_) => (DOMAIN, "IncompleteAssignment"),
            SchemeError::ForeignTriple(_) => (DOMAIN, "ForeignTriple"),
            SchemeError::NotUnique => (DOMAIN, "NotUnique"),
            SchemeError::Inconsistent(_) => (DOMAIN, "Inconsistent"),
            SchemeError::NoCompletion => (DOMAIN, "NoCompletion"),
            SchemeError::LengthMismatch => (DOMAIN, "LengthMismatch"),
            SchemeError::ShareLength { .. } => (DOMAIN, "ShareLength"),
            SchemeError::CommitmentsAbsent => (DOMAIN, "CommitmentsAbsent"),
        };
        Self::new(code, kind, e.to_string())
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        let kind = match e {
            StoreError::Io { .. } => "Io",
            StoreError::SchemaViolation { .. } => "SchemaViolation",
        };
        Self::new(USAGE, kind, e.to_string())
    }
}
