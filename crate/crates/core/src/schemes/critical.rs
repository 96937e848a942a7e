//! Critical-set sharing: the union of several critical sets of the secret
//! square is split triple by triple among participants. A pool that contains
//! a whole critical set completes uniquely to the secret.

use std::collections::{BTreeMap, BTreeSet};

use super::{SchemeError, TripleShare};
use crate::latin::{self, LatinSquare, PartialLatinSquare, Triple};

/// Gives each triple of the union of `critical_sets` its own participant, in
/// sorted triple order.
pub fn one_triple_each(critical_sets: &[PartialLatinSquare]) -> BTreeMap<Triple, usize> {
    let union: BTreeSet<Triple> = critical_sets.iter().flat_map(|c| c.triples()).collect();
    union.into_iter().enumerate().map(|(i, t)| (t, i)).collect()
}

pub fn cds_deal(
    square: &LatinSquare,
    critical_sets: &[PartialLatinSquare],
    assignment: &BTreeMap<Triple, usize>,
) -> Result<Vec<TripleShare>, SchemeError> {
    let mut union = BTreeSet::new();
    for (i, c) in critical_sets.iter().enumerate() {
        if c.order() != square.order() {
            return Err(SchemeError::WrongSquare(i));
        }
        if !latin::is_critical_set(c) {
            return Err(SchemeError::NotACriticalSet(i));
        }
        if latin::complete(c)? != *square {
            return Err(SchemeError::WrongSquare(i));
        }
        union.extend(c.triples());
    }
    if let Some(t) = assignment.keys().find(|t| !union.contains(t)) {
        return Err(SchemeError::ForeignTriple(*t));
    }
    let mut by_owner: BTreeMap<usize, Vec<Triple>> = BTreeMap::new();
    for t in union {
        let owner = assignment
            .get(&t)
            .ok_or(SchemeError::IncompleteAssignment(t))?;
        by_owner.entry(*owner).or_default().push(t);
    }
    Ok(by_owner
        .into_iter()
        .map(|(owner, triples)| TripleShare {
            owner,
            order: square.order(),
            triples,
        })
        .collect())
}

/// Recovers the square from pooled triples, provided they force a unique
/// completion.
pub fn cds_recover(order: usize, pool: &[Triple]) -> Result<LatinSquare, SchemeError> {
    let partial = PartialLatinSquare::from_triples(order, pool.iter().copied()).map_err(|e| match e {
        latin::LatinError::InvalidPartial(msg) => SchemeError::Inconsistent(msg),
        other => other.into(),
    })?;
    match latin::count_completions(&partial, 2) {
        0 => Err(SchemeError::NoCompletion),
        1 => Ok(latin::complete(&partial)?),
        _ => Err(SchemeError::NotUnique),
    }
}
