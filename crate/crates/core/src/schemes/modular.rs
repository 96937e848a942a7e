//! Modular last-share sharing of a critical set. All participants but the
//! last receive uniformly random triples; the last share is chosen so that the
//! component-wise sum of all shares, mod `n`, is the critical set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SchemeError, TripleShare};
use crate::latin::{PartialLatinSquare, Triple};

fn sub_mod(a: usize, b: usize, n: usize) -> usize {
    (a + n - b % n) % n
}

/// `secret[j] − Σ random_shares[i][j]` component-wise, mod `n`.
pub fn cgs_last_share(
    order: usize,
    secret: &[Triple],
    random_shares: &[Vec<Triple>],
) -> Result<Vec<Triple>, SchemeError> {
    if random_shares.iter().any(|s| s.len() != secret.len()) {
        return Err(SchemeError::LengthMismatch);
    }
    Ok(secret
        .iter()
        .enumerate()
        .map(|(j, c)| {
            random_shares.iter().fold(*c, |acc, share| {
                let s = share[j];
                Triple::new(
                    sub_mod(acc.row, s.row, order),
                    sub_mod(acc.col, s.col, order),
                    sub_mod(acc.sym, s.sym, order),
                )
            })
        })
        .collect())
}

/// Deals `participants` shares of the critical set `secret` (triples in
/// row-major order). Participants `0..p-1` get random triples drawn from a
/// seeded ChaCha stream; participant `p-1` gets the balancing share.
pub fn cgs_deal(
    secret: &PartialLatinSquare,
    participants: usize,
    seed: u64,
) -> Result<Vec<TripleShare>, SchemeError> {
    if participants < 2 {
        return Err(SchemeError::InvalidParticipants(participants));
    }
    if secret.is_empty() {
        return Err(SchemeError::EmptySecret);
    }
    let n = secret.order();
    let triples: Vec<Triple> = secret.triples().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<Vec<Triple>> = (0..participants - 1)
        .map(|_| {
            (0..triples.len())
                .map(|_| Triple::new(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        })
        .collect();
    let last = cgs_last_share(n, &triples, &random)?;
    Ok(random
        .into_iter()
        .chain(std::iter::once(last))
        .enumerate()
        .map(|(owner, triples)| TripleShare {
            owner,
            order: n,
            triples,
        })
        .collect())
}

/// Component-wise sum of the pooled shares, mod `n`.
pub fn cgs_combine(shares: &[TripleShare], order: usize) -> Result<Vec<Triple>, SchemeError> {
    let first = shares.first().ok_or(SchemeError::InvalidParticipants(0))?;
    let len = first.triples.len();
    if shares.iter().any(|s| s.triples.len() != len) {
        return Err(SchemeError::LengthMismatch);
    }
    Ok((0..len)
        .map(|j| {
            let (r, c, k) = shares.iter().fold((0, 0, 0), |(r, c, k), s| {
                let t = s.triples[j];
                (r + t.row, c + t.col, k + t.sym)
            });
            Triple::new(r % order, c % order, k % order)
        })
        .collect())
}
