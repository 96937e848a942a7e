//! Threshold sharing by herding.
//!
//! Each participant holds random blocks. For every minimal authorized subset
//! the members' blocks, concatenated in ascending id order, hash from the IV
//! to a leaf state. The dealer builds a diamond over those leaves and
//! publishes each subset's path to the root. The root is the secret: it keys
//! a SHA-256 keystream that masks the payload (typically a packed Latin
//! square). SHA-256 commitments to each share let participants and the
//! dealer check shares.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::SchemeError;
use crate::toy_hash::{blocks_to_bytes, Block, ChainState, HashParams, Searcher};

/// Inclusion-minimal authorized subsets over participants `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    n_participants: usize,
    subsets: Vec<Vec<usize>>,
    threshold: Option<usize>,
}

impl AccessStructure {
    /// Explicit subsets. Each is sorted; the list must be non-empty and no
    /// subset may contain another.
    pub fn new(n_participants: usize, subsets: Vec<Vec<usize>>) -> Result<Self, SchemeError> {
        if subsets.is_empty() {
            return Err(SchemeError::EmptyAccessStructure);
        }
        let mut sorted = Vec::with_capacity(subsets.len());
        for mut s in subsets {
            s.sort_unstable();
            if s.is_empty() {
                return Err(SchemeError::InvalidAccessStructure("empty subset".into()));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(SchemeError::InvalidAccessStructure(format!("{s:?} repeats a member")));
            }
            if let Some(&id) = s.iter().find(|&&id| id >= n_participants) {
                return Err(SchemeError::InvalidAccessStructure(format!(
                    "participant {id} is not below {n_participants}"
                )));
            }
            sorted.push(s);
        }
        for (i, a) in sorted.iter().enumerate() {
            for (j, b) in sorted.iter().enumerate() {
                if i != j && a.iter().all(|x| b.contains(x)) {
                    return Err(SchemeError::InvalidAccessStructure(format!(
                        "{a:?} is contained in {b:?}"
                    )));
                }
            }
        }
        Ok(Self {
            n_participants,
            subsets: sorted,
            threshold: None,
        })
    }

    /// Every `(t+1)`-subset of `0..n`.
    pub fn threshold(n: usize, t: usize) -> Result<Self, SchemeError> {
        if t >= n {
            return Err(SchemeError::InvalidThreshold { n, t });
        }
        Ok(Self {
            n_participants: n,
            subsets: (0..n).combinations(t + 1).collect(),
            threshold: Some(t),
        })
    }

    /// The same structure with the given subsets removed.
    pub fn excluding(&self, excluded: &[Vec<usize>]) -> Result<Self, SchemeError> {
        let drop: BTreeSet<Vec<usize>> = excluded
            .iter()
            .map(|s| s.iter().copied().sorted().collect())
            .collect();
        if drop.is_empty() {
            return Ok(self.clone());
        }
        for s in &drop {
            if !self.subsets.contains(s) {
                return Err(SchemeError::InvalidAccessStructure(format!(
                    "{s:?} is not a minimal subset"
                )));
            }
        }
        let kept: Vec<Vec<usize>> = self.subsets.iter().filter(|s| !drop.contains(*s)).cloned().collect();
        if kept.is_empty() {
            return Err(SchemeError::EmptyAccessStructure);
        }
        Self::new(self.n_participants, kept)
    }

    pub fn n_participants(&self) -> usize {
        self.n_participants
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// `Some(t)` when this is the plain `(t+1, n)` threshold structure.
    pub fn threshold_value(&self) -> Option<usize> {
        self.threshold
    }
}

/// Size of the full `(t+1, n)` access structure: `Σ_{k=t+1}^{n} C(n, k)`.
pub fn access_structure_size(n: usize, t: usize) -> Result<u128, SchemeError> {
    if t >= n {
        return Err(SchemeError::InvalidThreshold { n, t });
    }
    let n128 = n as u128;
    let mut binom: u128 = 1;
    let mut total = 0;
    for k in 0..=n as u128 {
        if k > t as u128 {
            total += binom;
        }
        binom = binom * (n128 - k) / (k + 1);
    }
    Ok(total)
}

/// The minimal authorized subsets of the `(t+1, n)` threshold structure,
/// lexicographically ordered.
pub fn minimal_subsets(n: usize, t: usize) -> Result<AccessStructure, SchemeError> {
    AccessStructure::threshold(n, t)
}

/// A participant's random blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashShare {
    pub owner: usize,
    pub blocks: Vec<Block>,
}

impl HashShare {
    pub fn to_bytes(&self) -> Vec<u8> {
        blocks_to_bytes(&self.blocks)
    }

    /// SHA-256 of the share's bytes.
    pub fn commitment(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }
}

/// Everything the dealer publishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicStore {
    pub params: HashParams,
    pub share_blocks: usize,
    pub access: AccessStructure,
    /// Linking path per minimal subset, keyed by sorted member ids.
    pub records: BTreeMap<Vec<usize>, Vec<Block>>,
    pub mask: Vec<u8>,
    pub commitments: Vec<[u8; 32]>,
}

impl PublicStore {
    pub fn payload_len(&self) -> usize {
        self.mask.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetupOptions {
    /// Blocks per share; `None` uses the minimum covering the digest width.
    pub share_blocks: Option<usize>,
    pub verifiable: bool,
    pub parallelism: usize,
}

impl Default for SetupOptions {
    fn default() -> Self {
        Self {
            share_blocks: None,
            verifiable: true,
            parallelism: 1,
        }
    }
}

/// Smallest number of 64-bit blocks at least as wide as the digest.
pub fn min_share_blocks(params: HashParams) -> usize {
    (params.digest_bits() as usize).div_ceil(64).max(1)
}

/// `SHA-256(encode(root) || j)` for `j = 0, 1, …`, truncated to `len` bytes.
pub fn keystream(params: HashParams, root: ChainState, len: usize) -> Vec<u8> {
    let seed = params.encode(root);
    let mut out = Vec::with_capacity(len + 32);
    let mut j = 0u64;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update(&seed);
        h.update(j.to_be_bytes());
        out.extend_from_slice(&h.finalize());
        j += 1;
    }
    out.truncate(len);
    out
}

fn xor(data: &[u8], key: &[u8]) -> Vec<u8> {
    data.iter().zip(key).map(|(a, b)| a ^ b).collect()
}

fn subset_leaf(params: HashParams, members: &[usize], shares: &[HashShare]) -> ChainState {
    let blocks = members.iter().flat_map(|&m| shares[m].blocks.iter());
    params.iterate(params.iv(), blocks)
}

/// Deals shares for `access` and publishes the linking records, the masked
/// payload and (optionally) share commitments.
pub fn threshold_setup(
    params: HashParams,
    access: &AccessStructure,
    payload: &[u8],
    seed: u64,
    options: &SetupOptions,
) -> Result<(Vec<HashShare>, PublicStore), SchemeError> {
    if access.subsets().is_empty() {
        return Err(SchemeError::EmptyAccessStructure);
    }
    let min_blocks = min_share_blocks(params);
    let share_blocks = options.share_blocks.unwrap_or(min_blocks);
    if share_blocks < min_blocks {
        return Err(SchemeError::ShareLength {
            owner: 0,
            expected: min_blocks,
            got: share_blocks,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shares: Vec<HashShare> = (0..access.n_participants())
        .map(|owner| HashShare {
            owner,
            blocks: (0..share_blocks).map(|_| Block::random(&mut rng)).collect(),
        })
        .collect();

    // Subsets whose private messages land on the same state share a leaf.
    let mut leaves: Vec<ChainState> = Vec::new();
    let mut leaf_index: HashMap<ChainState, usize> = HashMap::new();
    let mut subset_leaves = Vec::with_capacity(access.subsets().len());
    for members in access.subsets() {
        let leaf = subset_leaf(params, members, &shares);
        let idx = *leaf_index.entry(leaf).or_insert_with(|| {
            leaves.push(leaf);
            leaves.len() - 1
        });
        subset_leaves.push(idx);
    }
    let target = leaves.len().next_power_of_two().max(2);
    let mask_bits = params.digest_bits();
    while leaves.len() < target {
        let pad = params.state(rng.next_u64() >> (64 - mask_bits))?;
        if let std::collections::hash_map::Entry::Vacant(e) = leaf_index.entry(pad) {
            e.insert(leaves.len());
            leaves.push(pad);
        }
    }

    let searcher = Searcher::new(params).with_parallelism(options.parallelism);
    let diamond = searcher.build_diamond(&leaves, rng.next_u64())?;
    let mut records = BTreeMap::new();
    for (members, &idx) in access.subsets().iter().zip(&subset_leaves) {
        records.insert(members.clone(), diamond.linking_path(idx)?);
    }
    let mask = xor(payload, &keystream(params, diamond.root(), payload.len()));
    let commitments = if options.verifiable {
        shares.iter().map(HashShare::commitment).collect()
    } else {
        Vec::new()
    };
    let store = PublicStore {
        params,
        share_blocks,
        access: access.clone(),
        records,
        mask,
        commitments,
    };
    Ok((shares, store))
}

/// Recovers the payload using the lexicographically first published subset
/// that the pool covers.
pub fn threshold_recover(store: &PublicStore, shares: &[HashShare]) -> Result<Vec<u8>, SchemeError> {
    let owners: BTreeSet<usize> = shares.iter().map(|s| s.owner).collect();
    let members = store
        .records
        .keys()
        .find(|members| members.iter().all(|m| owners.contains(m)))
        .ok_or(SchemeError::NotAuthorized)?;
    threshold_recover_with(store, shares, members)
}

/// Recovers the payload through one specific subset's record.
pub fn threshold_recover_with(
    store: &PublicStore,
    shares: &[HashShare],
    members: &[usize],
) -> Result<Vec<u8>, SchemeError> {
    let path = store.records.get(members).ok_or(SchemeError::NotAuthorized)?;
    let params = store.params;
    let mut state = params.iv();
    for &m in members {
        let share = shares
            .iter()
            .find(|s| s.owner == m)
            .ok_or(SchemeError::NotAuthorized)?;
        if share.blocks.len() != store.share_blocks {
            return Err(SchemeError::ShareLength {
                owner: m,
                expected: store.share_blocks,
                got: share.blocks.len(),
            });
        }
        state = params.iterate(state, &share.blocks);
    }
    let root = params.iterate(state, path);
    Ok(xor(&store.mask, &keystream(params, root, store.mask.len())))
}

/// Index of the published commitment matching `share`, if any.
pub fn vss_verify(share: &HashShare, store: &PublicStore) -> Result<Option<usize>, SchemeError> {
    if store.commitments.is_empty() {
        return Err(SchemeError::CommitmentsAbsent);
    }
    let c = share.commitment();
    Ok(store.commitments.iter().position(|g| *g == c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d16() -> HashParams {
        HashParams::new(16).unwrap()
    }

    #[test]
    fn structure_sizes() {
        assert_eq!(access_structure_size(3, 1), Ok(4));
        assert_eq!(access_structure_size(3, 2), Ok(1));
        assert_eq!(access_structure_size(5, 2), Ok(16));
        assert_eq!(access_structure_size(3, 3), Err(SchemeError::InvalidThreshold { n: 3, t: 3 }));
    }

    #[test]
    fn minimal_subset_listing() {
        assert_eq!(
            minimal_subsets(3, 1).unwrap().subsets(),
            &[vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(minimal_subsets(3, 2).unwrap().subsets(), &[vec![0, 1, 2]]);
        assert_eq!(minimal_subsets(5, 2).unwrap().subsets().len(), 10);
        assert!(minimal_subsets(2, 2).is_err());
    }

    #[test]
    fn explicit_structure_validation() {
        assert_eq!(AccessStructure::new(3, vec![]), Err(SchemeError::EmptyAccessStructure));
        assert!(AccessStructure::new(3, vec![vec![0, 1], vec![0, 1, 2]]).is_err());
        assert!(AccessStructure::new(3, vec![vec![0, 3]]).is_err());
        assert!(AccessStructure::new(3, vec![vec![1, 1]]).is_err());
        let a = AccessStructure::new(3, vec![vec![2, 0], vec![1]]).unwrap();
        assert_eq!(a.subsets(), &[vec![0, 2], vec![1]]);
        let t = AccessStructure::threshold(3, 1).unwrap();
        assert!(t.excluding(&[vec![0, 1, 2]]).is_err());
        let ex = t.excluding(&[vec![2, 1]]).unwrap();
        assert_eq!(ex.subsets(), &[vec![0, 1], vec![0, 2]]);
        assert_eq!(ex.threshold_value(), None);
    }

    #[test]
    fn keystream_is_prefix_stable() {
        let p = d16();
        let root = p.state(0x4242).unwrap();
        let long = keystream(p, root, 70);
        assert_eq!(&long[..32], &keystream(p, root, 32)[..]);
        assert_eq!(long.len(), 70);
    }

    #[test]
    fn two_of_three_round_trip() {
        let acc = AccessStructure::threshold(3, 1).unwrap();
        let payload = b"thirty-two bytes of secret text!";
        let (shares, store) = threshold_setup(d16(), &acc, payload, 5, &SetupOptions::default()).unwrap();
        assert_eq!(store.records.len(), 3);
        for members in acc.subsets() {
            let pool: Vec<HashShare> = members.iter().map(|&m| shares[m].clone()).collect();
            assert_eq!(threshold_recover(&store, &pool).unwrap(), payload);
        }
        for s in &shares {
            assert_eq!(threshold_recover(&store, std::slice::from_ref(s)), Err(SchemeError::NotAuthorized));
            assert_eq!(vss_verify(s, &store), Ok(Some(s.owner)));
        }
    }

    #[test]
    fn single_participant() {
        let acc = AccessStructure::threshold(1, 0).unwrap();
        let (shares, store) = threshold_setup(d16(), &acc, b"solo", 1, &SetupOptions::default()).unwrap();
        assert_eq!(threshold_recover(&store, &shares).unwrap(), b"solo");
    }

    #[test]
    fn unverifiable_store_has_no_commitments() {
        let acc = AccessStructure::threshold(2, 0).unwrap();
        let opts = SetupOptions { verifiable: false, ..Default::default() };
        let (shares, store) = threshold_setup(d16(), &acc, b"x", 1, &opts).unwrap();
        assert_eq!(vss_verify(&shares[0], &store), Err(SchemeError::CommitmentsAbsent));
    }

    #[test]
    fn wrong_length_share_rejected() {
        let acc = AccessStructure::threshold(2, 0).unwrap();
        let (mut shares, store) = threshold_setup(d16(), &acc, b"x", 1, &SetupOptions::default()).unwrap();
        shares[0].blocks.push(Block::default());
        assert!(matches!(
            threshold_recover(&store, &shares[..1]),
            Err(SchemeError::ShareLength { owner: 0, .. })
        ));
    }
}
