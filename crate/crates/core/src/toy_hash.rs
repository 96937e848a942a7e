//! A reduced-width iterative hash and the herding machinery built on it.
//!
//! The compression function keeps the top `d` bits of
//! `SHA-256(state_be || block)`, where the state is `d/8` big-endian bytes and
//! blocks are 8 bytes. `d` is one of 8, 16, 24, 32 or 40 so that birthday
//! searches (`2^(d/2)` work) stay cheap.
//!
//! Searches draw candidate blocks from a seeded ChaCha stream and consume the
//! results in draw order. With a parallelism above one, batches of blocks are
//! hashed on a thread pool, but the consumed order is unchanged, so results
//! and probe counts match the sequential run exactly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const BLOCK_BYTES: usize = 8;
pub const SUPPORTED_DIGEST_BITS: [u32; 5] = [8, 16, 24, 32, 40];
const IV_TAG: &[u8] = b"LSSS-IV-v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    #[error("digest width {0} is not one of 8, 16, 24, 32, 40")]
    InvalidDigestBits(u32),
    #[error("chaining value {value:#x} does not fit in {bits} bits")]
    StateOutOfRange { value: u64, bits: u32 },
    #[error("search budget of {budget} probes exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("leaf {index} duplicates an earlier leaf")]
    DuplicateLeaf { index: usize },
    #[error("diamond needs 2^k leaves with k >= 1, got {0}")]
    InvalidLeafCount(usize),
    #[error("leaf index {index} out of range for {leaves} leaves")]
    IndexOutOfRange { index: usize, leaves: usize },
    #[error("prefix length {0} is not a multiple of 8 bytes")]
    UnalignedPrefix(usize),
    #[error("digest width {bits} exceeds {max} bits for this operation")]
    WidthTooLarge { bits: u32, max: u32 },
    #[error("bad hex value: {0}")]
    BadHex(String),
}

/// Digest width of the reduced hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashParams {
    digest_bits: u32,
}

/// A `d`-bit chaining value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainState(u64);

/// One 8-byte message block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Block(pub [u8; BLOCK_BYTES]);

impl HashParams {
    pub fn new(digest_bits: u32) -> Result<Self, HashError> {
        if !SUPPORTED_DIGEST_BITS.contains(&digest_bits) {
            return Err(HashError::InvalidDigestBits(digest_bits));
        }
        Ok(Self { digest_bits })
    }

    pub fn digest_bits(&self) -> u32 {
        self.digest_bits
    }

    pub fn state_bytes(&self) -> usize {
        self.digest_bits as usize / 8
    }

    fn truncate(&self, digest: &[u8]) -> ChainState {
        let head = u64::from_be_bytes(digest[..8].try_into().unwrap());
        ChainState(head >> (64 - self.digest_bits))
    }

    pub fn state(&self, value: u64) -> Result<ChainState, HashError> {
        if value >> self.digest_bits != 0 {
            return Err(HashError::StateOutOfRange {
                value,
                bits: self.digest_bits,
            });
        }
        Ok(ChainState(value))
    }

    /// Big-endian encoding of a state in `d/8` bytes.
    pub fn encode(&self, s: ChainState) -> Vec<u8> {
        s.0.to_be_bytes()[8 - self.state_bytes()..].to_vec()
    }

    pub fn state_to_hex(&self, s: ChainState) -> String {
        hex::encode(self.encode(s))
    }

    pub fn state_from_hex(&self, text: &str) -> Result<ChainState, HashError> {
        let bytes = hex::decode(text).map_err(|e| HashError::BadHex(e.to_string()))?;
        if bytes.len() != self.state_bytes() {
            return Err(HashError::BadHex(format!(
                "expected {} bytes for a {}-bit state, got {}",
                self.state_bytes(),
                self.digest_bits,
                bytes.len()
            )));
        }
        Ok(ChainState(bytes.iter().fold(0u64, |v, &b| v << 8 | u64::from(b))))
    }

    pub fn iv(&self) -> ChainState {
        let mut h = Sha256::new();
        h.update(IV_TAG);
        h.update(self.digest_bits.to_be_bytes());
        self.truncate(&h.finalize())
    }

    pub fn compress(&self, state: ChainState, block: &Block) -> ChainState {
        let mut h = Sha256::new();
        h.update(self.encode(state));
        h.update(block.0);
        self.truncate(&h.finalize())
    }

    /// Left fold of [`compress`](Self::compress) over `blocks`.
    pub fn iterate<'a, I>(&self, state: ChainState, blocks: I) -> ChainState
    where
        I: IntoIterator<Item = &'a Block>,
    {
        blocks.into_iter().fold(state, |s, b| self.compress(s, b))
    }

    /// Hash of an arbitrary message with length strengthening, from the IV.
    pub fn hash_full(&self, message: &[u8]) -> ChainState {
        let padded = md_pad(message);
        let blocks = blocks_from_bytes(&padded).expect("padding aligns to blocks");
        self.iterate(self.iv(), &blocks)
    }
}

/// Appends `0x80`, zeros up to an 8-byte boundary, then the message bit length
/// as a 64-bit big-endian block.
pub fn md_pad(message: &[u8]) -> Vec<u8> {
    let mut out = message.to_vec();
    out.push(0x80);
    while !out.len().is_multiple_of(BLOCK_BYTES) {
        out.push(0);
    }
    out.extend_from_slice(&((message.len() as u64) * 8).to_be_bytes());
    out
}

/// Splits 8-byte aligned data into blocks.
pub fn blocks_from_bytes(bytes: &[u8]) -> Result<Vec<Block>, HashError> {
    if !bytes.len().is_multiple_of(BLOCK_BYTES) {
        return Err(HashError::UnalignedPrefix(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(BLOCK_BYTES)
        .map(|c| Block(c.try_into().unwrap()))
        .collect())
}

pub fn blocks_to_bytes(blocks: &[Block]) -> Vec<u8> {
    blocks.iter().flat_map(|b| b.0).collect()
}

impl ChainState {
    pub fn value(&self) -> u64 {
        self.0
    }
}

impl Block {
    pub fn random(rng: &mut impl RngCore) -> Self {
        let mut b = [0u8; BLOCK_BYTES];
        rng.fill_bytes(&mut b);
        Block(b)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Block {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = hex::decode(s).map_err(|e| HashError::BadHex(e.to_string()))?;
        let arr: [u8; BLOCK_BYTES] = bytes
            .try_into()
            .map_err(|b: Vec<u8>| HashError::BadHex(format!("block has {} bytes, expected 8", b.len())))?;
        Ok(Block(arr))
    }
}

/// Two blocks taking two states to a common state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub block_a: Block,
    pub block_b: Block,
    pub output: ChainState,
    pub probes: u64,
}

/// A binary herding tree. Level 0 holds the leaves, the last level the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diamond {
    params: HashParams,
    levels: Vec<Vec<ChainState>>,
    edges: Vec<Vec<Block>>,
}

impl Diamond {
    /// Assembles a diamond from stored parts, checking its shape and every
    /// edge.
    pub fn from_parts(
        params: HashParams,
        levels: Vec<Vec<ChainState>>,
        edges: Vec<Vec<Block>>,
    ) -> Result<Self, String> {
        if levels.len() < 2 || levels.last().map(Vec::len) != Some(1) {
            return Err("levels must end in a single root".into());
        }
        if edges.len() != levels.len() - 1 {
            return Err("need one edge level per non-root level".into());
        }
        for (i, pair) in levels.windows(2).enumerate() {
            if pair[0].len() != 2 * pair[1].len() {
                return Err(format!("level {} is not twice the size of level {}", i, i + 1));
            }
            if edges[i].len() != pair[0].len() {
                return Err(format!("edge level {i} has the wrong length"));
            }
        }
        let d = Self {
            params,
            levels,
            edges,
        };
        if !d.verify() {
            return Err("an edge block does not map its node to the parent".into());
        }
        Ok(d)
    }

    pub fn params(&self) -> HashParams {
        self.params
    }

    pub fn root(&self) -> ChainState {
        self.levels.last().unwrap()[0]
    }

    pub fn leaves(&self) -> &[ChainState] {
        &self.levels[0]
    }

    pub fn levels(&self) -> &[Vec<ChainState>] {
        &self.levels
    }

    pub fn edges(&self) -> &[Vec<Block>] {
        &self.edges
    }

    /// Tree depth `k` (there are `2^k` leaves).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// The `k` blocks leading from a leaf to the root, leaf side first.
    pub fn linking_path(&self, leaf_index: usize) -> Result<Vec<Block>, HashError> {
        let leaves = self.levels[0].len();
        if leaf_index >= leaves {
            return Err(HashError::IndexOutOfRange {
                index: leaf_index,
                leaves,
            });
        }
        Ok(self
            .edges
            .iter()
            .enumerate()
            .map(|(level, blocks)| blocks[leaf_index >> level])
            .collect())
    }

    /// Checks every edge: a node's block maps it to its parent.
    pub fn verify(&self) -> bool {
        self.edges.iter().enumerate().all(|(level, blocks)| {
            blocks.iter().enumerate().all(|(i, b)| {
                self.params.compress(self.levels[level][i], b) == self.levels[level + 1][i / 2]
            })
        })
    }

    pub fn leaf_index(&self, state: ChainState) -> Option<usize> {
        self.levels[0].iter().position(|&s| s == state)
    }
}

/// Result of herding a prefix into a diamond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Herd {
    pub link_block: Block,
    pub leaf_index: usize,
    pub suffix: Vec<Block>,
    pub probes: u64,
}

impl Herd {
    /// `prefix || link_block || suffix`.
    pub fn message(&self, prefix: &[u8]) -> Vec<u8> {
        let mut m = prefix.to_vec();
        m.extend_from_slice(&self.link_block.0);
        m.extend(blocks_to_bytes(&self.suffix));
        m
    }
}

/// Runs collision and herding searches for one digest width.
#[derive(Clone)]
pub struct Searcher {
    params: HashParams,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl fmt::Debug for Searcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Searcher")
            .field("params", &self.params)
            .field("parallelism", &self.parallelism())
            .finish()
    }
}

const SEQ_BATCH: usize = 64;
const PAR_BATCH: usize = 4096;

impl Searcher {
    pub fn new(params: HashParams) -> Self {
        Self { params, pool: None }
    }

    /// Uses a pool of `threads` workers for hashing batches; `threads <= 1`
    /// keeps everything on the calling thread.
    pub fn with_parallelism(mut self, threads: usize) -> Self {
        self.pool = if threads > 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .ok()
                .map(Arc::new)
        } else {
            None
        };
        self
    }

    pub fn parallelism(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    pub fn params(&self) -> HashParams {
        self.params
    }

    fn batch_size(&self) -> usize {
        if self.pool.is_some() {
            PAR_BATCH
        } else {
            SEQ_BATCH
        }
    }

    fn eval(&self, state: ChainState, blocks: &[Block]) -> Vec<ChainState> {
        let p = self.params;
        match &self.pool {
            Some(pool) => pool.install(|| blocks.par_iter().map(|b| p.compress(state, b)).collect()),
            None => blocks.iter().map(|b| p.compress(state, b)).collect(),
        }
    }

    fn draw(rng: &mut ChaCha8Rng, count: usize) -> Vec<Block> {
        (0..count).map(|_| Block::random(rng)).collect()
    }

    /// Birthday search for `compress(a, x) == compress(b, y)`.
    ///
    /// Candidates for each side come from separate ChaCha streams and are
    /// probed alternately; the budget is `2^(d/2 + 6)` compressions.
    pub fn find_collision(&self, a: ChainState, b: ChainState, seed: u64) -> Result<Collision, HashError> {
        let p = self.params;
        if a == b {
            let block = Block(seed.to_be_bytes());
            return Ok(Collision {
                block_a: block,
                block_b: block,
                output: p.compress(a, &block),
                probes: 1,
            });
        }
        let budget = 1u64 << (p.digest_bits / 2 + 6);
        let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
        rng_a.set_stream(0);
        let mut rng_b = ChaCha8Rng::seed_from_u64(seed);
        rng_b.set_stream(1);
        let mut seen_a: HashMap<ChainState, Block> = HashMap::new();
        let mut seen_b: HashMap<ChainState, Block> = HashMap::new();
        let mut probes = 0u64;
        loop {
            let batch = self.batch_size();
            let blocks_a = Self::draw(&mut rng_a, batch);
            let blocks_b = Self::draw(&mut rng_b, batch);
            let out_a = self.eval(a, &blocks_a);
            let out_b = self.eval(b, &blocks_b);
            for i in 0..batch {
                if probes >= budget {
                    return Err(HashError::BudgetExceeded { budget });
                }
                probes += 1;
                if let Some(&yb) = seen_b.get(&out_a[i]) {
                    return Ok(Collision {
                        block_a: blocks_a[i],
                        block_b: yb,
                        output: out_a[i],
                        probes,
                    });
                }
                seen_a.entry(out_a[i]).or_insert(blocks_a[i]);

                if probes >= budget {
                    return Err(HashError::BudgetExceeded { budget });
                }
                probes += 1;
                if let Some(&xa) = seen_a.get(&out_b[i]) {
                    return Ok(Collision {
                        block_a: xa,
                        block_b: blocks_b[i],
                        output: out_b[i],
                        probes,
                    });
                }
                seen_b.entry(out_b[i]).or_insert(blocks_b[i]);
            }
        }
    }

    /// Builds a diamond over `leaves`, pairing node `2i` with node `2i + 1`
    /// at every level.
    pub fn build_diamond(&self, leaves: &[ChainState], seed: u64) -> Result<Diamond, HashError> {
        let count = leaves.len();
        if count < 2 || !count.is_power_of_two() {
            return Err(HashError::InvalidLeafCount(count));
        }
        for (i, leaf) in leaves.iter().enumerate() {
            self.params.state(leaf.0)?;
            if leaves[..i].contains(leaf) {
                return Err(HashError::DuplicateLeaf { index: i });
            }
        }
        let mut seeds = ChaCha8Rng::seed_from_u64(seed);
        let mut levels = vec![leaves.to_vec()];
        let mut edges = Vec::new();
        while levels.last().unwrap().len() > 1 {
            let current = levels.last().unwrap();
            let mut parents = Vec::with_capacity(current.len() / 2);
            let mut blocks = Vec::with_capacity(current.len());
            for pair in current.chunks_exact(2) {
                let c = self.find_collision(pair[0], pair[1], seeds.next_u64())?;
                parents.push(c.output);
                blocks.push(c.block_a);
                blocks.push(c.block_b);
            }
            edges.push(blocks);
            levels.push(parents);
        }
        Ok(Diamond {
            params: self.params,
            levels,
            edges,
        })
    }

    /// Finds a block linking `prefix` (hashed from the IV, no padding) to some
    /// diamond leaf, and returns it with that leaf's path to the root.
    ///
    /// Expected work is `2^(d-k)`; the budget is `2^(d-k+6)`.
    pub fn herd_prefix(&self, diamond: &Diamond, prefix: &[u8], seed: u64) -> Result<Herd, HashError> {
        let p = self.params;
        if p.digest_bits > 32 {
            return Err(HashError::WidthTooLarge {
                bits: p.digest_bits,
                max: 32,
            });
        }
        let prefix_blocks = blocks_from_bytes(prefix)?;
        let start = p.iterate(p.iv(), &prefix_blocks);
        let leaf_of: HashMap<ChainState, usize> = diamond
            .leaves()
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        let shift = (p.digest_bits as usize + 6).saturating_sub(diamond.depth());
        let budget = 1u64 << shift;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut probes = 0u64;
        loop {
            let blocks = Self::draw(&mut rng, self.batch_size());
            let outs = self.eval(start, &blocks);
            for (block, out) in blocks.iter().zip(outs) {
                if probes >= budget {
                    return Err(HashError::BudgetExceeded { budget });
                }
                probes += 1;
                if let Some(&leaf_index) = leaf_of.get(&out) {
                    return Ok(Herd {
                        link_block: *block,
                        leaf_index,
                        suffix: diamond.linking_path(leaf_index)?,
                        probes,
                    });
                }
            }
        }
    }
}
