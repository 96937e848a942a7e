//! JSON files for public stores, shares and diamonds.
//!
//! Output is canonical: fixed key order, lowercase hex, two-space indent and a
//! trailing newline, so saving the same value twice gives identical bytes.
//! Loading rejects unknown fields and reports the offending field path.
//! Files are written to a temporary file in the target directory and renamed
//! into place.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::latin::Triple;
use crate::schemes::herding::min_share_blocks;
use crate::schemes::{AccessStructure, HashShare, PublicStore, TripleShare};
use crate::toy_hash::{Block, ChainState, Diamond, HashParams};

pub const STORE_VERSION: &str = "lsss-store-v1";
pub const SHARE_VERSION: &str = "lsss-share-v1";
pub const DIAMOND_VERSION: &str = "lsss-diamond-v1";
pub const TRIPLE_SHARE_VERSION: &str = "lsss-triple-share-v1";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at {field}: {reason}")]
    SchemaViolation { field: String, reason: String },
}

fn violation(field: impl Into<String>, reason: impl Into<String>) -> StoreError {
    StoreError::SchemaViolation {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreFile {
    version: String,
    params: ParamsFile,
    records: Vec<RecordFile>,
    mask: String,
    payload_len: usize,
    commitments: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    digest_bits: u32,
    n_participants: usize,
    share_blocks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subsets: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    members: Vec<usize>,
    path: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShareFile {
    version: String,
    owner: usize,
    blocks: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiamondFile {
    version: String,
    digest_bits: u32,
    levels: Vec<Vec<String>>,
    edges: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleShareFile {
    version: String,
    owner: usize,
    order: usize,
    triples: Vec<[usize; 3]>,
}

fn decode_hex(field: &str, text: &str) -> Result<Vec<u8>, StoreError> {
    if !text.len().is_multiple_of(2) {
        return Err(violation(field, "odd-length hex"));
    }
    if !text.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(violation(field, "hex must be lowercase 0-9a-f"));
    }
    hex::decode(text).map_err(|e| violation(field, e.to_string()))
}

fn decode_block(field: &str, text: &str) -> Result<Block, StoreError> {
    let bytes = decode_hex(field, text)?;
    let arr: [u8; 8] = bytes
        .try_into()
        .map_err(|b: Vec<u8>| violation(field, format!("block has {} bytes, expected 8", b.len())))?;
    Ok(Block(arr))
}

fn decode_blocks(field: &str, texts: &[String]) -> Result<Vec<Block>, StoreError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| decode_block(&format!("{field}[{i}]"), t))
        .collect()
}

fn check_version(found: &str, expected: &str) -> Result<(), StoreError> {
    if found != expected {
        return Err(violation("version", format!("expected {expected:?}, found {found:?}")));
    }
    Ok(())
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, StoreError> {
    serde_json::from_str(text).map_err(|e| violation("$", e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn hex_list(blocks: &[Block]) -> Vec<String> {
    blocks.iter().map(Block::to_hex).collect()
}

pub fn store_to_string(store: &PublicStore) -> String {
    let access = &store.access;
    let (threshold, subsets) = match access.threshold_value() {
        Some(t) => (Some(t), None),
        None => (None, Some(access.subsets().to_vec())),
    };
    to_json(&StoreFile {
        version: STORE_VERSION.into(),
        params: ParamsFile {
            digest_bits: store.params.digest_bits(),
            n_participants: access.n_participants(),
            share_blocks: store.share_blocks,
            threshold,
            subsets,
        },
        records: store
            .records
            .iter()
            .map(|(members, path)| RecordFile {
                members: members.clone(),
                path: hex_list(path),
            })
            .collect(),
        mask: hex::encode(&store.mask),
        payload_len: store.mask.len(),
        commitments: store.commitments.iter().map(hex::encode).collect(),
    })
}

pub fn store_from_str(text: &str) -> Result<PublicStore, StoreError> {
    let file: StoreFile = parse_json(text)?;
    check_version(&file.version, STORE_VERSION)?;
    let p = &file.params;
    let params = HashParams::new(p.digest_bits).map_err(|e| violation("params.digest_bits", e.to_string()))?;
    let n = p.n_participants;
    let access = match (&p.threshold, &p.subsets) {
        (Some(t), None) => AccessStructure::threshold(n, *t),
        (None, Some(subsets)) => AccessStructure::new(n, subsets.clone()),
        _ => return Err(violation("params", "exactly one of threshold and subsets is required")),
    }
    .map_err(|e| violation("params", e.to_string()))?;
    if p.share_blocks < min_share_blocks(params) {
        return Err(violation("params.share_blocks", "shares narrower than the digest"));
    }

    let mut records = BTreeMap::new();
    for (i, r) in file.records.iter().enumerate() {
        let field = format!("records[{i}]");
        if r.members.is_empty() || r.members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(violation(format!("{field}.members"), "must be non-empty, ascending and unique"));
        }
        if r.members.iter().any(|&m| m >= n) {
            return Err(violation(format!("{field}.members"), format!("member id not below {n}")));
        }
        let path = decode_blocks(&format!("{field}.path"), &r.path)?;
        if records.insert(r.members.clone(), path).is_some() {
            return Err(violation(format!("{field}.members"), "duplicate record"));
        }
    }
    if !records.keys().eq(access.subsets().iter().collect::<std::collections::BTreeSet<_>>()) {
        return Err(violation("records", "need exactly one record per minimal subset"));
    }

    let mask = decode_hex("mask", &file.mask)?;
    if mask.len() != file.payload_len {
        return Err(violation("payload_len", format!("mask holds {} bytes", mask.len())));
    }
    let commitments = file
        .commitments
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let field = format!("commitments[{i}]");
            decode_hex(&field, c)?
                .try_into()
                .map_err(|_| violation(field, "commitment must be 32 bytes"))
        })
        .collect::<Result<Vec<[u8; 32]>, _>>()?;
    if !commitments.is_empty() && commitments.len() != n {
        return Err(violation("commitments", format!("expected {n} commitments or none")));
    }
    Ok(PublicStore {
        params,
        share_blocks: p.share_blocks,
        access,
        records,
        mask,
        commitments,
    })
}

pub fn share_to_string(share: &HashShare) -> String {
    to_json(&ShareFile {
        version: SHARE_VERSION.into(),
        owner: share.owner,
        blocks: hex_list(&share.blocks),
    })
}

pub fn share_from_str(text: &str) -> Result<HashShare, StoreError> {
    let file: ShareFile = parse_json(text)?;
    check_version(&file.version, SHARE_VERSION)?;
    if file.blocks.is_empty() {
        return Err(violation("blocks", "a share needs at least one block"));
    }
    Ok(HashShare {
        owner: file.owner,
        blocks: decode_blocks("blocks", &file.blocks)?,
    })
}

pub fn diamond_to_string(diamond: &Diamond) -> String {
    let params = diamond.params();
    to_json(&DiamondFile {
        version: DIAMOND_VERSION.into(),
        digest_bits: params.digest_bits(),
        levels: diamond
            .levels()
            .iter()
            .map(|level| level.iter().map(|&s| params.state_to_hex(s)).collect())
            .collect(),
        edges: diamond.edges().iter().map(|e| hex_list(e)).collect(),
    })
}

pub fn diamond_from_str(text: &str) -> Result<Diamond, StoreError> {
    let file: DiamondFile = parse_json(text)?;
    check_version(&file.version, DIAMOND_VERSION)?;
    let params = HashParams::new(file.digest_bits).map_err(|e| violation("digest_bits", e.to_string()))?;
    let levels = file
        .levels
        .iter()
        .enumerate()
        .map(|(i, level)| {
            level
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let field = format!("levels[{i}][{j}]");
                    decode_hex(&field, s)?;
                    params.state_from_hex(s).map_err(|e| violation(field, e.to_string()))
                })
                .collect::<Result<Vec<ChainState>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let edges = file
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| decode_blocks(&format!("edges[{i}]"), e))
        .collect::<Result<Vec<_>, _>>()?;
    Diamond::from_parts(params, levels, edges).map_err(|e| violation("levels", e))
}

pub fn triple_share_to_string(share: &TripleShare) -> String {
    to_json(&TripleShareFile {
        version: TRIPLE_SHARE_VERSION.into(),
        owner: share.owner,
        order: share.order,
        triples: share.triples.iter().map(|t| [t.row, t.col, t.sym]).collect(),
    })
}

pub fn triple_share_from_str(text: &str) -> Result<TripleShare, StoreError> {
    let file: TripleShareFile = parse_json(text)?;
    check_version(&file.version, TRIPLE_SHARE_VERSION)?;
    if file.order == 0 {
        return Err(violation("order", "order must be positive"));
    }
    if file.triples.is_empty() {
        return Err(violation("triples", "a share needs at least one triple"));
    }
    let triples = file
        .triples
        .iter()
        .enumerate()
        .map(|(i, &[r, c, k])| {
            if r >= file.order || c >= file.order || k >= file.order {
                Err(violation(format!("triples[{i}]"), format!("component not below {}", file.order)))
            } else {
                Ok(Triple::new(r, c, k))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TripleShare {
        owner: file.owner,
        order: file.order,
        triples,
    })
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, StoreError> {
    std::fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_store(store: &PublicStore, path: &Path) -> Result<(), StoreError> {
    write_atomic(path, &store_to_string(store))
}

pub fn load_store(path: &Path) -> Result<PublicStore, StoreError> {
    store_from_str(&read_text(path)?)
}

pub fn save_share(share: &HashShare, path: &Path) -> Result<(), StoreError> {
    write_atomic(path, &share_to_string(share))
}

pub fn load_share(path: &Path) -> Result<HashShare, StoreError> {
    share_from_str(&read_text(path)?)
}

pub fn save_diamond(diamond: &Diamond, path: &Path) -> Result<(), StoreError> {
    write_atomic(path, &diamond_to_string(diamond))
}

pub fn load_diamond(path: &Path) -> Result<Diamond, StoreError> {
    diamond_from_str(&read_text(path)?)
}

pub fn save_triple_share(share: &TripleShare, path: &Path) -> Result<(), StoreError> {
    write_atomic(path, &triple_share_to_string(share))
}

pub fn load_triple_share(path: &Path) -> Result<TripleShare, StoreError> {
    triple_share_from_str(&read_text(path)?)
}
