use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsss::latin::{self, ScanOrder};
use lsss::packing::{self, Packed256, Packed324};
use lsss::schemes::{self, AccessStructure, HashShare, SetupOptions, TripleShare};
use lsss::store;
use lsss::toy_hash::{blocks_from_bytes, md_pad};
use lsss::{Block, ChainState, HashParams, LatinSquare, PartialLatinSquare, Searcher, Triple};

use crate::args::*;
use crate::failure::Failure;

type Result<T> = std::result::Result<T, Failure>;

pub fn run(cli: Cli) -> Result<()> {
    if cli.parallelism == 0 {
        return Err(Failure::usage("--parallelism must be at least 1"));
    }
    let threads = cli.parallelism;
    match cli.command {
        Command::Ls(cmd) => ls(cmd),
        Command::Pack(a) => pack(a),
        Command::Unpack(a) => unpack(a),
        Command::Hash(cmd) => hash(cmd, threads),
        Command::Deal(cmd) => deal(cmd, threads),
        Command::Recover(a) => recover(a),
        Command::Combine(cmd) => combine(cmd),
        Command::Verify(a) => verify(a),
    }
}

/// Uses the given seed, or draws one and reports it so the run can be repeated.
fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn read_partial(path: &Path) -> Result<PartialLatinSquare> {
    Ok(store::read_text(path)?.parse()?)
}

fn read_square(path: &Path) -> Result<LatinSquare> {
    Ok(store::read_text(path)?.parse()?)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Reads a header line `n` and `n` rows of `n` integers without checking the
/// Latin property, so `ls check` can report on invalid grids.
fn read_grid(path: &Path) -> Result<Vec<Vec<usize>>> {
    let text = store::read_text(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| Failure::usage("missing or bad order line"))?;
    let grid: Vec<Vec<usize>> = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::usage("grid cells must be non-negative integers"))?;
    if grid.len() != n {
        return Err(Failure::usage(format!("expected {n} rows, found {}", grid.len())));
    }
    Ok(grid)
}

fn ls(cmd: LsCommand) -> Result<()> {
    match cmd {
        LsCommand::Gen { n, seed, cyclic } => {
            let sq = if cyclic {
                LatinSquare::cayley(n)?
            } else {
                LatinSquare::random(n, seed_or_fresh(seed))?
            };
            print!("{sq}");
        }
        LsCommand::Check { file } => {
            let ok = latin::validate_square(&read_grid(&file)?)?;
            println!("latin: {}", yes_no(ok));
            if !ok {
                return Err(Failure::domain("NotLatin", "the grid is not a Latin square"));
            }
        }
        LsCommand::Complete { file } => {
            print!("{}", latin::complete(&read_partial(&file)?)?);
        }
        LsCommand::Count { file, limit } => {
            let count = latin::count_completions(&read_partial(&file)?, limit);
            if count >= limit {
                println!("completions: at least {count}");
            } else {
                println!("completions: {count}");
            }
        }
        LsCommand::Critical { file } => {
            let p = read_partial(&file)?;
            let critical = latin::is_critical_set(&p);
            let strong = critical && latin::is_strong_critical_set(&p);
            println!("critical: {}, strong: {}", yes_no(critical), yes_no(strong));
        }
        LsCommand::Strong { file } => {
            println!("strong: {}", yes_no(latin::is_strong_critical_set(&read_partial(&file)?)));
        }
        LsCommand::Force { file } => {
            let trace = latin::force_out_with(&read_partial(&file)?, ScanOrder::RowMajor)?;
            for t in &trace.steps {
                println!("{} {} {}", t.row, t.col, t.sym);
            }
            println!("steps: {}", trace.steps.len());
            println!("complete: {}", yes_no(trace.is_complete()));
            print!("{}", trace.end);
        }
        LsCommand::Rect { file } => {
            let rows = read_partial(&file)?.rectangle_rows().ok_or_else(|| {
                Failure::domain(
                    "InvalidRectangle",
                    "filled cells must be whole leading rows with the rest empty",
                )
            })?;
            print!("{}", latin::extend_rectangle(&rows)?);
        }
        LsCommand::Enumerate { n } => println!("{}", latin::enumerate_count(n)?),
        LsCommand::Bound { n } => println!("{}", latin::lower_bound(n)?),
    }
    Ok(())
}

fn pack(a: PackArgs) -> Result<()> {
    let sq = read_square(&a.file)?;
    match a.format {
        PackFormat::Bits256 => println!("{}", packing::pack256(&sq)?),
        PackFormat::Bits324 => println!("{}", packing::pack324(&sq)?),
    }
    Ok(())
}

fn unpack(a: UnpackArgs) -> Result<()> {
    let text = match (a.hex, a.file) {
        (Some(h), _) => h,
        (None, Some(f)) => store::read_text(&f)?,
        (None, None) => return Err(Failure::usage("give a file or --hex")),
    };
    let text = text.trim();
    let sq = match a.format {
        PackFormat::Bits256 => packing::unpack256(&text.parse::<Packed256>()?)?,
        PackFormat::Bits324 => packing::unpack324(&text.parse::<Packed324>()?)?,
    };
    print!("{sq}");
    Ok(())
}

fn hash(cmd: HashCommand, threads: usize) -> Result<()> {
    match cmd {
        HashCommand::Vector { digest_bits, message, message_hex } => {
            let params = HashParams::new(digest_bits)?;
            let msg = match (message, message_hex) {
                (_, Some(h)) => hex::decode(h.trim())
                    .map_err(|e| Failure::usage(format!("--message-hex: {e}")))?,
                (Some(m), None) => m.into_bytes(),
                (None, None) => Vec::new(),
            };
            let zero = params.state(0)?;
            println!("digest_bits: {digest_bits}");
            println!("iv: {}", params.state_to_hex(params.iv()));
            println!(
                "compress(0, 0000000000000000): {}",
                params.state_to_hex(params.compress(zero, &Block([0; 8])))
            );
            println!("message: {}", hex::encode(&msg));
            println!("padded_blocks: {}", md_pad(&msg).len() / 8);
            println!("hash: {}", params.state_to_hex(params.hash_full(&msg)));
        }
        HashCommand::DiamondDemo { digest_bits, k, seed } => {
            let params = HashParams::new(digest_bits)?;
            let seed = seed_or_fresh(seed);
            let diamond = build_diamond(params, k, seed, threads)?;
            let root = diamond.root();
            let paths_ok = diamond.leaves().iter().enumerate().all(|(i, &leaf)| {
                diamond
                    .linking_path(i)
                    .map(|path| params.iterate(leaf, &path) == root)
                    .unwrap_or(false)
            });
            println!("digest_bits: {digest_bits}");
            println!("leaves: {}", diamond.leaves().len());
            println!("depth: {}", diamond.depth());
            println!("root: {}", params.state_to_hex(root));
            println!("edges verified: {}", yes_no(diamond.verify()));
            println!("paths verified: {}", yes_no(paths_ok));
        }
        HashCommand::Nostradamus(NostradamusCommand::Commit { digest_bits, k, seed, out }) => {
            let params = HashParams::new(digest_bits)?;
            let seed = seed_or_fresh(seed);
            let diamond = build_diamond(params, k, seed, threads)?;
            store::save_diamond(&diamond, &out)?;
            eprintln!("saved diamond with {} leaves to {}", diamond.leaves().len(), out.display());
            println!("commitment: {}", params.state_to_hex(diamond.root()));
        }
        HashCommand::Nostradamus(NostradamusCommand::Reveal { diamond, prefix_file, seed, out }) => {
            let diamond = store::load_diamond(&diamond)?;
            let params = diamond.params();
            let mut prefix = read_bytes(&prefix_file)?;
            let pad = (8 - prefix.len() % 8) % 8;
            if pad > 0 {
                eprintln!("padding prefix with {pad} zero bytes to a block boundary");
                prefix.resize(prefix.len() + pad, 0);
            }
            let seed = seed_or_fresh(seed);
            eprintln!("herding {} prefix blocks into the diamond", prefix.len() / 8);
            let herd = Searcher::new(params)
                .with_parallelism(threads)
                .herd_prefix(&diamond, &prefix, seed)?;
            let message = herd.message(&prefix);
            let blocks = blocks_from_bytes(&message)?;
            let end = params.iterate(params.iv(), &blocks);
            let hex_state = |s: ChainState| params.state_to_hex(s);
            println!("commitment: {}", hex_state(diamond.root()));
            println!("prefix_blocks: {}", prefix.len() / 8);
            println!("link_block: {}", herd.link_block);
            println!("leaf_index: {}", herd.leaf_index);
            println!("leaf_state: {}", hex_state(diamond.leaves()[herd.leaf_index]));
            let suffix: Vec<String> = herd.suffix.iter().map(Block::to_hex).collect();
            println!("suffix: {}", suffix.join(" "));
            println!("probes: {}", herd.probes);
            println!("message_blocks: {}", blocks.len());
            println!("chain_end: {}", hex_state(end));
            println!("match: {}", yes_no(end == diamond.root()));
            if let Some(out) = out {
                write_bytes(&out, &message)?;
                eprintln!("wrote {} bytes to {}", message.len(), out.display());
            }
        }
    }
    Ok(())
}

/// `2^k` distinct random leaves, then a diamond over them. Leaves and the
/// collision search use separate seeds drawn from one master stream.
fn build_diamond(params: HashParams, k: usize, seed: u64, threads: usize) -> Result<lsss::Diamond> {
    if k == 0 || k > 16 || k as u32 >= params.digest_bits() {
        return Err(Failure::usage(format!(
            "k must be between 1 and min(16, digest_bits - 1), got {k}"
        )));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mask = (1u64 << params.digest_bits()) - 1;
    let mut seen = BTreeSet::new();
    let mut leaves = Vec::with_capacity(1 << k);
    while leaves.len() < 1 << k {
        let v = master.next_u64() & mask;
        if seen.insert(v) {
            leaves.push(params.state(v)?);
        }
    }
    eprintln!("building diamond over {} leaves", leaves.len());
    Ok(Searcher::new(params)
        .with_parallelism(threads)
        .build_diamond(&leaves, master.next_u64())?)
}

fn parse_ids(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::usage(format!("--exclude expects comma-separated ids, got {text:?}")))
}

fn share_path(dir: &Path, owner: usize) -> PathBuf {
    dir.join(format!("share-{owner}.json"))
}

fn store_path(dir: &Path) -> PathBuf {
    dir.join("store.json")
}

fn deal(cmd: DealCommand, threads: usize) -> Result<()> {
    match cmd {
        DealCommand::Threshold(a) => deal_threshold(a, threads),
        DealCommand::Cds { square, critical, out } => {
            let square = read_square(&square)?;
            let sets = critical
                .iter()
                .map(|p| read_partial(p))
                .collect::<Result<Vec<_>>>()?;
            let assignment = schemes::one_triple_each(&sets);
            let shares = schemes::cds_deal(&square, &sets, &assignment)?;
            save_triple_shares(&shares, &out)
        }
        DealCommand::Cgs { critical, participants, seed, out } => {
            let secret = read_partial(&critical)?;
            let shares = schemes::cgs_deal(&secret, participants, seed_or_fresh(seed))?;
            save_triple_shares(&shares, &out)
        }
    }
}

fn save_triple_shares(shares: &[TripleShare], dir: &Path) -> Result<()> {
    create_dir(dir)?;
    for s in shares {
        let path = share_path(dir, s.owner);
        store::save_triple_share(s, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn deal_threshold(a: DealThresholdArgs, threads: usize) -> Result<()> {
    let params = HashParams::new(a.digest_bits)?;
    let excluded = a.exclude.iter().map(|e| parse_ids(e)).collect::<Result<Vec<_>>>()?;
    let access = AccessStructure::threshold(a.n, a.t)?.excluding(&excluded)?;
    let seed = seed_or_fresh(a.seed);
    let mut master = ChaCha8Rng::seed_from_u64(seed);

    let payload = match &a.payload_file {
        Some(path) => read_bytes(path)?,
        None => {
            let square = loop {
                let candidate = LatinSquare::random(packing::ORDER, master.next_u64())?;
                if packing::is_recoverable256(&candidate)? {
                    break candidate;
                }
            };
            if a.show_secret {
                print!("{square}");
            }
            packing::pack256(&square)?.as_bytes().to_vec()
        }
    };
    if payload.is_empty() {
        return Err(Failure::usage("the payload is empty"));
    }

    let options = SetupOptions {
        share_blocks: a.share_blocks,
        verifiable: !a.no_commitments,
        parallelism: threads,
    };
    eprintln!(
        "dealing to {} participants over {} authorized subsets",
        access.n_participants(),
        access.subsets().len()
    );
    let (shares, public) =
        schemes::threshold_setup(params, &access, &payload, master.next_u64(), &options)?;

    create_dir(&a.out)?;
    store::save_store(&public, &store_path(&a.out))?;
    for s in &shares {
        store::save_share(s, &share_path(&a.out, s.owner))?;
    }
    eprintln!("wrote {} and {} share files", store_path(&a.out).display(), shares.len());
    Ok(())
}

fn load_hash_shares(paths: &[PathBuf]) -> Result<Vec<HashShare>> {
    paths.iter().map(|p| Ok(store::load_share(p)?)).collect()
}

fn recover(a: RecoverArgs) -> Result<()> {
    let public = store::load_store(&store_path(&a.store))?;
    let shares = load_hash_shares(&a.shares)?;
    let payload = schemes::threshold_recover(&public, &shares)?;
    if let Some(out) = &a.out {
        write_bytes(out, &payload)?;
    }
    let kind = match a.payload {
        PayloadKind::Auto => match payload.len() {
            32 => PayloadKind::Square256,
            48 => PayloadKind::Square324,
            _ => PayloadKind::Raw,
        },
        k => k,
    };
    match kind {
        PayloadKind::Square256 => {
            let packed = Packed256::from_bytes(&payload)?;
            print!("{}", packing::unpack256(&packed)?);
        }
        PayloadKind::Square324 => {
            let packed = Packed324::from_bytes(&payload)?;
            print!("{}", packing::unpack324(&packed)?);
        }
        PayloadKind::Raw | PayloadKind::Auto => println!("{}", hex::encode(&payload)),
    }
    Ok(())
}

fn load_triple_shares(paths: &[PathBuf]) -> Result<(usize, Vec<TripleShare>)> {
    let shares = paths
        .iter()
        .map(|p| Ok(store::load_triple_share(p)?))
        .collect::<Result<Vec<_>>>()?;
    let order = shares[0].order;
    if shares.iter().any(|s| s.order != order) {
        return Err(Failure::usage("shares are for squares of different orders"));
    }
    Ok((order, shares))
}

fn combine(cmd: CombineCommand) -> Result<()> {
    match cmd {
        CombineCommand::Cgs { shares } => {
            let (order, shares) = load_triple_shares(&shares)?;
            let triples = schemes::cgs_combine(&shares, order)?;
            for t in &triples {
                println!("{} {} {}", t.row, t.col, t.sym);
            }
            match PartialLatinSquare::from_triples(order, triples.iter().copied()) {
                Ok(p) => print!("{p}"),
                Err(_) => eprintln!("the combined triples do not form a partial Latin square"),
            }
        }
        CombineCommand::Cds { shares } => {
            let (order, shares) = load_triple_shares(&shares)?;
            let pool: Vec<Triple> = shares.iter().flat_map(|s| s.triples.iter().copied()).collect();
            print!("{}", schemes::cds_recover(order, &pool)?);
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let public = store::load_store(&store_path(&a.store))?;
    let share = store::load_share(&a.share)?;
    match schemes::vss_verify(&share, &public)? {
        Some(i) if i == share.owner => {
            println!("verified: yes (commitment {i})");
            Ok(())
        }
        Some(i) => Err(Failure::domain(
            "OwnerMismatch",
            format!("share claims owner {} but matches commitment {i}", share.owner),
        )),
        None => Err(Failure::domain(
            "VerificationFailed",
            "the share matches no published commitment",
        )),
    }
}
