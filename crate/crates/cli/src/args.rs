use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lsss", version, about = "Latin square secret sharing toolkit")]
pub struct Cli {
    /// Worker threads for collision and herding searches.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallelism: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Latin square utilities.
    #[command(subcommand)]
    Ls(LsCommand),
    /// Pack an order-10 square into a fixed-width container (hex output).
    Pack(PackArgs),
    /// Unpack a container back into an order-10 square.
    Unpack(UnpackArgs),
    /// Reduced-width iterative hash tools.
    #[command(subcommand)]
    Hash(HashCommand),
    /// Deal shares.
    #[command(subcommand)]
    Deal(DealCommand),
    /// Recover a payload from a threshold store and shares.
    Recover(RecoverArgs),
    /// Combine triple shares.
    #[command(subcommand)]
    Combine(CombineCommand),
    /// Check a share against the store's commitments.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum LsCommand {
    /// Generate a Latin square.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the addition table of Z/nZ instead of a random square.
        #[arg(long)]
        cyclic: bool,
    },
    /// Check whether a file holds a complete Latin square.
    Check { file: PathBuf },
    /// Complete a partial square (row-major, ascending symbols).
    Complete { file: PathBuf },
    /// Count completions of a partial square.
    Count {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
    },
    /// Report whether a partial square is a critical set, and whether it is strong.
    Critical { file: PathBuf },
    /// Report whether a partial square is a strong critical set.
    Strong { file: PathBuf },
    /// Run force-out and print every forced placement.
    Force { file: PathBuf },
    /// Extend a Latin rectangle (full leading rows, empty rest) to a square.
    Rect { file: PathBuf },
    /// Count all Latin squares of a small order (n <= 5).
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Product of k! for k = 2..n.
    Bound {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PackFormat {
    #[value(name = "256")]
    Bits256,
    #[value(name = "324")]
    Bits324,
}

#[derive(Args, Debug)]
pub struct PackArgs {
    #[arg(long, value_enum)]
    pub format: PackFormat,
    /// Square file.
    pub file: PathBuf,
}

#[derive(Args, Debug)]
pub struct UnpackArgs {
    #[arg(long, value_enum)]
    pub format: PackFormat,
    /// File holding the hex container.
    #[arg(conflicts_with = "hex", required_unless_present = "hex")]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub hex: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum HashCommand {
    /// Print IV, a compression vector and the hash of a message.
    Vector {
        #[arg(long, default_value_t = 16)]
        digest_bits: u32,
        #[arg(long, conflicts_with = "message_hex")]
        message: Option<String>,
        #[arg(long)]
        message_hex: Option<String>,
    },
    /// Build a diamond over random leaves and check every path.
    DiamondDemo {
        #[arg(long, default_value_t = 16)]
        digest_bits: u32,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Commit to a diamond root now, herd a prefix into it later.
    #[command(subcommand)]
    Nostradamus(NostradamusCommand),
}

#[derive(Subcommand, Debug)]
pub enum NostradamusCommand {
    /// Build and save a diamond; print its root as the commitment.
    Commit {
        #[arg(long, default_value_t = 16)]
        digest_bits: u32,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to save the diamond.
        #[arg(long)]
        out: PathBuf,
    },
    /// Link a prefix into a committed diamond.
    Reveal {
        #[arg(long)]
        diamond: PathBuf,
        #[arg(long)]
        prefix_file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the full message (binary).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DealCommand {
    /// Herding threshold scheme.
    Threshold(DealThresholdArgs),
    /// Critical-set scheme: one file per participant.
    Cds {
        /// The secret square.
        #[arg(long)]
        square: PathBuf,
        /// Critical set files (partial squares).
        #[arg(long = "critical", required = true)]
        critical: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Modular last-share scheme over one critical set.
    Cgs {
        #[arg(long)]
        critical: PathBuf,
        #[arg(long)]
        participants: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct DealThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 16)]
    pub digest_bits: u32,
    #[arg(long, conflicts_with = "gen_square", required_unless_present = "gen_square")]
    pub payload_file: Option<PathBuf>,
    /// Generate a recoverable order-10 square and share its 256-bit packing.
    #[arg(long)]
    pub gen_square: bool,
    /// Drop a minimal subset (comma-separated ids); repeatable.
    #[arg(long)]
    pub exclude: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub share_blocks: Option<usize>,
    /// Skip publishing share commitments.
    #[arg(long)]
    pub no_commitments: bool,
    /// Print the generated square to standard output.
    #[arg(long)]
    pub show_secret: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PayloadKind {
    Auto,
    Raw,
    Square256,
    Square324,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    /// Store directory.
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long = "share", required = true)]
    pub shares: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = PayloadKind::Auto)]
    pub payload: PayloadKind,
    /// Write the raw payload bytes here as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum CombineCommand {
    /// Sum modular shares back into the critical set.
    Cgs {
        #[arg(long = "share", required = true)]
        shares: Vec<PathBuf>,
    },
    /// Pool critical-set shares and complete the square.
    Cds {
        #[arg(long = "share", required = true)]
        shares: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub share: PathBuf,
}
