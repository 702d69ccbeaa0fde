use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "obstruct",
    version,
    about = "Slice obstructions for odd pretzel knots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify P(p,q,r).
    #[command(allow_negative_numbers = true)]
    Classify {
        p: i64,
        q: i64,
        r: i64,
        /// Emit the schema-1 JSON report.
        #[arg(long)]
        json: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Classify every knot in a range of triples.
    Scan(ScanArgs),
    /// Correction terms of every spin^c structure of a plumbing.
    Dinv {
        graph: PathBuf,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Only class number `k` in cokernel order.
        #[arg(long)]
        class: Option<u64>,
    },
    /// Embeddings of a negative definite form into the diagonal lattice.
    Embed {
        graph: PathBuf,
        /// Rank of the target lattice; defaults to the number of vertices.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// The twist knot P(1,q,1).
    #[command(allow_negative_numbers = true)]
    Twist {
        q: i64,
        #[arg(long)]
        json: bool,
    },
    /// Individual counting tests for P(p,q,r) with p, r >= 3 and q <= -3.
    #[command(subcommand)]
    Order(OrderCommand),
}

#[derive(Debug, Subcommand)]
pub enum OrderCommand {
    /// Inequality between required and attainable vanishing classes.
    #[command(allow_negative_numbers = true)]
    Bound {
        p: i64,
        q: i64,
        r: i64,
        /// Number of summands.
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// The sharper count when -q = p + r + min(p,r).
    #[command(allow_negative_numbers = true)]
    Refined { p: i64, q: i64, r: i64 },
    /// Symmetric matrices B for the n-fold sum.
    #[command(allow_negative_numbers = true)]
    BMatrices {
        p: i64,
        q: i64,
        r: i64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Entry bound; defaults to one that makes the search exhaustive.
        #[arg(long)]
        bound: Option<i64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    /// Ribbon or slice-candidate verdicts.
    Slice,
    Infinite,
    /// pq + qr + pr = -1.
    TrivialAlexander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ScanArgs {
    /// Odd range `a:b` (or a single value) for p.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Missing ranges become every odd value with 3 <= |x| <= B.
    #[arg(long)]
    pub bound: Option<i64>,
    #[arg(long, value_enum)]
    pub filter: Option<Filter>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; overrides OBSTRUCT_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
}
