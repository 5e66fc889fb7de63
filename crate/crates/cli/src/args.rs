use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "lightswitch",
    version,
    about = "Balance light boards and cubes with row, column and plane switches"
)]
pub struct Cli {
    /// Output mode. `json` writes exactly one document to stdout.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Worker threads for parallel searches (affects speed only).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Switch a board (n even, m ≤ n) to imbalance 0 or 2.
    Balance {
        #[command(flatten)]
        source: BoardSource,
        /// Also run the exhaustive search and report its minimum.
        #[arg(long)]
        oracle: bool,
        /// Largest `m + n - 1` the exhaustive search may take on.
        #[arg(long, default_value_t = lightswitch_core::oracle::DEFAULT_RECT_CAP)]
        cap: usize,
    },
    /// Exact minimum imbalance of a board or a cube (side 2 or 4).
    Oracle {
        #[command(flatten)]
        source: AnySource,
        /// Largest number of free switches the search may take on.
        #[arg(long, default_value_t = lightswitch_core::oracle::DEFAULT_RECT_CAP)]
        cap: usize,
    },
    /// Print a seeded random board (--rows/--cols) or cube (--side).
    Gen {
        #[arg(long, requires = "cols", conflicts_with = "side")]
        rows: Option<usize>,
        #[arg(long, requires = "rows")]
        cols: Option<usize>,
        #[arg(long)]
        side: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cube analyses.
    #[command(subcommand)]
    Cube(CubeCommand),
    /// Time `balance` on square boards and fit the growth exponent.
    Bench {
        /// Board sides to time.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,24,32")]
        sizes: Vec<usize>,
        /// Boards per size.
        #[arg(long, default_value_t = 20)]
        boards: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CubeCommand {
    /// Switch a 4x4x4 cube to imbalance at most 4.
    Solve {
        #[command(flatten)]
        source: CubeSource,
    },
    /// Exact minimum imbalance of a cube of side 2 or 4.
    Min {
        #[command(flatten)]
        source: CubeSource,
    },
    /// Worst-case minimum imbalance over every 2x2x2 cube (prints 2).
    VerifyP2,
    /// Largest average layer imbalance of a 4x4 board over its 256 switch patterns.
    Lemma4a,
    /// Feasibility of every z-profile with z switches alone.
    Zchar,
    /// Check plane-sum divisibility by 4 and mod-8 conservation along a switch script.
    Prop3 {
        #[command(flatten)]
        source: CubeSource,
        /// Plane presses, e.g. "x0 y2 z3".
        #[arg(long, conflicts_with = "steps")]
        script: Option<String>,
        /// Use this many random presses instead of a script.
        #[arg(long)]
        steps: Option<usize>,
    },
}

/// A board from a file or from the generator.
#[derive(Args, Debug)]
pub struct BoardSource {
    /// Board file (`-` for stdin).
    #[arg(short, long, conflicts_with_all = ["rows", "cols"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "cols")]
    pub rows: Option<usize>,
    #[arg(long, requires = "rows")]
    pub cols: Option<usize>,
    /// Seed for a generated board.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A cube from a file or from the generator.
#[derive(Args, Debug)]
pub struct CubeSource {
    /// Cube file (`-` for stdin).
    #[arg(short, long, conflicts_with = "side")]
    pub input: Option<PathBuf>,
    /// Side of a generated cube.
    #[arg(long)]
    pub side: Option<usize>,
    /// Seed for a generated cube.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A board or a cube; files are told apart by their header.
#[derive(Args, Debug)]
pub struct AnySource {
    /// Board or cube file (`-` for stdin).
    #[arg(short, long, conflicts_with_all = ["rows", "cols", "side"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "cols", conflicts_with = "side")]
    pub rows: Option<usize>,
    #[arg(long, requires = "rows")]
    pub cols: Option<usize>,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}
