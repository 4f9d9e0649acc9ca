//! Command-line front end: game and profile files, reports and the `wsne`
//! subcommands.

pub mod commands;
pub mod gamefile;
pub mod profile;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use wsne_core::generators::GameKind;
use wsne_core::{parse_rational, Rational};

pub use commands::{run, CliError, Outcome};
pub use gamefile::{parse_game, serialize_game, FormatError, LoadedGame};
pub use profile::{parse_profile, serialize_profile};
pub use report::{NumberFormat, Report};

pub const EXIT_OK: u8 = 0;
pub const EXIT_BOUND_EXCEEDED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ANOMALY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "wsne", version, about = "Exact approximate well-supported Nash equilibria of bimatrix games")]
pub struct Cli {
    /// Worker threads for parallel sections (default: one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// How numbers are printed.
    #[arg(long, value_enum, global = true, default_value_t = NumberFormat::Both)]
    pub format: NumberFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Find a (2/3 - 0.005913759)-WSNE of a game.
    Solve {
        /// Game file, or `-` for stdin.
        game: PathBuf,
        /// Rescale each payoff matrix onto [0, 1] instead of rejecting it.
        #[arg(long)]
        normalize: bool,
        /// Exit with status 1 if epsilon exceeds this (default 2/3 - 5913759/10^9).
        #[arg(long, value_parser = rational_arg)]
        bound: Option<Rational>,
    },
    /// Compute the exact WSNE epsilon of a given profile.
    Verify {
        game: PathBuf,
        /// Profile file, or `-` for stdin.
        profile: PathBuf,
        #[arg(long)]
        normalize: bool,
        /// Exit with status 1 if epsilon exceeds this (default 2/3 - 5913759/10^9).
        #[arg(long, value_parser = rational_arg)]
        bound: Option<Rational>,
    },
    /// Bad-row diagnostics for a profile (default: the zero-sum min-max profile).
    Analyze {
        game: PathBuf,
        profile: Option<PathBuf>,
        #[arg(long)]
        normalize: bool,
        /// Threshold parameter (default 5913759/10^9).
        #[arg(long, value_parser = rational_arg)]
        z: Option<Rational>,
        /// Also report the mixed strategies y(t) and x(t) at this t.
        #[arg(long, value_parser = rational_arg)]
        t: Option<Rational>,
    },
    /// Grid search for a witness (z, t0, t1) of the 2/3 - z bound.
    ProveWitness {
        /// Evaluate a single z instead of a range.
        #[arg(long, value_parser = rational_arg, conflicts_with_all = ["z_lo", "z_hi"])]
        z: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        z_lo: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        z_hi: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        z_step: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        t_step: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        t_max: Option<Rational>,
        /// Print the outcome at every z.
        #[arg(long)]
        verbose: bool,
    },
    /// Write a fixture or seeded random game.
    Generate {
        #[arg(long, value_parser = kind_arg)]
        kind: GameKind,
        #[arg(long, default_value_t = 4)]
        rows: usize,
        #[arg(long, default_value_t = 4)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid denominator d: entries are multiples of 1/d.
        #[arg(long, default_value_t = 12)]
        denominator: u32,
        /// Perturbation for the `figure1` kind.
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
    },
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn kind_arg(text: &str) -> Result<GameKind, String> {
    GameKind::from_name(text).ok_or_else(|| {
        let names: Vec<&str> = GameKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind `{text}`; expected one of {}", names.join(", "))
    })
}
