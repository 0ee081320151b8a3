//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::render::{DEFAULT_PRECISION, MAX_PRECISION};

#[derive(Debug, Parser)]
#[command(
    name = "lr-abundant",
    version,
    about = "LR numbers, the Robin inequality and related prime-sum bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit one record per LR number n_1, n_2, ...
    Generate(GenerateArgs),
    /// Check G(n_m) < e^γ for every n_m > 5040 up to --count
    Robin(RobinArgs),
    /// Truncated sums for W1, M and W2 with tail bounds
    Constants(ConstantsArgs),
    /// Run bound checkers against sieved Chebyshev functions
    Bounds(BoundsArgs),
    /// Brute-force maximum of σ(n)/n over integers with Ω(n) = m
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Last m to emit; with --resume, rows continue from the checkpoint
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write records here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a checkpoint here after the last row
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Also checkpoint whenever m is a multiple of this
    #[arg(long, requires = "checkpoint", value_parser = clap::value_parser!(u64).range(1..))]
    pub checkpoint_every: Option<u64>,
    /// Continue from a checkpoint file
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct RobinArgs {
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = DEFAULT_PRECISION, value_parser = parse_precision)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Truncation point, e.g. 1e7
    #[arg(long, default_value = "1e7", value_parser = parse_scaled)]
    pub max_z: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum BoundKind {
    Lemma1,
    Lemma2,
    #[value(alias = "2")]
    Theorem2,
    #[value(alias = "4")]
    Theorem4,
    #[value(alias = "6")]
    Theorem6,
    #[value(alias = "7")]
    Theorem7,
    Dusart,
    Mertens,
}

impl BoundKind {
    /// Checkers evaluated once per LR number.
    pub fn per_m(self) -> bool {
        !matches!(self, BoundKind::Dusart | BoundKind::Mertens)
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Comma-separated checkers; all of them when omitted
    #[arg(long, value_enum, value_delimiter = ',')]
    pub theorem: Vec<BoundKind>,
    /// Check every m in 1..=m-max
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub m_max: u64,
    /// Sieve θ, ψ and ψ_Z up to this bound
    #[arg(long, default_value = "1e7", value_parser = parse_scaled)]
    pub sieve_limit: u64,
    /// Grid size for the Dusart check
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub dusart_points: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub m: u64,
}

fn parse_precision(s: &str) -> Result<usize, String> {
    let d: usize = s.parse().map_err(|e| format!("{e}"))?;
    if d > MAX_PRECISION {
        return Err(format!("at most {MAX_PRECISION} decimals"));
    }
    Ok(d)
}

/// Accepts plain integers (underscores allowed) and integral scientific
/// notation such as `1e7` or `2.5e6`.
pub fn parse_scaled(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = t.parse().map_err(|_| format!("not a number: {s}"))?;
    if !((0.0..=9_007_199_254_740_992.0).contains(&x) && x.fract() == 0.0) {
        return Err(format!("not a non-negative integer below 2^53: {s}"));
    }
    Ok(x as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_integers() {
        assert_eq!(parse_scaled("1e7"), Ok(10_000_000));
        assert_eq!(parse_scaled("2.5e6"), Ok(2_500_000));
        assert_eq!(parse_scaled("10_000"), Ok(10_000));
        assert!(parse_scaled("1.5").is_err());
        assert!(parse_scaled("-1e3").is_err());
        assert!(parse_scaled("1e30").is_err());
        assert!(parse_scaled("ten").is_err());
    }

    #[test]
    fn theorem_aliases() {
        let cli =
            Cli::try_parse_from(["lr-abundant", "bounds", "--theorem", "7,lemma1,2"]).unwrap();
        let Command::Bounds(b) = cli.command else {
            panic!()
        };
        assert_eq!(
            b.theorem,
            [BoundKind::Theorem7, BoundKind::Lemma1, BoundKind::Theorem2]
        );
    }

    #[test]
    fn rejects_bad_values() {
        for argv in [
            &["lr-abundant", "generate", "--count", "0"][..],
            &["lr-abundant", "generate", "--precision", "16"],
            &["lr-abundant", "generate", "--checkpoint-every", "5"],
            &["lr-abundant", "oracle", "--m", "13"],
            &["lr-abundant", "generate", "--format", "xml"],
        ] {
            assert!(Cli::try_parse_from(argv).is_err(), "{argv:?}");
        }
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
