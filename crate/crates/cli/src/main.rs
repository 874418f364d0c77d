mod commands;
mod config;
mod failure;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_costs, Format, Overrides, RunConfig};
use failure::Outcome;

/// Span programs for read-once formulas: composition, witness sizes,
/// adversary bounds and spectral checks.
#[derive(Parser, Debug)]
#[command(name = "spanforge", version)]
struct Cli {
    /// `key=value` settings file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed (SPANFORGE_SEED overrides).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Random inputs per check beyond the exhaustive limit.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Largest input count checked over all 2^n inputs.
    #[arg(long, global = true)]
    exhaustive_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CostArg {
    /// Comma-separated input costs.
    #[arg(long, value_name = "S1,S2,...")]
    costs: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its tree.
    Parse { file: PathBuf },
    /// Adversary bound, sigma values and depth of a formula.
    Metrics { file: PathBuf },
    /// Compose the canonical span program for a formula.
    Compose {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness sizes at one input or over all inputs.
    Wsize {
        file: PathBuf,
        #[arg(
            long,
            value_name = "BITS",
            conflicts_with = "all",
            required_unless_present = "all"
        )]
        input: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        costs: CostArg,
    },
    /// Program graph, input graph or NAND-tree graph.
    Graph {
        file: PathBuf,
        /// Emit Graphviz instead of JSON.
        #[arg(long)]
        dot: bool,
        #[arg(long, value_name = "BITS")]
        input: Option<String>,
        #[arg(long, requires = "input")]
        nand_tree: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerically check a lemma on a formula or span program.
    Check {
        file: PathBuf,
        /// canonical, norm, compose, dsnorm, witness, balance, gap or all.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, value_name = "BITS")]
        input: Option<String>,
        #[command(flatten)]
        costs: CostArg,
    },
    /// Measure a formula family over a range of sizes and write CSV.
    Sweep {
        /// balanced-andor, skew-andor or random-andor.
        #[arg(long)]
        family: Option<String>,
        /// `lo..hi`, `lo..=hi` or a comma list.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Adversary bound of a single gate.
    Adversary {
        /// Registry name or truth table such as 00010111.
        #[arg(long)]
        gate: String,
        #[command(flatten)]
        costs: CostArg,
        /// JSON matrix to validate as an adversary certificate.
        #[arg(long, value_name = "FILE")]
        certificate: Option<PathBuf>,
    },
}

fn costs_of(arg: &CostArg) -> Outcome<Option<Vec<f64>>> {
    arg.costs.as_deref().map(parse_costs).transpose()
}

fn run(cli: Cli) -> Outcome<i32> {
    let mut overrides = Overrides {
        seed: cli.seed,
        format: cli.format,
        samples: cli.samples,
        exhaustive_limit: cli.exhaustive_limit,
        ..Overrides::default()
    };
    match &cli.command {
        Command::Wsize { costs, .. }
        | Command::Check { costs, .. }
        | Command::Adversary { costs, .. } => {
            overrides.costs = costs_of(costs)?;
        }
        Command::Sweep {
            family,
            sizes,
            csv,
            jobs,
        } => {
            overrides.family = family.clone();
            overrides.sizes = sizes.clone();
            overrides.csv = csv.clone();
            overrides.jobs = *jobs;
        }
        _ => {}
    }
    let config = RunConfig::resolve(cli.config.as_deref(), overrides)?;
    match &cli.command {
        Command::Parse { file } => commands::parse(file),
        Command::Metrics { file } => commands::metrics_cmd(file, &config),
        Command::Compose { file, out } => commands::compose(file, out.as_deref()),
        Command::Wsize { file, input, .. } => commands::wsize(file, input.as_deref(), &config),
        Command::Graph {
            file,
            dot,
            input,
            nand_tree,
            out,
        } => commands::graph(
            file,
            commands::GraphArgs {
                dot: *dot,
                input: input.as_deref(),
                nand_tree: *nand_tree,
                out: out.as_deref(),
            },
        ),
        Command::Check {
            file, lemma, input, ..
        } => commands::check(file, lemma, input.as_deref(), &config),
        Command::Sweep { .. } => commands::sweep_cmd(&config),
        Command::Adversary {
            gate, certificate, ..
        } => commands::adversary(gate, certificate.as_ref(), &config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use failure::Failure;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn wsize_needs_input_or_all() {
        assert!(Cli::try_parse_from(["spanforge", "wsize", "f.txt"]).is_err());
        assert!(Cli::try_parse_from(["spanforge", "wsize", "f.txt", "--all"]).is_ok());
        assert!(
            Cli::try_parse_from(["spanforge", "wsize", "f.txt", "--all", "--input", "01"]).is_err()
        );
    }

    #[test]
    fn failures_map_to_codes() {
        let f: Failure = spanforge::Error::Malformed("x".into()).into();
        assert_eq!(f.code(), 2);
    }
}
