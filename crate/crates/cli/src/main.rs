use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dsmt_cli::{commands, problem, CliError, Format, Options};
use dsmt_core::fusion::Rule;

#[derive(Parser)]
#[command(
    name = "dsmt",
    version,
    about = "Fuse belief assignments with DSm, PCR5 and classical rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(clap::Args)]
struct Input {
    /// Problem file (JSON).
    file: PathBuf,
    /// Rescale precise sources whose masses do not sum to 1.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List every proposition that survives the model, with its DSm cardinality.
    Lattice {
        #[command(flatten)]
        input: Input,
    },
    /// Combine all sources with one rule.
    Fuse {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "dsmh", value_parser = parse_rule)]
        rule: Rule,
        /// Subtract this label from every fused mass (qualitative only).
        #[arg(long, value_name = "LABEL")]
        quasi_normalize: Option<String>,
    },
    /// Run every applicable rule side by side.
    Compare {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "LABEL")]
        quasi_normalize: Option<String>,
    },
    /// Fuse, then print the generalized pignistic probability of each hypothesis.
    Pignistic {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "dsmh", value_parser = parse_rule)]
        rule: Rule,
    },
    /// Fold the sources in order, printing every intermediate result.
    Sequential {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "dsmh", value_parser = parse_rule)]
        rule: Rule,
    },
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Rule::ALL.iter().map(|r| r.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    let format = match cli.format {
        OutputFormat::Table => Format::Table,
        OutputFormat::Json => Format::Json,
    };
    let (input, rule, quasi_normalize, verb): (Input, Rule, Option<String>, fn(_, _) -> _) =
        match cli.command {
            Command::Lattice { input } => (input, Rule::Dsmh, None, commands::lattice),
            Command::Fuse {
                input,
                rule,
                quasi_normalize,
            } => (input, rule, quasi_normalize, commands::fuse),
            Command::Compare {
                input,
                quasi_normalize,
            } => (input, Rule::Dsmh, quasi_normalize, commands::compare),
            Command::Pignistic { input, rule } => (input, rule, None, commands::pignistic),
            Command::Sequential { input, rule } => (input, rule, None, commands::sequential),
        };
    let problem = problem::load(&input.file, input.renormalize)?;
    let opts = Options {
        rule,
        format,
        quasi_normalize,
    };
    verb(&problem, &opts)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Undefined { partial, .. } = &e {
                print!("{partial}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
