//! `k3maps`: admissibility checks, tables and tree verification from the
//! command line.
//!
//! Exit status: 0 admissible / pass, 1 inadmissible / fail, 2 usage or
//! input error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3maps::{ConstraintProfile, ExceptionalTree, TreeNode};
use serde::Deserialize;

use render::Format;

#[derive(Parser)]
#[command(
    name = "k3maps",
    version,
    about = "Numerical admissibility of self-rational maps of K3 surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Text,
    Json,
    Csv,
    Markdown,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
        }
    }
}

fn parse_profile(s: &str) -> Result<ConstraintProfile, String> {
    s.parse()
        .map_err(|e: k3maps::FeasibilityError| e.to_string())
}

#[derive(clap::Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t)]
    format: FormatArg,
}

#[derive(clap::Args)]
struct ProfileArg {
    /// basic, amerik, full, or a comma list of square, divisibility,
    /// partition, amerik, tree.
    #[arg(long, default_value = "basic", value_parser = parse_profile)]
    profile: ConstraintProfile,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one triple (g, deg, l).
    Check {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        g: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        deg: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        l: u64,
        #[command(flatten)]
        profile: ProfileArg,
        #[command(flatten)]
        common: Common,
    },
    /// Admissible l in 2..=l_max.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        g: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        deg: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        l_max: u64,
        #[command(flatten)]
        profile: ProfileArg,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the published tables of first admissible l and compare.
    #[command(name = "paper-report")]
    Report {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(3..1000))]
        terms: u64,
        #[command(flatten)]
        common: Common,
    },
    /// β-partitions of N: Σβ² = N with Σβ even.
    Partitions {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Maximum number of parts.
        #[arg(long)]
        p_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check an exceptional tree given as JSON against the predicates for deg.
    TreeVerify {
        /// JSON file of the form {"nodes":[{"id":1,"parent":null,"gamma":1}, ...]}.
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        deg: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    nodes: Vec<TreeNode>,
}

/// Input errors that map to exit status 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

fn status(ok: bool) -> ExitCode {
    ExitCode::from(if ok { 0 } else { 1 })
}

fn load_tree(path: &PathBuf) -> Result<ExceptionalTree, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let file: TreeFile = serde_json::from_str(&text).map_err(|e| {
        InputError(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    ExceptionalTree::new(file.nodes).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    match cli.command {
        Command::Check {
            g,
            deg,
            l,
            profile,
            common,
        } => {
            let v = k3maps::check(g, deg, l, &profile.profile)?;
            print!("{}", render::verdict(&v, common.format.into())?);
            Ok(status(v.admissible))
        }
        Command::Table {
            g,
            deg,
            l_max,
            profile,
            common,
        } => {
            let t = k3maps::admissible_l(g, deg, l_max, &profile.profile)?;
            print!("{}", render::table(&t, common.format.into())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { terms, common } => {
            let r = k3maps::paper_table_report(terms as usize)?;
            print!("{}", render::report(&r, common.format.into())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Partitions { n, p_cap, common } => {
            let parts = k3maps::enumerate_beta_partitions(n, p_cap);
            print!("{}", render::partitions(n, &parts, common.format.into())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::TreeVerify { file, deg, common } => {
            let tree = load_tree(&file)?;
            let report = tree.report(deg);
            print!(
                "{}",
                render::tree_report(deg, &report, common.format.into())?
            );
            Ok(status(report.passes()))
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
