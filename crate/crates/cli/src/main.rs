//! `halfstep`: membership, truncation, duality and sections for sheaf complexes
//! on finite cell spaces, plus the randomized verifier and the worked example.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input.

mod commands;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halfstep::dz::{CutParam, Flavor, Side};
use halfstep::perv::Structure;

use commands::Outcome;

#[derive(Debug)]
pub enum CliError {
    Input(String),
}

impl CliError {
    fn within(self, path: &Path) -> CliError {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        }
    }
}

#[derive(Parser)]
#[command(name = "halfstep", version, about = "Half-step t-structures on cell spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TargetArgs {
    /// Built-in space name or space file.
    #[arg(long)]
    space: Option<String>,
    /// Sheaf or module complex file, or an expression such as `constant` or `jshriek@c`.
    #[arg(long)]
    sheaf: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    LeGt,
    LtGe,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Sd,
    Ks,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Le,
    Ge,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tests `K ∈ ≤c` and `K ∈ ≥c`, with a witness at every failing cell.
    Membership {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, allow_hyphen_values = true)]
        cut: CutParam,
        #[arg(long, value_enum, default_value = "sd")]
        structure: StructureArg,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncation triangle at a cut; writes lower.json, upper.json and triangle.json into --out.
    Truncate {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, allow_hyphen_values = true)]
        cut: CutParam,
        #[arg(long, value_enum, default_value = "le-gt")]
        flavor: FlavorArg,
        #[arg(long, value_enum, default_value = "sd")]
        structure: StructureArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verdier dual of a sheaf, or the ℤ-dual of a module complex; --out writes it.
    Dual {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived sections over `all`, `star:CELL` or `minus:CELL`; --out writes the complex.
    Sections {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value = "all")]
        over: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized check of the t-structure axioms on a space.
    Verify {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `lo:hi:step`, exact rationals.
        #[arg(long, default_value = "-2:2:1/4", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a worked example and prints expected against computed values.
    Example {
        name: String,
        /// Also write the comparisons as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn structure(s: StructureArg) -> Structure {
    match s {
        StructureArg::Sd => Structure::Sd,
        StructureArg::Ks => Structure::Ks,
    }
}

fn flavor(f: FlavorArg) -> Flavor {
    match f {
        FlavorArg::LeGt => Flavor::LeGt,
        FlavorArg::LtGe => Flavor::LtGe,
    }
}

fn sides(s: SideArg) -> Vec<Side> {
    match s {
        SideArg::Le => vec![Side::Le],
        SideArg::Ge => vec![Side::Ge],
        SideArg::Both => vec![Side::Le, Side::Ge],
    }
}

fn with_report(o: Outcome, out: Option<&Path>) -> Result<Outcome, CliError> {
    if let Some(p) = out {
        io::write(p, &o.text)?;
    }
    Ok(o)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.cmd {
        Cmd::Membership { target, cut, structure: st, side, out } => {
            let t = commands::target(target.space.as_deref(), target.sheaf.as_deref())?;
            with_report(commands::membership(&t, cut, structure(st), &sides(side)), out.as_deref())
        }
        Cmd::Truncate { target, cut, flavor: f, structure: st, out } => {
            let t = commands::target(target.space.as_deref(), target.sheaf.as_deref())?;
            commands::truncate_cmd(&t, cut, flavor(f), structure(st), out.as_deref())
        }
        Cmd::Dual { target, out } => {
            let t = commands::target(target.space.as_deref(), target.sheaf.as_deref())?;
            commands::dual_cmd(&t, out.as_deref())
        }
        Cmd::Sections { target, over, out } => {
            let t = commands::target(target.space.as_deref(), target.sheaf.as_deref())?;
            commands::sections_cmd(&t, &over, out.as_deref())
        }
        Cmd::Verify { space, samples, seed, grid, out } => {
            let s = io::Space::resolve(&space, Path::new("."))?;
            let grid = commands::parse_grid(&grid)?;
            with_report(commands::verify_cmd(&s, samples, seed, &grid), out.as_deref())
        }
        Cmd::Example { name, out } => {
            let (o, lines) = commands::example_cmd(&name)?;
            if let Some(p) = out {
                io::write(&p, &io::to_json(&lines))?;
            }
            Ok(o)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            print!("{}", o.text);
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
