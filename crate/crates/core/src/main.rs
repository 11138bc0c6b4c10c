use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mimetic_em::config::{self, OperatorKind, OpsDump, RunConfig};
use mimetic_em::error::{Error, Result};
use mimetic_em::grid::{OperatorOrder, StaggeredGrid1D, StaggeredGrid2D};
use mimetic_em::mimetic;
use mimetic_em::run;

/// Mimetic finite-difference operators and Maxwell solvers.
#[derive(Debug, Parser)]
#[command(name = "mimetic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario from a preset or a TOML config and write snapshots.
    Run(RunArgs),
    /// Print an operator as `row col value` triplets.
    Ops(OpsArgs),
    /// Check the discrete identities of the operators on a grid.
    Verify(VerifyArgs),
    /// Print a preset as a TOML config document.
    Preset {
        /// One of the built-in preset names; omit to list them.
        name: Option<String>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: `out/<preset or kind>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Debug, Args)]
struct OpsArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    dx: f64,
    /// Cells along y; builds the 2D operator when given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, requires = "n")]
    dy: Option<f64>,
    #[arg(long, value_enum)]
    dump: DumpArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum DumpArg {
    Grad,
    Div,
    Lap,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    dx: f64,
}

fn run_command(args: RunArgs) -> Result<()> {
    let (mut config, label) = match (&args.preset, &args.config) {
        (Some(name), _) => (RunConfig::preset(name)?, name.clone()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let config = config::parse_config(&text)?;
            let label = config.scenario.kind().to_string();
            (config, label)
        }
        (None, None) => unreachable!("clap requires one of --preset/--config"),
    };
    if let Some(every) = args.snapshot_every {
        config.snapshot_every = every;
    }
    let out = args
        .out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(label));
    let outcome = run::run(&config, &out)?;
    println!(
        "wrote {} files and {} to {}",
        outcome.files.len(),
        run::MANIFEST,
        outcome.out_dir.display()
    );
    Ok(())
}

fn ops_command(args: OpsArgs) -> Result<()> {
    let ops = OpsDump {
        k: args.k,
        m: args.m,
        dx: args.dx,
        n: args.n,
        dy: args.dy,
        dump: match args.dump {
            DumpArg::Grad => OperatorKind::Grad,
            DumpArg::Div => OperatorKind::Div,
            DumpArg::Lap => OperatorKind::Lap,
        },
    };
    let (matrix, _) = run::dump_operator(&ops)?;
    print!("{}", matrix.to_triplet_text());
    Ok(())
}

fn verify_command(args: VerifyArgs) -> Result<bool> {
    let k = OperatorOrder::new(args.k)?;
    let report = match args.n {
        None => mimetic::verify_identities(k, &StaggeredGrid1D::new(args.m, args.dx)?),
        Some(n) => mimetic::verify_identities(k, &StaggeredGrid2D::new(args.m, args.dx, n, args.dx)?),
    };
    print!("{report}");
    Ok(report.passes())
}

fn preset_command(name: Option<String>) -> Result<()> {
    match name {
        None => config::PRESETS.iter().for_each(|p| println!("{p}")),
        Some(name) => print!("{}", RunConfig::preset(&name)?.render()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Ops(args) => ops_command(args),
        Command::Verify(args) => match verify_command(args) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("error: identity residual above tolerance");
                return ExitCode::from(2);
            }
            Err(e) => Err(e),
        },
        Command::Preset { name } => preset_command(name),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
