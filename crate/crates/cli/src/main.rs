use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_nodal_cli::{run_check, run_forward, run_invert, run_roundtrip, Overrides, RunOptions};

/// Forward and inverse nodal problems for Dirac-type integro-differential systems.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and nodal points: spectrum.csv, nodes.csv.
    Forward {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruction from a nodes file: reconstruction.csv, reconstruction.meta.
    Invert {
        nodes: PathBuf,
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Forward, invert and compare with the configured problem: roundtrip.meta.
    Roundtrip {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Asymptotic residuals and reconstruction constants: asym_report.csv.
    Check {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Number of grid intervals on [0, π] (overrides problem.grid_n).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Continue when an eigenvalue bracket has no root.
    #[arg(long)]
    allow_gaps: bool,
    /// Inversion indices, comma separated (overrides inversion.n_list).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<i64>>,
    /// Bisection tolerance (overrides spectrum.tol).
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl Common {
    fn options(self) -> RunOptions {
        RunOptions {
            out_dir: self.out_dir,
            allow_gaps: self.allow_gaps,
            overrides: Overrides { grid_n: self.grid_n, tol: self.tol, n_list: self.n_list },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Forward { config, common } => run_forward(&config, &common.options()),
        Command::Invert { nodes, config, common } => run_invert(&nodes, &config, &common.options()),
        Command::Roundtrip { config, common } => run_roundtrip(&config, &common.options()),
        Command::Check { config, common } => run_check(&config, &common.options()),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
