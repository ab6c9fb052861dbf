use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavcorr::SystemParams;
use cavcorr_cli::run::{self, Sweep};
use cavcorr_cli::{parse_run_spec, CliError, Result, RunArgs};

/// Photon correlations of a lattice-trapped atom in a weakly driven cavity.
#[derive(Debug, Parser)]
#[command(name = "cavcorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute correlation functions and write CSV files plus report.json.
    Run(RunArgs),
    /// Same as `run --verify`: also integrate the amplitude equations and compare.
    Verify(RunArgs),
    /// Regenerate the panels of a figure preset (or `all`).
    Figset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        verify: bool,
    },
    /// Sweep g2_TT(0) - 1 across motional states.
    Scan {
        #[arg(long, value_enum)]
        sweep: Sweep,
        /// Comma-separated values; a built-in range if omitted.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2.2)]
        g: f64,
        #[arg(long, default_value_t = 10.0)]
        kappa: f64,
        #[arg(long, default_value_t = 0.1)]
        delta1: f64,
        /// Defaults to 200 for sigma sweeps and 19 otherwise.
        #[arg(long)]
        l_max: Option<usize>,
        /// Output CSV; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn threads() -> Result<()> {
    let Ok(v) = std::env::var("CAVCORR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Spec(format!("CAVCORR_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Spec(e.to_string()))
}

fn execute(cli: Cli) -> Result<()> {
    threads()?;
    match cli.command {
        Command::Run(args) => {
            let spec = parse_run_spec(&args)?;
            run::run(&spec)?;
        }
        Command::Verify(mut args) => {
            args.verify = true;
            let spec = parse_run_spec(&args)?;
            let report = run::run(&spec)?;
            for r in report.verify.iter().flatten() {
                log::info!("{}: sup diff {:e} (limit {:e})", r.file, r.sup_abs_diff, r.limit);
            }
        }
        Command::Figset { name, out, verify } => {
            run::figset(&name, &out, verify)?;
        }
        Command::Scan {
            sweep,
            values,
            g,
            kappa,
            delta1,
            l_max,
            out,
        } => {
            let l_max = l_max.unwrap_or(match sweep {
                Sweep::Sigma => 200,
                Sweep::Nmax => 19,
            });
            let params = SystemParams::new(g, kappa, delta1, l_max).map_err(|e| CliError::Spec(e.to_string()))?;
            let values = values.unwrap_or_else(|| run::default_sweep(sweep));
            let rows = run::scan_g2zero(&params, sweep, &values)?;
            run::write_scan(out.as_ref(), &run::scan_csv(&params, sweep, &rows))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
