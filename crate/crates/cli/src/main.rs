//! `linksim` command-line front end.
//!
//! ```shell
//! $ linksim simulate --scheme tas-ostbc-abf --lt 4 --snr 0:1:20 --frames 200000 \
//!       --packets 1 --out abf4.csv
//! $ linksim gains --base tas.csv --curves abf2.csv abf4.csv --ber 1e-3
//! ```

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linksim_core::curve_file::{render_curve, write_curve};
use linksim_core::engine::{run_sweep, with_workers};
use linksim_core::gains::{gains_report, render_csv, render_table};
use linksim_core::runspec::{from_pairs, parse_pairs, RunSpec};
use linksim_core::Error;

#[derive(Debug, Parser)]
#[command(name = "linksim", version, about = "Monte Carlo BER simulator for TAS-OSTBC links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs a BER sweep and writes the curve as CSV
    Simulate(SimulateArgs),
    /// Reads SNR gains off curve files against a base curve
    Gains(GainsArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Configuration file with key=value lines; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// siso|alamouti|tas-ostbc|tas-ostbc-zf|tas-ostbc-abf|tas-ostbc-hbf|irs-tas-ostbc-hbf
    #[arg(long)]
    scheme: Option<String>,
    /// SNR grid in dB, start:step:stop
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Frames per packet
    #[arg(long)]
    frames: Option<String>,
    #[arg(long)]
    packets: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Transmit antennas
    #[arg(long)]
    nt: Option<String>,
    /// Receive antennas
    #[arg(long)]
    nr: Option<String>,
    /// Array elements per active antenna
    #[arg(long)]
    lt: Option<String>,
    /// Reflecting elements
    #[arg(long)]
    nref: Option<String>,
    /// Reflection amplitude in (0, 1]
    #[arg(long)]
    alpha: Option<String>,
    /// uniform|zero|coherent
    #[arg(long)]
    phase: Option<String>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on it)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Args)]
struct GainsArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    curves: Vec<PathBuf>,
    /// Target BER for the read-off
    #[arg(long, default_value_t = 1e-3)]
    ber: f64,
    /// Also write the table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn build_spec(args: &SimulateArgs) -> Result<RunSpec, Error> {
    let mut pairs = match &args.config {
        Some(path) => parse_pairs(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)?,
        None => Vec::new(),
    };
    let flags = [
        ("scheme", &args.scheme),
        ("snr", &args.snr),
        ("frames", &args.frames),
        ("packets", &args.packets),
        ("seed", &args.seed),
        ("nt", &args.nt),
        ("nr", &args.nr),
        ("lt", &args.lt),
        ("nref", &args.nref),
        ("alpha", &args.alpha),
        ("phase", &args.phase),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            pairs.push((k.to_string(), v.clone()));
        }
    }
    if let Some(out) = &args.out {
        pairs.push(("out".into(), out.display().to_string()));
    }
    from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let spec = build_spec(&args)?;
    let scheme = spec.scheme.scheme();
    let workers = if args.workers == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        args.workers
    };
    let curve = with_workers(workers, || run_sweep(scheme.as_ref(), &spec.config))?;
    match &spec.out {
        Some(path) => {
            write_curve(&curve, path)?;
            eprintln!("wrote {} points to {}", curve.points.len(), path.display());
        }
        None => print!("{}", render_curve(&curve)),
    }
    Ok(())
}

fn gains(args: GainsArgs) -> Result<(), Error> {
    let rows = gains_report(&args.curves, &args.base, args.ber)?;
    print!("{}", render_table(&rows, args.ber));
    if let Some(path) = &args.csv {
        fs::write(path, render_csv(&rows)).map_err(|e| io_err(path, e))?;
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
        Command::Simulate(a) => simulate(a),
        Command::Gains(a) => gains(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
