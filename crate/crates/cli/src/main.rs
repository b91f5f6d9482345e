use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tacton_sim::analysis::{CompareOptions, DEFAULT_FLOOR_DB};
use tacton_sim::pipeline::AnalysisSettings;
use tacton_sim::synthesis::{FieldAggregate, DEFAULT_SKIN_RATE_HZ};
use tacton_sim_cli::commands::{self, parse_points, RunManifest};
use tacton_sim_cli::CliError;

#[derive(Parser)]
#[command(
    name = "tacton-sim",
    version,
    about = "Mid-air ultrasound Tacton skin-vibration simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Aggregate {
    Rms,
    Peak,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate Tacton files at skin points and/or over a grid.
    Simulate {
        /// Tacton JSON file(s).
        #[arg(long = "tacton", required = true, num_args = 1..)]
        tactons: Vec<PathBuf>,
        /// Skin points in mm, "x,y;x,y".
        #[arg(long)]
        points: Option<String>,
        /// Skin-signal sample rate in Hz.
        #[arg(long, default_value_t = DEFAULT_SKIN_RATE_HZ)]
        rate: f64,
        /// Also compute the field grid with this spacing in mm.
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, value_enum, default_value = "rms")]
        aggregate: Aggregate,
        /// Also write the carrier-resolved command waveform.
        #[arg(long)]
        command: bool,
        /// Also write the sampled focal trajectory.
        #[arg(long)]
        trajectory: bool,
        #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_FLOOR_DB)]
        floor_db: f64,
        #[arg(long)]
        tol_hz: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulate the 15-Tacton measurement grid at the five standard points.
    PaperGrid {
        #[arg(long, default_value_t = DEFAULT_SKIN_RATE_HZ)]
        rate: f64,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_FLOOR_DB)]
        floor_db: f64,
        #[arg(long)]
        tol_hz: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare simulation CSVs with measurement CSVs paired by file stem.
    Compare {
        #[arg(long)]
        sim: PathBuf,
        #[arg(long)]
        measured: PathBuf,
        #[arg(long, default_value = "out/compare")]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_FLOOR_DB)]
        floor_db: f64,
        #[arg(long)]
        tol_hz: Option<f64>,
        /// Mains frequencies whose multiples are ignored; repeat or comma-separate.
        #[arg(long, value_delimiter = ',', default_value = "60")]
        notch: Vec<f64>,
        #[arg(long)]
        no_notch: bool,
    },
    /// Print the shape catalog as JSON.
    Shapes,
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "TACTON_SIM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Simulations allowed to run at once.
        #[arg(long, default_value_t = 4)]
        max_concurrent: usize,
    },
}

/// Prints a line, ignoring a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TACTON_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!("TACTON_SIM_THREADS={raw:?} is not a thread count"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate {
            tactons,
            points,
            rate,
            grid,
            aggregate,
            command,
            trajectory,
            floor_db,
            tol_hz,
            out,
        } => {
            let mut m = RunManifest::new(tactons, out);
            m.points = points
                .as_deref()
                .map(parse_points)
                .transpose()?
                .unwrap_or_default();
            m.sample_rate = rate;
            m.grid_spacing = grid;
            m.grid_aggregate = match aggregate {
                Aggregate::Rms => FieldAggregate::Rms,
                Aggregate::Peak => FieldAggregate::Peak,
            };
            m.command = command;
            m.trajectory = trajectory;
            m.settings = AnalysisSettings { floor_db, tol_hz };
            for p in commands::simulate(&m)? {
                say!("{}", p.display());
            }
        }
        Command::PaperGrid {
            rate,
            grid,
            floor_db,
            tol_hz,
            out,
        } => {
            let summary =
                commands::paper_grid(&out, rate, AnalysisSettings { floor_db, tol_hz }, grid)?;
            for r in &summary.rows {
                say!("{:<16} {:?}", r.name, r.classification);
            }
        }
        Command::Compare {
            sim,
            measured,
            out,
            floor_db,
            tol_hz,
            notch,
            no_notch,
        } => {
            let options = CompareOptions {
                tol_hz,
                floor_db,
                notches: if no_notch { Vec::new() } else { notch },
            };
            for r in commands::compare(&sim, &measured, &out, &options)? {
                say!(
                    "{:<24} explained {:.3}",
                    r.stem,
                    r.report.explained_fraction
                );
            }
        }
        Command::Shapes => {
            let text = serde_json::to_string_pretty(&commands::shape_catalog())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            say!("{text}");
        }
        Command::Serve {
            port,
            host,
            max_concurrent,
        } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(tacton_sim_cli::service::serve(
                SocketAddr::new(host, port),
                max_concurrent,
            ))
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
