use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ampshield_cli::figures::FigureId;
use ampshield_cli::parse::{parse_coeffs, parse_x_values, PGrid};
use ampshield_cli::runtime::threads_from_env;
use ampshield_cli::{run_sweep, run_verify, write_figure, CliError, CliResult, Scheme, SweepConfig, VerifyHooks};

#[derive(Parser)]
#[command(
    name = "ampshield",
    version,
    about = "Amplitude-damping protection circuits: figures, sweeps, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one figure's curves (or `all`) as CSV into a directory.
    Fig {
        /// 2, 3a, 3b, 6a, 6b or all.
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a protocol over a p grid, from a JSON config or inline flags.
    Sweep {
        #[arg(long, conflicts_with_all = ["scheme", "coeffs", "p_grid", "x", "repeats"])]
        config: Option<PathBuf>,
        /// weak-recovery, ad-protect or extended.
        #[arg(long)]
        scheme: Option<String>,
        /// Four amplitudes, e.g. `0.7,0.35,0.4,0.48` or `0.5+0.5i,0,0,0.5`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// `start:stop:steps`.
        #[arg(long)]
        p_grid: Option<String>,
        /// Comma-separated preparation strengths (extended only).
        #[arg(long)]
        x: Option<String>,
        /// Recovery rounds, 1 to 4 (weak-recovery only).
        #[arg(long)]
        repeats: Option<usize>,
        /// Output file; overrides `output_path` from a config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every closed form against the simulation.
    Verify {
        #[arg(long)]
        json: bool,
    },
}

fn required<T>(v: Option<T>, field: &'static str) -> CliResult<T> {
    v.ok_or_else(|| CliError::config(field, "missing (pass --config or the inline flag)"))
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Fig { id, out } => {
            let ids = if id.trim() == "all" {
                FigureId::ALL.to_vec()
            } else {
                vec![id.parse::<FigureId>()?]
            };
            for id in ids {
                let path = write_figure(id, &out, threads)?;
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Sweep {
            config,
            scheme,
            coeffs,
            p_grid,
            x,
            repeats,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => SweepConfig::load(&path)?,
                None => {
                    let scheme: Scheme = required(scheme, "scheme")?.parse()?;
                    let coeffs = parse_coeffs(&required(coeffs, "coeffs")?)?;
                    let grid = PGrid::parse(&required(p_grid, "p_grid")?)?;
                    let xs = x.as_deref().map(parse_x_values).transpose()?;
                    let out = required(out.clone(), "output_path")?;
                    SweepConfig::new(scheme, coeffs, grid, xs, repeats, out)?
                }
            };
            if let Some(out) = out {
                cfg.output_path = out;
            }
            let [a, b, g, d] = cfg.coeffs.as_array();
            eprintln!("coefficients (renormalized): alpha={a} beta={b} gamma={g} delta={d}");
            let table = run_sweep(&cfg, threads)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), cfg.output_path.display());
        }
        Command::Verify { json } => {
            let report = run_verify(VerifyHooks::default(), threads)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.render_text());
            }
            if !report.passed {
                return Err(CliError::Verify(report.failed().join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
