use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symred::commands::{cmd_check, cmd_jet_kappa, cmd_kappa, cmd_reduce, parse_points};
use symred::problem::Problem;
use symred::report::Report;
use symred::CliError;

#[derive(Parser)]
#[command(name = "symred", version, about = "Symmetry reduction of differential operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Isotropy, fixed space κ(E), invariant ansatz and the kinematic diagram.
    Kappa(Common),
    /// Reduced equations on the quotient.
    Reduce(Common),
    /// Verify candidate solutions symbolically and numerically.
    Check(Common),
    /// Invariant Taylor coefficients at a singular point.
    JetKappa(Common),
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    file: PathBuf,
    /// Jet order of the reduction.
    #[arg(long)]
    order: Option<usize>,
    /// Highest Taylor order for jet-kappa.
    #[arg(long)]
    max_order: Option<usize>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// JSON array of sample points for `check`.
    #[arg(long)]
    points: Option<PathBuf>,
}

fn run(cmd: &Command) -> Result<Report, CliError> {
    let (Command::Kappa(a) | Command::Reduce(a) | Command::Check(a) | Command::JetKappa(a)) = cmd;
    let problem = Problem::load(&a.file)?;
    match cmd {
        Command::Kappa(_) => cmd_kappa(&problem),
        Command::Reduce(_) => cmd_reduce(&problem, a.order),
        Command::Check(_) => {
            let points = match &a.points {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| CliError::Io { path: p.display().to_string(), source: e })?;
                    Some(parse_points(&text)?)
                }
                None => None,
            };
            cmd_check(&problem, a.order, points)
        }
        Command::JetKappa(_) => cmd_jet_kappa(&problem, a.max_order),
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Kappa(a) | Command::Reduce(a) | Command::Check(a) | Command::JetKappa(a)) = &cli.command;
    let result = run(&cli.command).and_then(|report| {
        print!("{}", report.to_text());
        if let Some(path) = &a.json {
            write(path, &report.to_json())?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            match &e {
                CliError::Io { .. } | CliError::Json { .. } => eprintln!("error: {e}"),
                _ => eprintln!("error: {}: {e}", a.file.display()),
            }
            if let Some(path) = &a.json {
                let doc = serde_json::json!({ "error": e.to_string(), "exit_code": code });
                let _ = write(path, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap_or_default()));
            }
            ExitCode::from(code as u8)
        }
    }
}
