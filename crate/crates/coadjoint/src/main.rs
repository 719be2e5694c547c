use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coadjoint::cli::{export_contour, preset, run_cached, schemas, Cache, CliError, ExperimentConfig, Overrides, PRESETS};

/// Character-formula contours: build them, integrate them, check them against characters.
#[derive(Parser)]
#[command(name = "coadjoint", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Relative tolerance per density.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for the density suite and Monte Carlo.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    #[arg(long, global = true)]
    truncation_radius: Option<f64>,
    /// Directory for report.json, report.txt, cache/ and CSV output.
    #[arg(long, global = true, default_value = "coadjoint-out")]
    out: PathBuf,
    /// Also write the contour point cloud as CSV.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run a built-in experiment; `preset list` names them.
    Preset { name: String },
    /// Print the JSON schemas of configs and reports.
    Schema,
    /// Write the contour nodes of a config (or preset name) as CSV.
    ExportContour { config: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes to stdout; a closed pipe (as with `| head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io { path: "<stdout>".into(), source: e }),
        _ => Ok(()),
    }
}

fn load(source: &str) -> Result<ExperimentConfig, CliError> {
    if let Some(c) = preset(source) {
        return Ok(c);
    }
    let path = Path::new(source);
    ExperimentConfig::from_json(&fs::read_to_string(path).map_err(io(path))?)
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let overrides = Overrides { tolerance: args.tolerance, seed: args.seed, mc_samples: args.mc_samples, truncation_radius: args.truncation_radius };
    let mut config = match &args.command {
        Command::Schema => {
            emit(&format!("{}\n", serde_json::to_string_pretty(&schemas())?))?;
            return Ok(0);
        }
        Command::Preset { name } if name == "list" => {
            emit(&PRESETS.iter().map(|(n, d)| format!("{n:<22} {d}\n")).collect::<String>())?;
            return Ok(0);
        }
        Command::Preset { name } => preset(name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            CliError::Validation(format!("unknown preset `{name}` (known: {})", names.join(", ")))
        })?,
        Command::Run { config } => load(&config.to_string_lossy())?,
        Command::ExportContour { config } => load(config)?,
    };
    config.apply(&overrides);
    config.validate()?;
    fs::create_dir_all(&args.out).map_err(io(&args.out))?;
    if matches!(args.command, Command::ExportContour { .. }) || args.csv {
        let path = args.out.join("contour.csv");
        let rows = export_contour(&config, &path)?;
        eprintln!("wrote {rows} nodes to {}", path.display());
        if matches!(args.command, Command::ExportContour { .. }) {
            return Ok(0);
        }
    }
    let report = run_cached(&config, Some(&Cache::new(args.out.join("cache"))))?;
    let json = args.out.join("report.json");
    fs::write(&json, serde_json::to_string_pretty(&report)?).map_err(io(&json))?;
    let table = report.table();
    let txt = args.out.join("report.txt");
    fs::write(&txt, &table).map_err(io(&txt))?;
    emit(&table)?;
    Ok(report.verdict.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
