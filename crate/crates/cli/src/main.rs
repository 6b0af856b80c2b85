mod checks;
mod output;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pso_core::psocheck::Grid;

use checks::{Built, CheckId, Context};
use output::{CheckRecord, Report};
use scenario::{ModelSpec, Scenario};

/// Certificates for Phillips symmetric operators.
#[derive(Parser)]
#[command(name = "pso-kit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file and emit a JSON report.
    Run {
        scenario: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the characteristic function over a grid as CSV.
    Sweep {
        /// `momentum[:m]` or `nonlocal:<I|II>:<alpha>`.
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        /// Real parts of the grid (comma separated).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        re: Option<Vec<f64>>,
        /// Imaginary parts of the grid (comma separated, positive).
        #[arg(long, value_delimiter = ',')]
        im: Option<Vec<f64>>,
    },
    /// List check ids, the models they apply to, and what they certify.
    ListChecks,
}

const EXIT_FAIL: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out } => run(&scenario, out.as_deref()),
        Command::Sweep { model, out, re, im } => sweep(&model, &out, re, im),
        Command::ListChecks => {
            list_checks();
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::from(EXIT_ERROR)
    })
}

fn grid_from(re: Option<Vec<f64>>, im: Option<Vec<f64>>) -> Result<Grid<f64>, String> {
    match (re, im) {
        (None, None) => Ok(Grid::default_grid()),
        (re, im) => {
            let default_re: Vec<f64> = (-5..=5).map(f64::from).collect();
            let re = re.unwrap_or(default_re);
            let im = im.unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0]);
            Grid::product(&re, &im).map_err(|e| e.to_string())
        }
    }
}

fn load(path: &Path) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let kind = scenario.model.kind();
    let mut seen = Vec::new();
    for &id in &scenario.checks {
        if seen.contains(&id) {
            return Err(format!("check {id} is listed twice"));
        }
        if !id.models().contains(&kind) {
            return Err(format!(
                "check {id} does not apply to {kind} models (applies to: {})",
                id.models().join(", ")
            ));
        }
        seen.push(id);
    }
    if scenario.checks.is_empty() {
        return Err("no checks requested".into());
    }
    Ok(scenario)
}

fn run(path: &Path, out: Option<&Path>) -> Result<ExitCode, String> {
    let scenario = load(path)?;
    let built = Built::new(&scenario.model).map_err(|e| format!("cannot build model: {e}"))?;
    let grid = match &scenario.grid {
        Some(g) => Grid::product(&g.re, &g.im).map_err(|e| format!("grid: {e}"))?,
        None => Grid::default_grid(),
    };
    let ctx = Context {
        grid,
        extension: scenario.extension.clone(),
        seed: scenario.seed,
    };
    let mut records = Vec::new();
    let mut error = None;
    for &id in &scenario.checks {
        let started = Instant::now();
        match checks::run(id, &built, &ctx) {
            Ok(entry) => records.push(CheckRecord::new(
                id,
                entry,
                started.elapsed().as_millis() as u64,
            )),
            Err(msg) => {
                error = Some(format!("check {id}: {msg}"));
                break;
            }
        }
    }
    let report = Report {
        scenario: scenario.name.clone(),
        version: env!("CARGO_PKG_VERSION"),
        model: built.name(),
        overall: Report::overall_of(&records),
        checks: records,
        notes: built.notes(),
        error,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    text.push('\n');
    match out {
        Some(p) => {
            output::write_atomic(p, text.as_bytes()).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => print!("{text}"),
    }
    if let Some(msg) = &report.error {
        return Err(msg.clone());
    }
    Ok(match report.first_non_passing() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!("first failing check: {} ({})", c.id, c.verdict);
            ExitCode::from(EXIT_FAIL)
        }
    })
}

fn sweep(
    model: &str,
    out: &Path,
    re: Option<Vec<f64>>,
    im: Option<Vec<f64>>,
) -> Result<ExitCode, String> {
    let model_desc = ModelSpec::parse_short(model)?;
    let grid = grid_from(re, im)?;
    let rows = match Built::new(&model_desc).map_err(|e| format!("cannot build model: {e}"))? {
        Built::Momentum(m) => checks::theta_rows(&m, &grid),
        Built::Nonlocal(m) => checks::theta_rows(&m, &grid),
        _ => unreachable!("short specs name operator models only"),
    }
    .map_err(|e| e.to_string())?;
    let bytes = output::theta_csv(&rows).map_err(|e| e.to_string())?;
    output::write_atomic(out, &bytes).map_err(|e| format!("{}: {e}", out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn list_checks() {
    for id in CheckId::ALL {
        println!(
            "{:<16} [{}]  {}",
            id.as_str(),
            id.models().join(", "),
            id.certifies()
        );
    }
}
