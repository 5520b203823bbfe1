//! Command-line front end. Every computation is a library call; this file
//! only reads the configuration, applies overrides and writes the output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kaclevy::harness::{self, config, emit_grid, Format, RunConfig, Task};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Transform,
    LimitDensity,
    Expfun,
    Simulate,
    Verify,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Transform => Task::Transform,
            TaskArg::LimitDensity => Task::LimitDensity,
            TaskArg::Expfun => Task::Expfun,
            TaskArg::Simulate => Task::Simulate,
            TaskArg::Verify => Task::Verify,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Markov-modulated Lévy processes: transforms, limit densities,
/// exponential functionals, simulation and Monte-Carlo verification.
#[derive(Debug, Parser)]
#[command(name = "kaclevy", version)]
struct Cli {
    /// Task to run; overrides the task named in the configuration.
    #[arg(value_enum)]
    task: TaskArg,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte-Carlo paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Grid format; verify reports are always JSON.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| format!("cannot read {}: {e}", cli.config.display()))?;
    let mut cfg =
        harness::parse_config(&text).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    cfg.task = cli.task.into();
    if let Some(s) = cli.seed {
        cfg.mc.seed = s;
    }
    if let Some(n) = cli.paths {
        cfg.mc.paths = n;
    }
    if let Some(w) = cli.workers {
        cfg.mc.workers = Some(w);
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    config::check_requirements(&cfg).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    Ok(cfg)
}

fn sink(cfg: &RunConfig) -> io::Result<Box<dyn Write>> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cfg: &RunConfig) -> Result<bool, String> {
    let mut out = sink(cfg).map_err(|e| format!("cannot open output: {e}"))?;
    if cfg.task == Task::Verify {
        let report = harness::run_verify(cfg).map_err(|e| e.to_string())?;
        out.write_all(report.to_json().as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| e.to_string())?;
        let s = report.summary;
        eprintln!(
            "{}: {} checks, {} passed, {} failed, {} skipped",
            report.suite.name(),
            s.total,
            s.passed,
            s.failed,
            s.skipped
        );
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "FAIL {} statistic {} > threshold {}",
                c.name, c.statistic, c.threshold
            );
        }
        return Ok(s.pass);
    }
    let grid = harness::run_grid_task(cfg).map_err(|e| e.to_string())?;
    emit_grid(&grid, cfg.output.format, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| e.to_string())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
