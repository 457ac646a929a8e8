use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gklab_cli::{exit, run_experiment, CliError, ConfigFile, ExperimentConfig, ExperimentKind};

/// Run one gklab experiment and write `<out>/<kind>.csv` plus
/// `<out>/<kind>.summary.json`.
#[derive(Debug, Parser)]
#[command(name = "gklab", version)]
struct Args {
    /// lebesgue, converge-sup, converge-lp, rates, prop-integrals,
    /// l1-unbounded, maximal, kfunctional, korovkin or weighted
    kind: String,
    /// JSON config file; missing fields take the defaults of the kind
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated degrees
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Comma-separated corpus names
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<String>>,
    /// Comma-separated exponents
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    eps: Option<f64>,
    /// Number of grid points on [0, pi]
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Caps the worker threads
    #[arg(long, env = "GKLAB_THREADS")]
    threads: Option<usize>,
}

fn configure(args: &Args) -> Result<ExperimentConfig, CliError> {
    let kind: ExperimentKind = args.kind.parse()?;
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(v) = &args.n {
        file.n_set = Some(v.clone());
    }
    if let Some(v) = &args.functions {
        file.functions = Some(v.clone());
    }
    if let Some(v) = &args.p {
        file.p_set = Some(v.clone());
    }
    if let Some(v) = args.eps {
        file.eps = Some(v);
    }
    if let Some(v) = args.grid {
        file.grid = Some(v);
    }
    if let Some(v) = &args.out {
        file.out = Some(v.clone());
    }
    let config = ExperimentConfig::resolve(kind, &file)?;
    config.validate()?;
    Ok(config)
}

fn run(args: &Args) -> Result<i32, CliError> {
    let config = configure(args)?;
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Validation("GKLAB_THREADS: must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let report = run_experiment(&config)?;
    report.write()?;
    for band in &report.summary.bands {
        println!("{} {}: {}", if band.pass { "PASS" } else { "FAIL" }, band.name, band.detail);
    }
    println!(
        "wrote {} and {}",
        report.csv_path(&config.out).display(),
        report.summary_path(&config.out).display()
    );
    let failed = report.table.failed_rows();
    if failed > 0 {
        eprintln!("{failed} row(s) failed; see the error column");
        return Ok(exit::PARTIAL);
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gklab: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
