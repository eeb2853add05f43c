use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use uniformize_core::io::{export, load_mesh, run_pipeline, ExportFormat, ResultDocument};
use uniformize_core::pipeline::{PipelineOptions, SlitChoice};

const THREADS_VAR: &str = "UNIFORMIZE_THREADS";

/// Exit status when some verification fails.
const VERIFICATION_FAILED: u8 = 1;
/// Exit status for invalid input, options or I/O.
const ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "uniformize", version, about = "Discrete uniformization of triangulated planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Uniformize a mesh and write the result document and figure.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Mesh document in the `uniformize-mesh/1` JSON format.
    mesh: PathBuf,
    /// Value on the outer boundary; defaults to the mesh's `k`.
    #[arg(long)]
    k: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated output formats: json, svg.
    #[arg(long, value_delimiter = ',', default_value = "json")]
    format: Vec<ExportFormat>,
    /// Treat any failed verification as an error and write nothing.
    #[arg(long)]
    strict: bool,
    /// Relative tolerance for detecting equal adjacent values.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// `auto`, or a comma-separated vertex path from the outer to the inner boundary.
    #[arg(long, default_value = "auto")]
    slit: String,
    /// Break ties between adjacent equal values by a tiny deterministic perturbation.
    #[arg(long)]
    perturb_ties: bool,
    /// Exit with success even when verifications fail.
    #[arg(long)]
    no_verify: bool,
}

fn parse_slit(text: &str) -> Result<SlitChoice> {
    if text.trim() == "auto" {
        return Ok(SlitChoice::Auto);
    }
    let path = text
        .split(',')
        .map(|id| id.trim().parse::<usize>().with_context(|| format!("slit vertex id \"{id}\"")))
        .collect::<Result<Vec<_>>>()?;
    if path.len() < 2 {
        bail!("a slit needs at least two vertices");
    }
    Ok(SlitChoice::Path(path))
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got \"{text}\""))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn report(doc: &ResultDocument) {
    let checks = &doc.verification.checks;
    for check in checks.iter().filter(|c| !c.passed) {
        let detail = check.detail.as_deref().unwrap_or("");
        eprintln!("FAIL {}: residual {:e}, bound {:e} {detail}", check.name, check.residual, check.bound);
    }
    eprintln!(
        "{} cells, {} pieces; {} of {} checks passed",
        doc.cell_count(),
        doc.pieces.len(),
        checks.len() - doc.verification.failed.len(),
        checks.len()
    );
}

fn output_path(out: &Path, mesh: &Path, format: ExportFormat) -> PathBuf {
    let stem = mesh.file_stem().map_or_else(|| "mesh".into(), |s| s.to_string_lossy().into_owned());
    match format {
        ExportFormat::Json => out.join(format!("{stem}.result.json")),
        ExportFormat::Svg => out.join(format!("{stem}.{}", format.extension())),
    }
}

/// Returns whether every verification passed.
fn run(args: RunArgs) -> Result<bool> {
    if !(args.tolerance > 0.0) {
        bail!("--tolerance must be positive");
    }
    let options = PipelineOptions {
        k: args.k,
        tolerance: args.tolerance,
        slit: parse_slit(&args.slit)?,
        perturb_ties: args.perturb_ties,
    };
    let mesh = load_mesh(&args.mesh).with_context(|| format!("loading {}", args.mesh.display()))?;
    let doc = run_pipeline(&mesh, &options)?;
    report(&doc);
    let passed = doc.verification.passed;
    if args.strict && !passed {
        eprintln!("verification failed under --strict; no output written");
        return Ok(false);
    }
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for &format in &args.format {
        let path = output_path(&args.out, &args.mesh, format);
        export(&doc, format, &path).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(passed || args.no_verify)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Run(args) => run(args),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFICATION_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(ERROR)
        }
    }
}
