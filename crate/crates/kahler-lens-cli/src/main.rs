//! `kahler-lens`: batch front-end for angle-spectrum analysis and identity
//! verification of isometrically immersed submanifolds of Kähler products.
//!
//! Exit codes: 0 — success (verify: no non-skipped failures); 1 — at least
//! one identity check failed; 2 — configuration or runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use kahler_lens::catalog;

mod config;
mod output;
mod run;

#[derive(Parser)]
#[command(name = "kahler-lens", version, about = "Kähler-angle spectra and identity verification for immersed submanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute angle spectra, κ and residuals over a grid; write CSV + JSON summary
    Analyze(RunArgs),
    /// Run identity checks over a grid; write JSONL/CSV reports, exit 1 on failures
    Verify(RunArgs),
    /// Inspect the fixture catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List all entries
    List,
    /// Show one entry with its parameters
    Describe { id: String },
}

#[derive(Args)]
struct RunArgs {
    /// Catalog id, inline JSON descriptor, or path to a .json descriptor
    #[arg(long)]
    immersion: String,

    /// Regular grid: `N` points per axis or `N@margin`; or an explicit JSON
    /// point list `[[x, y], ...]`
    #[arg(long, default_value = "5")]
    grid: String,

    /// `all` or a comma-separated subset of check ids (see `--help-checks`
    /// via `verify --identities ?`); ignored by `analyze`
    #[arg(long, default_value = "all")]
    identities: String,

    /// Residual budget for algebraic identities
    #[arg(long, default_value_t = 1e-5)]
    tol_alg: f64,

    /// Residual budget for finite-difference Laplacian identities
    #[arg(long, default_value_t = 1e-3)]
    tol_fd: f64,

    /// First-derivative FD step (the nested Laplacian uses a 10x outer step)
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,

    /// Central-difference order: 2 or 4
    #[arg(long, default_value_t = 4)]
    fd_order: u8,

    /// Richardson-extrapolate first derivatives
    #[arg(long)]
    richardson: bool,

    /// Seed for all random structure sampling (fixes outputs byte-for-byte)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory (created if missing)
    #[arg(long, default_value = "kahler-lens-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = init_threads() {
        eprintln!("error: {err:#}");
        return ExitCode::from(2);
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// `KAHLER_LENS_THREADS` caps rayon's worker count; unset means one worker
/// per core.
fn init_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("KAHLER_LENS_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("KAHLER_LENS_THREADS=`{raw}` is not a positive integer"))?;
        if n == 0 {
            anyhow::bail!("KAHLER_LENS_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the thread pool")?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(args) => {
            let cfg = resolve(args)?;
            run::analyze(&cfg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let cfg = resolve(args)?;
            let outcome = run::verify(&cfg)?;
            for (id, [pass, fail, skipped]) in &outcome.by_check {
                println!("{id:<30} pass {pass:>4}  fail {fail:>4}  skip {skipped:>4}");
            }
            println!(
                "total: {} pass, {} fail, {} skipped; reports written to {}",
                outcome.pass,
                outcome.fail,
                outcome.skipped,
                cfg.out.display()
            );
            Ok(if outcome.fail > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Catalog { action } => {
            catalog_cmd(action)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve(args: RunArgs) -> Result<config::RunConfig> {
    let tolerances = config::parse_tolerances(args.tol_alg, args.tol_fd)?;
    let (immersion, certification) = config::parse_immersion(&args.immersion)?;
    let immersion = immersion.with_tolerances(tolerances);
    let (grid, grid_per_axis) = config::parse_grid(&args.grid, &immersion)?;
    let identities = config::parse_identities(&args.identities)?;
    let scheme = config::parse_scheme(args.fd_step, args.fd_order, args.richardson)?;
    Ok(config::RunConfig {
        immersion,
        certification,
        descriptor: args.immersion,
        grid,
        grid_per_axis,
        grid_spec: args.grid,
        identities,
        scheme,
        tolerances,
        seed: args.seed,
        out: args.out,
    })
}

fn catalog_cmd(action: CatalogCmd) -> Result<()> {
    match action {
        CatalogCmd::List => {
            for entry in catalog::entries() {
                println!("{:<24} {:<22} {}", entry.id, entry.ambient, entry.summary);
            }
        }
        CatalogCmd::Describe { id } => {
            let entry = catalog::describe(&id)?;
            println!("id:      {}", entry.id);
            println!("ambient: {}", entry.ambient);
            println!("summary: {}", entry.summary);
            if entry.parameters.is_empty() {
                println!("parameters: none");
            } else {
                println!("parameters:");
                for p in entry.parameters {
                    println!("  {:<10} {} (default: {})", p.name, p.summary, p.default);
                }
            }
        }
    }
    Ok(())
}
