use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chlab_cli::commands::{self, Outcome};
use chlab_cli::config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(
    name = "chlab",
    version,
    about = "Numerical lab for the two-component Camassa-Holm system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality battery over a seeded random ensemble.
    Verify(Common),
    /// Tabulate the lifespan along an amplitude ray.
    Lifespan(Common),
    /// Build the time Taylor series and probe its disk of convergence.
    Taylor(Common),
    /// Integrate in time and track the strip of analyticity.
    Evolve(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `verify.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat soft flags as failures.
    #[arg(long)]
    strict: bool,
}

fn load(c: &Common) -> anyhow::Result<(RunConfig, PathBuf)> {
    let (mut cfg, base) = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
            let cfg =
                parse_config(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (cfg, base)
        }
        None => (RunConfig::default(), PathBuf::new()),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.out_dir = out.clone();
    }
    Ok((cfg, base))
}

fn run(cli: &Cli) -> anyhow::Result<(Outcome, bool)> {
    let (common, f): (&Common, fn(&RunConfig, &Path) -> anyhow::Result<Outcome>) =
        match &cli.command {
            Command::Verify(c) => (c, |cfg, _| commands::verify(cfg)),
            Command::Lifespan(c) => (c, commands::lifespan),
            Command::Taylor(c) => (c, commands::taylor),
            Command::Evolve(c) => (c, commands::evolve_cmd),
        };
    let (cfg, base) = load(common)?;
    Ok((f(&cfg, &base)?, common.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, strict)) => {
            for h in &outcome.hard_failures {
                eprintln!("FAIL: {h}");
            }
            for s in &outcome.soft_flags {
                eprintln!("{}: {s}", if strict { "FAIL" } else { "warning" });
            }
            ExitCode::from(outcome.exit_code(strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
