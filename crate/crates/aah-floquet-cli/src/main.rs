//! Batch front end: run one configured task or reproduce a bundled figure
//! set, writing plot-ready CSV/JSON plus a checksummed manifest.

mod config;
mod figures;
mod manifest;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aahf", version, about = "Floquet bands, Chern numbers and Thouless pumping of driven tilted AAH lattices")]
struct Cli {
    /// Worker threads for grid sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Override time slices per driving period.
    #[arg(long, global = true)]
    slices: Option<usize>,
    /// Cap on the Fock basis dimension.
    #[arg(long = "seed-cap", global = true)]
    seed_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment from a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled parameter set: fig1..fig5 or figA.
    Reproduce {
        figure: String,
        #[arg(long)]
        out: PathBuf,
        /// Shorten two-particle pump cycles to 400 periods (tolerance 0.1·|C|).
        #[arg(long)]
        ci: bool,
    },
}

fn apply_overrides(cfg: &mut config::ExperimentConfig, cli: &Cli) {
    if let Some(s) = cli.slices {
        cfg.numerics.slices_per_period = Some(s);
    }
    if let Some(cap) = cli.seed_cap {
        cfg.numerics.dimension_cap = cap;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("thread pool configured once");
    }
    match &cli.command {
        Command::Run { config, out } => {
            let text = match std::fs::read_to_string(config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            let mut cfg = match config::ExperimentConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            apply_overrides(&mut cfg, &cli);
            let out_dir = out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
            match tasks::run(&cfg, &out_dir) {
                Ok(manifest) => {
                    println!(
                        "{}: wrote {} file(s) to {} in {:.1}s",
                        cfg.task,
                        manifest.outputs.len() + 1,
                        out_dir.display(),
                        manifest.wall_seconds
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Reproduce { figure, out, ci } => {
            let Some(runs) = figures::expand(figure, *ci) else {
                eprintln!("error: unknown figure id {figure:?} (expected fig1..fig5 or figA)");
                return ExitCode::from(2);
            };
            let total_estimate: f64 = runs.iter().map(|r| figures::estimate_seconds(&r.config)).sum();
            if runs.iter().any(|r| r.config.system.particles >= 2) {
                eprintln!(
                    "two-particle bundle: estimated runtime ~{:.0} min ({} runs){}",
                    total_estimate / 60.0,
                    runs.len(),
                    if *ci { " [ci scale]" } else { "" }
                );
            }
            for mut fr in runs {
                apply_overrides(&mut fr.config, &cli);
                let dir = out.join(&fr.subdir);
                eprintln!("running {} -> {}", fr.subdir, dir.display());
                match tasks::run(&fr.config, &dir) {
                    Ok(_) => {}
                    Err(e) => {
                        eprintln!("error in {}: {e}", fr.subdir);
                        return ExitCode::from(e.exit_code() as u8);
                    }
                }
            }
            println!("reproduced {figure} into {}", out.display());
            ExitCode::SUCCESS
        }
    }
}
