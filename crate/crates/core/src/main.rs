use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use dirac_walls::experiments::{
    asymptotics_reports, dump_figures, fit_sweep, load_sweep, reduce_reports, run_sweep, save_sweep,
    spectrum_reports, ExperimentConfig,
};
use dirac_walls::spectral_solver::energy_estimate_check;
use dirac_walls::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "dirac-walls", version, about = "Gap eigenvalues of Dirac operators with several domain walls")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// TOML experiment configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the random energy-estimate trials.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Verb {
    /// Direct gap eigenvalues for every profile of the config.
    Spectrum,
    /// Determinant roots of the reduced matrix M(δ, E).
    Reduce,
    /// Closed-form leading eigenvalues and coefficient vectors.
    Asymptotics,
    /// Cross-method sweep over δ, written as a versioned CSV.
    Sweep,
    /// Exponential decay fits of the sweep error columns.
    Fit,
    /// Profile and eigenfunction tables for plotting.
    Dump,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(path, text + "\n")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = &cli.out {
        config.out = o.to_string_lossy().into_owned();
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(j) = cli.jobs {
        config.jobs = j;
    }
    config.validate()?;
    let out = PathBuf::from(&config.out);
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("config.toml"), config.to_toml()?)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    pool.install(|| match cli.verb {
        Verb::Spectrum => write_json(&out.join("spectrum.json"), &spectrum_reports(&config)?),
        Verb::Reduce => write_json(&out.join("reduce.json"), &reduce_reports(&config)?),
        Verb::Asymptotics => write_json(&out.join("asymptotics.json"), &asymptotics_reports(&config)?),
        Verb::Sweep => {
            let rows = run_sweep(&config)?;
            let path = out.join("sweep.csv");
            save_sweep(&path, &rows)?;
            eprintln!("wrote {} ({} rows)", path.display(), rows.len());
            for r in rows.iter().filter(|r| r.is_flagged()) {
                eprintln!("flagged row δ = {:?}: {}", r.delta, r.error.as_deref().unwrap_or(""));
            }
            if let Some(e) = &config.energy {
                let base = config.base_profile()?;
                let report = energy_estimate_check(&base, e.delta, e.window, e.trials, config.seed)?;
                write_json(&out.join("energy.json"), &report)?;
            }
            Ok(())
        }
        Verb::Fit => {
            let rows = match &config.fit_input {
                Some(p) => load_sweep(Path::new(p))?,
                None => run_sweep(&config)?,
            };
            write_json(&out.join("fit.json"), &fit_sweep(&rows, config.profile.kappa_inf))
        }
        Verb::Dump => {
            for p in dump_figures(&config, &out)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
