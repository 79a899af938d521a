use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qedlab::config::{preset_names, Kind};
use qedlab::ground::{run_ground, ReferenceCache};
use qedlab::output::{row_failed, write_ground, write_ground_plot, write_spectrum, write_spectrum_plot};
use qedlab::spectrum::run_spectrum;
use qedlab::{validate, worker_pool, CliError, ConfigFile, RunConfig};

#[derive(Parser)]
#[command(name = "qedlab", version, about = "One-dimensional cavity QED experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state sweeps.
    Ground(Source),
    /// Delta-kick absorption spectra.
    Spectrum(Source),
    /// Report what a configuration would run.
    Validate(Source),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct Source {
    /// TOML configuration; overlays the preset when both are given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides `output.dir`, defaults to `results`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Source {
    fn runs(&self) -> Result<(Vec<RunConfig>, PathBuf), CliError> {
        let file = ConfigFile::load(self.config.as_deref(), self.preset.as_deref())?;
        let out = self
            .out
            .clone()
            .or_else(|| file.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("results"));
        Ok((file.resolve()?, out))
    }
}

fn ground(src: &Source) -> Result<(), CliError> {
    let (runs, out) = src.runs()?;
    let pool = worker_pool()?;
    let cache = ReferenceCache::default();
    let (mut failed, mut total) = (0, 0);
    for run in runs.iter().filter(|r| r.kind == Kind::Ground) {
        let rows = run_ground(run, &pool, &cache)?;
        total += rows.len();
        failed += rows.iter().filter(|r| row_failed(r)).count();
        let path = write_ground(&out, run, &rows)?;
        write_ground_plot(&out, run, &rows)?;
        println!("{}", path.display());
    }
    if total == 0 {
        return Err(CliError::Config("no ground-state runs in this configuration".into()));
    }
    if failed > 0 {
        return Err(CliError::PointsFailed { failed, total });
    }
    Ok(())
}

fn spectrum(src: &Source) -> Result<(), CliError> {
    let (runs, out) = src.runs()?;
    let pool = worker_pool()?;
    let (mut failed, mut total) = (0, 0);
    for run in runs.iter().filter(|r| r.kind == Kind::Spectrum) {
        let map = run_spectrum(run, &pool)?;
        total += map.columns.len();
        failed += map.failures();
        for path in write_spectrum(&out, run, &map)? {
            println!("{}", path.display());
        }
        write_spectrum_plot(&out, run)?;
    }
    if total == 0 {
        return Err(CliError::Config("no spectrum runs in this configuration".into()));
    }
    if failed > 0 {
        return Err(CliError::PointsFailed { failed, total });
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ground(s) => ground(s),
        Command::Spectrum(s) => spectrum(s),
        Command::Validate(s) => s.runs().map(|(runs, _)| {
            let (text, bad) = validate::report(&runs);
            print!("{text}");
            if bad > 0 {
                log::warn!("{bad} run(s) have problems");
            }
        }),
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}
