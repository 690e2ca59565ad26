use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qar::sweep::{self, Command, Config, SweepSpec};
use qar::Error;

/// Steady-state heat currents of collectively driven qutrit refrigerators.
#[derive(Debug, Parser)]
#[command(name = "qar", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Two-axis map over drive frequency and amplitude.
    Map(Common),
    /// One-axis scan comparing backends.
    Scan(Common),
    /// Current versus ensemble size, with classical scaling and local slope.
    Nscale(Common),
    /// Cooling-condition classification and its boundaries.
    CheckConditions(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Backend name; repeat or separate with commas.
    #[arg(long = "backend", value_delimiter = ',')]
    backends: Vec<String>,
    /// Named figure recipe, e.g. fig3.
    #[arg(long)]
    preset: Option<String>,
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 uses every core).
    #[arg(long)]
    workers: Option<usize>,
    /// Grid size, `A` or `AxB`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    redfield_cutoff_cap: Option<usize>,
}

impl Common {
    fn config(&self) -> qar::Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::parse(&std::fs::read_to_string(path)?)?,
            None => Config::default(),
        };
        let mut flags = Config::default();
        if !self.backends.is_empty() {
            flags.set("backends", &self.backends.join(","))?;
        }
        if let Some(p) = &self.preset {
            flags.set("preset", p)?;
        }
        if let Some(o) = &self.out {
            flags.set("out", &o.to_string_lossy())?;
        }
        if let Some(w) = self.workers {
            flags.set("workers", &w.to_string())?;
        }
        if let Some(g) = &self.grid {
            flags.set("grid", g)?;
        }
        if let Some(c) = self.redfield_cutoff_cap {
            flags.set("redfield_cutoff_cap", &c.to_string())?;
        }
        cfg.overlay(&flags);
        Ok(cfg)
    }
}

fn sink(path: Option<&Path>) -> qar::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn boundaries_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.boundaries.csv"))
}

fn execute(command: Command, args: &Common) -> qar::Result<i32> {
    let spec = SweepSpec::from_config(command, &args.config()?)?;
    if command == Command::CheckConditions {
        let res = sweep::check_conditions(&spec)?;
        let mut w = sink(spec.out.as_deref())?;
        res.write_points(&mut w)?;
        match &spec.out {
            Some(p) => res.write_boundaries(BufWriter::new(File::create(boundaries_path(p))?))?,
            None => res.write_boundaries(&mut w)?,
        }
        w.flush()?;
        log::info!("{} points, {} boundary points", res.points.len(), res.boundaries.len());
        return Ok(0);
    }
    let out = sweep::run(&spec)?;
    let mut w = sink(spec.out.as_deref())?;
    out.write_csv(&mut w)?;
    w.flush()?;
    if out.failures() > 0 {
        log::warn!("{} of {} rows failed", out.failures(), out.records.len());
    }
    Ok(out.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Map(a) => (Command::Map, a),
        Cmd::Scan(a) => (Command::Scan, a),
        Cmd::Nscale(a) => (Command::NScale, a),
        Cmd::CheckConditions(a) => (Command::CheckConditions, a),
    };
    match execute(command, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qar {}: {e}", command.name());
            let usage = matches!(
                e,
                Error::Usage(_) | Error::UnknownBackend(_) | Error::InvalidParameter { .. }
            );
            ExitCode::from(if usage { 2 } else { 4 })
        }
    }
}
