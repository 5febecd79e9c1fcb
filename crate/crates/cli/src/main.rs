//! `histories`: factor sweeps, verification runs and probability tables as CSV.

mod commands;
mod grid;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use histories_core::config::ConfigMap;
use histories_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "histories",
    version,
    about = "Decoherence functionals and history probabilities for a measured oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate factor functions over a grid (`particle-factors`, `pointer-factors`, `probability-kernels`).
    Sweep(Common),
    /// Run the oracle-versus-closed-form suite; exit 2 if any check fails.
    Verify(Common),
    /// Probability table over a window of intervals.
    Prob(Common),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// key = value configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep kind.
    #[arg(long)]
    kind: Option<String>,
    /// Sweep grid `start:stop:step`.
    #[arg(long)]
    grid: Option<String>,
    /// Append oracle columns and absolute deltas to a sweep.
    #[arg(long)]
    with_oracle: bool,
    /// Closed form used for J: `appendix` (default) or `main-text`.
    #[arg(long)]
    j_form: Option<String>,
    /// Replace every verification tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Probability table covers α ∈ [−window, window].
    #[arg(long)]
    window: Option<u32>,
    /// Extra `key=value` settings, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    /// Config file, then `--set`, then dedicated flags.
    fn settings(&self) -> Result<ConfigMap, Error> {
        let mut map = match &self.config {
            Some(path) => ConfigMap::from_file(path)?,
            None => ConfigMap::default(),
        };
        for pair in &self.set {
            map.set_pair(pair)?;
        }
        let flags = [
            ("kind", self.kind.clone()),
            ("grid", self.grid.clone()),
            ("j_form", self.j_form.clone()),
            ("tolerance", self.tolerance.map(|t| t.to_string())),
            ("window", self.window.map(|w| w.to_string())),
            ("with_oracle", self.with_oracle.then(|| "true".to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                map.set(key, &v);
            }
        }
        Ok(map)
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::QuadratureFailure(_) => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let common = match &cli.command {
        Command::Sweep(c) | Command::Verify(c) | Command::Prob(c) => c,
    };
    let result = common.settings().and_then(|settings| match &cli.command {
        Command::Sweep(_) => commands::sweep(&settings).map(|text| (text, true)),
        Command::Verify(_) => commands::verify(&settings),
        Command::Prob(_) => commands::probabilities(&settings).map(|text| (text, true)),
    });
    match result {
        Ok((text, passed)) => {
            let written = open_output(&common.out).and_then(|mut w| {
                w.write_all(text.as_bytes())?;
                w.flush()
            });
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
