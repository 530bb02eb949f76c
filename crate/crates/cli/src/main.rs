//! `hsgeo`: Sobolev norms, short-path sweeps, geodesic solves and Green's
//! kernels from the command line.

mod commands;
mod config;
mod fields;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::{CliError, CliResult, Config};
use report::{object, to_pretty, write_file};

#[derive(Parser)]
#[command(name = "hsgeo", version, about = "Fractional Sobolev metrics on 1-D diffeomorphism groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a preset or CSV field.
    Norm(Common),
    /// Length and energy along a family of paths.
    Vanish(Common),
    /// Geodesic equation solve with conserved-energy report.
    Geodesic(Common),
    /// Table of the radial Green's kernel.
    Kernel(Common),
    /// Run the invariant suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Inject a fault to test the harness (`hilbert`).
        #[arg(long)]
        fault: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` config file; flags and trailing overrides win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, value_parser = ["hs", "hsbar", "homogeneous"])]
    variant: Option<String>,
    /// Directory for CSV and JSON files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` overrides, applied in order.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> CliResult<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let flags = [
            ("grid_n", self.grid_n.map(|v| v.to_string())),
            ("period", self.period.map(|v| v.to_string())),
            ("s", self.s.map(|v| v.to_string())),
            ("variant", self.variant.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (name, common) = match &cli.command {
        Command::Norm(c) => ("norm", c),
        Command::Vanish(c) => ("vanish", c),
        Command::Geodesic(c) => ("geodesic", c),
        Command::Kernel(c) => ("kernel", c),
        Command::Verify { common, .. } => ("verify", common),
    };
    let cfg = common.config()?;
    let outcome = match &cli.command {
        Command::Norm(_) => commands::cmd_norm(&cfg)?,
        Command::Vanish(_) => commands::cmd_vanish(&cfg)?,
        Command::Geodesic(_) => commands::cmd_geodesic(&cfg)?,
        Command::Kernel(_) => commands::cmd_kernel(&cfg)?,
        Command::Verify { fault, .. } => verify::cmd_verify(&cfg, fault.as_deref())?,
    };
    let json = to_pretty(&outcome.json);
    if let Some(dir) = commands::out_dir(&cfg) {
        write_file(&dir, &format!("{name}.json"), &json)?;
        for (file, contents) in &outcome.files {
            write_file(&dir, file, contents)?;
        }
    }
    if name == "verify" {
        if let Some((_, text)) = outcome.files.iter().find(|(f, _)| f == "verify.txt") {
            eprint!("{text}");
        }
    }
    print!("{json}");
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(outcome.failures))
    }
}

fn report_error(kind: &str, message: &str, code: i32) -> ExitCode {
    let v = object([("error", kind.into()), ("message", message.into()), ("exit_code", Value::from(code))]);
    eprint!("{}", to_pretty(&v));
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("UsageError", e.to_string().trim(), 2),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e.kind(), &e.to_string(), e.exit_code()),
    }
}
