mod commands;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::Value;
use sha2::{Digest, Sha256};

use commands::*;
use output::{emit, Format, Provenance};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(fermigas::Error),
}

impl From<fermigas::Error> for CliError {
    fn from(e: fermigas::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => e.exit_code() as u8,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "invalid configuration: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fermigas", version, about = "Jastrow-Slater trial states for the dilute spin-polarized Fermi gas")]
struct Cli {
    /// JSON run configuration; its keys mirror the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, or directory (existing or ending in '/').
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, env = "FERMIGAS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero-energy scattering solution, derived lengths and moments.
    Scattering(ScatteringArgs),
    /// Build a Fermi polyhedron.
    Polyhedron(PolyhedronArgs),
    /// Enumerate a momentum set and its kinetic sums.
    Momenta(MomentaArgs),
    /// Lebesgue constants of momentum sets and power kernels.
    Lebesgue(LebesgueArgs),
    /// Reduced densities of the free determinant.
    Densities(DensitiesArgs),
    /// Cluster-expansion identities and small diagrams.
    Ggr(GgrArgs),
    /// Energy curves, bounds, budgets and assembled energies.
    Energy(EnergyArgs),
    /// Compare the upper bound with the low-density expansion and external data.
    Compare(CompareArgs),
}

pub struct RunContext {
    pub seed: u64,
    pub threads: usize,
}

fn config_argv(path: &PathBuf) -> Result<(Vec<String>, Value), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let obj = v.as_object().ok_or_else(|| CliError::Config("configuration must be a JSON object".into()))?;
    let sub = obj.get("subcommand").and_then(Value::as_str).ok_or_else(|| CliError::Config("missing 'subcommand'".into()))?;
    let mut argv = vec!["fermigas".to_string(), sub.to_string()];
    let mut push = |key: &str, val: &Value| -> Result<(), CliError> {
        let flag = format!("--{}", key.replace('_', "-"));
        match val {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Number(n) => argv.extend([flag, n.to_string()]),
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())).collect();
                argv.extend([flag, items.join(",")]);
            }
            Value::Object(_) => return Err(CliError::Config(format!("'{key}' cannot be an object"))),
        }
        Ok(())
    };
    if let Some(args) = obj.get("args") {
        let args = args.as_object().ok_or_else(|| CliError::Config("'args' must be an object".into()))?;
        for (k, val) in args {
            push(k, val)?;
        }
    }
    for k in ["out", "format", "seed", "threads"] {
        if let Some(val) = obj.get(k) {
            push(k, val)?;
        }
    }
    Ok((argv, v))
}

fn parse(argv: &[String]) -> Result<Cli, ExitCode> {
    let matches = Cli::command().try_get_matches_from(argv);
    match matches.and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => Ok(c),
        Err(e) => {
            let _ = e.print();
            Err(match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            })
        }
    }
}

fn dispatch(cmd: &Command, ctx: &RunContext) -> Result<Outcome, CliError> {
    match cmd {
        Command::Scattering(a) => scattering(a, ctx),
        Command::Polyhedron(a) => polyhedron(a, ctx),
        Command::Momenta(a) => momenta(a, ctx),
        Command::Lebesgue(a) => lebesgue(a, ctx),
        Command::Densities(a) => densities(a, ctx),
        Command::Ggr(a) => ggr(a, ctx),
        Command::Energy(a) => energy(a, ctx),
        Command::Compare(a) => compare(a, ctx),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let mut cli = match parse(&argv) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(path) = cli.config.clone() {
        let from_file = match config_argv(&path) {
            Ok((a, _)) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
        };
        let file = match parse(&from_file) {
            Ok(c) => c,
            Err(code) => return code,
        };
        if cli.command.is_some() {
            eprintln!("error: give the subcommand either on the command line or in the configuration, not both");
            return ExitCode::from(1);
        }
        cli = Cli {
            config: None,
            out: cli.out.or(file.out),
            format: cli.format.or(file.format),
            seed: cli.seed.or(file.seed),
            threads: cli.threads.or(file.threads),
            command: file.command,
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given (see --help)");
        return ExitCode::from(1);
    };
    let ctx = RunContext {
        seed: cli.seed.unwrap_or(0),
        threads: cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1),
    };
    let hash = Sha256::digest(format!("{command:?}|seed={}", ctx.seed).as_bytes());
    let prov = Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        seed: ctx.seed,
    };
    let result = dispatch(&command, &ctx).and_then(|o| {
        let format = cli.format.unwrap_or(o.default_format);
        emit(&o.artifact, &prov, format, cli.out.as_deref())?;
        match o.failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
