//! `supercharge`: reproducible quantum-battery experiments.
//!
//! Each subcommand writes its CSV/JSON outputs plus a `manifest.json` into the
//! output directory. Failures print one JSON error record on stderr.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use supercharge::grover::ScheduleKind;

use crate::commands::Artifacts;
use crate::config::FileConfig;

#[derive(Debug, Parser)]
#[command(name = "supercharge", version, about = "Quantum-battery charging experiments")]
struct Cli {
    /// TOML document with one table per subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default `out/<subcommand>`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for internal scans.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct RangeArgs {
    #[arg(long)]
    nmin: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Linear,
    Brach,
}

impl From<ScheduleArg> for ScheduleKind {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Linear => ScheduleKind::Linear,
            ScheduleArg::Brach => ScheduleKind::Brach,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum Grover charging power against N = 2^n for each schedule.
    GroverScan {
        #[command(flatten)]
        range: RangeArgs,
        /// Restrict to the given schedules (repeatable).
        #[arg(long, value_enum)]
        schedule: Vec<ScheduleArg>,
    },
    /// Gap-adapted interpolation curves f(s) for N = 2^n.
    GroverBrach {
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Maximum adiabatic power of the Ising and parallel batteries.
    IsingPower {
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Ground-energy curvature and gap along the Ising sweep.
    IsingGap {
        /// Chain sizes (repeatable).
        #[arg(long)]
        n: Vec<usize>,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Fidelity of unassisted, counter-diabatic and Floquet-engineered charging.
    CdFidelity {
        #[arg(long)]
        n: Option<usize>,
        /// `Omega_0 tau`.
        #[arg(long)]
        tau: Option<f64>,
        /// Expansion orders (repeatable).
        #[arg(long)]
        ell: Vec<usize>,
        /// `omega / omega0`; applies to every order selected by `--ell`, or to both orders.
        #[arg(long)]
        omega_ratio: Option<f64>,
    },
    /// Driving-potential ratio of collective and parallel charging.
    Advantage {
        #[command(flatten)]
        range: RangeArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GroverScan { .. } => "grover-scan",
            Command::GroverBrach { .. } => "grover-brach",
            Command::IsingPower { .. } => "ising-power",
            Command::IsingGap { .. } => "ising-gap",
            Command::CdFidelity { .. } => "cd-fidelity",
            Command::Advantage { .. } => "advantage",
        }
    }
}

#[derive(Debug)]
struct Failure {
    kind: String,
    message: String,
}

impl Failure {
    fn new(kind: impl Into<String>, message: impl ToString) -> Self {
        Self {
            kind: kind.into(),
            message: message.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind.as_str() {
            "config" | "usage" => 2,
            _ => 1,
        }
    }
}

impl From<supercharge::Error> for Failure {
    fn from(e: supercharge::Error) -> Self {
        Failure::new(e.kind(), e)
    }
}

fn apply_range(range: &RangeArgs, nmin: &mut usize, nmax: &mut usize) {
    if let Some(v) = range.nmin {
        *nmin = v;
    }
    if let Some(v) = range.nmax {
        *nmax = v;
    }
}

fn sites_range(range: &RangeArgs, what: &str) -> Result<Option<Vec<usize>>, Failure> {
    match (range.nmin, range.nmax) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) if a <= b => Ok(Some((a..=b).collect())),
        (Some(a), Some(b)) => Err(Failure::new("usage", format!("{what}: nmin {a} exceeds nmax {b}"))),
        _ => Err(Failure::new("usage", format!("{what}: --nmin and --nmax must be given together"))),
    }
}

/// Merges flags into the file configuration and runs the subcommand.
fn execute(command: &Command, file: FileConfig) -> Result<(Value, Artifacts), Failure> {
    match command {
        Command::GroverScan { range, schedule } => {
            let mut c = file.grover_scan;
            apply_range(range, &mut c.nmin, &mut c.nmax);
            if !schedule.is_empty() {
                c.schedules = schedule.iter().map(|&s| s.into()).collect();
            }
            Ok((to_value(&c), commands::grover_scan(&c)?))
        }
        Command::GroverBrach { range } => {
            let mut c = file.grover_brach;
            if let Some(ns) = sites_range(range, "grover-brach")? {
                if ns.iter().any(|&k| !(1..=62).contains(&k)) {
                    return Err(Failure::new("usage", "grover-brach: n must lie in 1..=62"));
                }
                c.dims = ns.into_iter().map(|k| 1u64 << k).collect();
            }
            Ok((to_value(&c), commands::grover_brach(&c)?))
        }
        Command::IsingPower { range } => {
            let mut c = file.ising_power;
            apply_range(range, &mut c.nmin, &mut c.nmax);
            Ok((to_value(&c), commands::ising_power(&c)?))
        }
        Command::IsingGap { n, range } => {
            let mut c = file.ising_gap;
            if let Some(ns) = sites_range(range, "ising-gap")? {
                c.ns = ns;
            }
            if !n.is_empty() {
                c.ns = n.clone();
            }
            Ok((to_value(&c), commands::ising_gap(&c)?))
        }
        Command::CdFidelity { n, tau, ell, omega_ratio } => {
            let mut c = file.cd_fidelity;
            if let Some(v) = n {
                c.n = *v;
            }
            if let Some(v) = tau {
                c.tau = *v;
            }
            if !ell.is_empty() {
                c.ell = ell.clone();
            }
            if let Some(r) = omega_ratio {
                if ell.is_empty() || ell.contains(&1) {
                    c.omega_ratio_1 = *r;
                }
                if ell.is_empty() || ell.contains(&2) {
                    c.omega_ratio_2 = *r;
                }
            }
            Ok((to_value(&c), commands::cd_fidelity(&c)?))
        }
        Command::Advantage { range } => {
            let mut c = file.advantage;
            apply_range(range, &mut c.nmin, &mut c.nmax);
            Ok((to_value(&c), commands::advantage(&c)?))
        }
    }
}

fn to_value(config: &impl serde::Serialize) -> Value {
    serde_json::to_value(config).expect("configuration serializes")
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::new("config", format!("{}: {e}", path.display())))?;
    FileConfig::parse(&text).map_err(|e| Failure::new("config", format!("{}: {e}", path.display())))
}

/// Writes every document, removing what was written if any write fails.
fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<(), Failure> {
    let existed = dir.exists();
    let io = |e: std::io::Error, p: &Path| Failure::new("io", format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, content) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            if !existed {
                let _ = fs::remove_dir(dir);
            }
            return Err(io(e, &path));
        }
        written.push(path);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(k) = cli.jobs {
        if k == 0 {
            return Err(Failure::new("usage", "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::new("usage", e))?;
    }
    let file = load_config(cli.config.as_deref())?;
    let name = cli.command.name();
    let out_dir = cli.out.clone().unwrap_or_else(|| Path::new("out").join(name));

    let start = Instant::now();
    let (resolved, artifacts) = execute(&cli.command, file)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut outputs: Vec<&str> = artifacts.files.iter().map(|(n, _)| n.as_str()).collect();
    outputs.push("manifest.json");
    let mut manifest = json!({
        "subcommand": name,
        "config": resolved,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_clock_seconds": elapsed,
        "jobs": rayon::current_num_threads(),
        "outputs": outputs,
    });
    if let Value::Object(m) = &mut manifest {
        m.extend(artifacts.manifest_extra.clone());
    }
    let mut files = artifacts.files;
    files.push((
        "manifest.json".into(),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    ));
    write_outputs(&out_dir, &files)
}

fn report(failure: &Failure) -> ExitCode {
    let record = json!({ "error": { "kind": failure.kind, "message": failure.message } });
    eprintln!("{record}");
    ExitCode::from(failure.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&Failure::new("usage", e.to_string().trim_end())),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(&f),
    }
}
