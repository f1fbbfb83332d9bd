//! Command-line front end: `simulate`, `couple`, `stability` and `cipher`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numeric
//! failure. A diverged run is not a failure; its status is written into the
//! output metadata.

pub mod args;
pub mod table;

use args::{
    CipherCommand, Cli, Command, CoupleArgs, KeyArgs, ReportFormat, SimulateArgs, SolverArgs,
    StabilityArgs,
};
use clap::error::ErrorKind;
use clap::Parser;
use fracsync_core::analysis::{classify_error, proposition_audit, stability_report, StabilityReport};
use fracsync_core::cipher::{CipherSession, KeySource};
use fracsync_core::coupling::{simulate_coupled, CouplingScheme};
use fracsync_core::systems::{preset_params, registry_lookup, rossler_preset, t_preset, Params};
use fracsync_core::{abm_solve, Error, FractionalOrders, SolverConfig, Trajectory};
use serde::Serialize;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use table::CsvTable;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Numeric { .. } | Error::Convergence { .. }) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Couple(a) => cmd_couple(&a, stdout),
        Command::Stability(a) => cmd_stability(&a, stdout),
        Command::Cipher(c) => cmd_cipher(&c, stdout),
    }
}

/// Echoed into every CSV file so the run can be repeated exactly.
#[derive(Serialize)]
struct RunConfig<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(flatten)]
    args: &'a T,
}

fn run_config_line<T: Serialize>(command: &'static str, args: &T) -> CliResult<String> {
    let config = RunConfig {
        tool: "fracsync",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
    };
    Ok(format!("run-config: {}", serde_json::to_string(&config)?))
}

fn solver_config(s: &SolverArgs) -> CliResult<SolverConfig> {
    let cfg = SolverConfig::from_horizon(s.h, s.t_end)?
        .with_corrector_sweeps(s.corrector_sweeps)
        .with_divergence_threshold(s.divergence_threshold)
        .with_memory_window(s.memory_window);
    cfg.validate()?;
    Ok(cfg)
}

fn three(values: &[f64], what: &str) -> CliResult<[f64; 3]> {
    <[f64; 3]>::try_from(values)
        .map_err(|_| CliError::Usage(format!("{what} needs 3 values, got {}", values.len())))
}

fn overrides(pairs: &[(String, f64)]) -> Params {
    pairs.iter().cloned().collect()
}

fn write_output(path: &Path, stdout: &mut dyn Write, table: &CsvTable) -> CliResult<()> {
    if path == Path::new("-") {
        table
            .write_to(stdout)
            .map_err(|e| CliError::io("writing standard output", e))
    } else {
        let file = File::create(path)
            .map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
        let mut w = BufWriter::new(file);
        table
            .write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }
}

fn time_rows(parts: &[&Trajectory]) -> Vec<Vec<f64>> {
    let n = parts.iter().map(|p| p.len()).min().unwrap_or(0);
    (0..n)
        .map(|j| {
            let mut row = vec![parts[0].times()[j]];
            for p in parts {
                row.extend_from_slice(p.row(j));
            }
            row
        })
        .collect()
}

pub fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let system = registry_lookup(a.system.name(), &overrides(&a.param))?;
    let orders = FractionalOrders::new(a.alpha.clone())?;
    if orders.len() != system.dimension || a.x0.len() != system.dimension {
        return Err(CliError::Usage(format!(
            "system {} has {} components; got {} orders and {} initial values",
            system.name,
            system.dimension,
            orders.len(),
            a.x0.len()
        )));
    }
    let cfg = solver_config(&a.solver)?;
    let field = system.field().clone();
    let traj = abm_solve(move |t, x, out| field(t, x, out), &orders, &a.x0, &cfg)?;
    let table = CsvTable {
        preamble: vec![
            format!("fracsync simulate: system {}", system.name),
            run_config_line("simulate", a)?,
        ],
        header: ["t", "x", "y", "z"].map(String::from).to_vec(),
        rows: time_rows(&[&traj]),
        trailer: vec![format!("status: {}", traj.status())],
    };
    write_output(&a.out, stdout, &table)
}

/// Splits overrides between the T and Rössler parameter sets.
fn coupling_params(pairs: &[(String, f64)]) -> CliResult<(Params, Params)> {
    let (t_keys, r_keys) = (t_preset().values, rossler_preset().values);
    let mut t = Params::new();
    let mut r = Params::new();
    for (k, v) in pairs {
        if t_keys.contains_key(k) {
            t.insert(k.clone(), *v);
        } else if r_keys.contains_key(k) {
            r.insert(k.clone(), *v);
        } else {
            return Err(CliError::Usage(format!("unknown parameter {k}")));
        }
    }
    Ok((preset_params("t", &t)?, preset_params("rossler", &r)?))
}

fn scheme_from(
    scenario: args::ScenarioArg,
    gains: args::GainsArg,
    k: &[f64],
    alpha: &[f64],
    params: &[(String, f64)],
) -> CliResult<CouplingScheme> {
    let (t, r) = coupling_params(params)?;
    let k = three(k, "--k")?;
    let orders = FractionalOrders::new(alpha.to_vec())?;
    Ok(CouplingScheme::new(scenario.to_core(), gains.to_core(k), &t, &r, orders)?)
}

pub fn cmd_couple(a: &CoupleArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let scheme = scheme_from(a.scenario, a.gains, &a.k, &a.alpha, &a.param)?;
    let d0 = three(&a.drive_x0, "--drive-x0")?;
    let r0 = three(&a.response_x0, "--response-x0")?;
    let cfg = solver_config(&a.solver)?;
    let run = simulate_coupled(&scheme, &d0, &r0, &cfg)?;
    let c = classify_error(&run.error, a.tolerance, a.tail)?;
    let table = CsvTable {
        preamble: vec![
            format!("fracsync couple: scenario {} gains {}", scheme.name, scheme.gains.name()),
            run_config_line("couple", a)?,
        ],
        header: ["t", "xd", "yd", "zd", "xr", "yr", "zr", "e1", "e2", "e3"]
            .map(String::from)
            .to_vec(),
        rows: time_rows(&[&run.drive, &run.response, &run.error]),
        trailer: vec![
            format!("status: {}", run.error.status()),
            format!("tail-sup-norm: {:e}", c.tail_sup_norm),
            format!("tolerance: {:e}", c.tolerance),
            format!("tail-fraction: {}", c.tail_fraction),
            format!("verdict: {}", c.verdict),
        ],
    };
    write_output(&a.out, stdout, &table)
}

fn render_report(report: &StabilityReport, format: ReportFormat) -> CliResult<String> {
    Ok(match format {
        ReportFormat::Text => {
            let mut s = String::new();
            for (i, c) in report.components.iter().enumerate() {
                s.push_str(&format!(
                    "component {}: lambda {} alpha {} -> {}\n",
                    i + 1,
                    c.lambda,
                    c.alpha,
                    c.verdict
                ));
            }
            s.push_str(&format!("overall: {}\n", report.overall));
            s
        }
        ReportFormat::Json => {
            let components: Vec<_> = report
                .components
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "lambda": c.lambda,
                        "alpha": c.alpha,
                        "verdict": c.verdict.to_string(),
                    })
                })
                .collect();
            let value = serde_json::json!({
                "components": components,
                "overall": report.overall.to_string(),
            });
            format!("{}\n", serde_json::to_string_pretty(&value)?)
        }
    })
}

pub fn cmd_stability(a: &StabilityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let report = match (&a.lambda, a.scenario) {
        (Some(lambda), None) => {
            let alpha = a
                .alpha
                .as_ref()
                .ok_or_else(|| CliError::Usage("--lambda needs --alpha".into()))?;
            stability_report(lambda, alpha).map_err(|e| CliError::Usage(e.to_string()))?
        }
        (None, Some(scenario)) => {
            let alpha = a.alpha.clone().unwrap_or_else(|| fracsync_core::systems::DEFAULT_ORDERS.to_vec());
            proposition_audit(&scheme_from(scenario, a.gains, &a.k, &alpha, &a.param)?)
        }
        _ => {
            return Err(CliError::Usage(
                "give either --lambda with --alpha, or --scenario".into(),
            ))
        }
    };
    stdout
        .write_all(render_report(&report, a.format)?.as_bytes())
        .map_err(|e| CliError::io("writing standard output", e))
}

fn read_keys_file(path: &PathBuf) -> CliResult<Vec<u64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<u64>().map_err(|_| {
                CliError::Usage(format!(
                    "{} line {}: {:?} is not a non-negative integer",
                    path.display(),
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect()
}

fn key_source(keys: &KeyArgs, scale: f64) -> CliResult<KeySource> {
    if let Some(path) = &keys.keys_file {
        return Ok(KeySource::Explicit(read_keys_file(path)?));
    }
    if let Some(seed) = keys.seed {
        return Ok(KeySource::SeededPrng(seed));
    }
    let source = keys
        .keystream_from
        .as_deref()
        .ok_or_else(|| CliError::Usage("one key source is required".into()))?;
    let parts: Vec<&str> = source.rsplitn(3, ',').collect();
    let [t0, column, path] = parts[..] else {
        return Err(CliError::Usage(format!(
            "--keystream-from expects path,column,t0-index, got {source:?}"
        )));
    };
    let t0_index: usize = t0
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad t0 index {t0:?}")))?;
    let file = File::open(path).map_err(|e| CliError::io(format!("opening {path}"), e))?;
    let table = CsvTable::read_from(BufReader::new(file))?;
    Ok(KeySource::Trajectory {
        z: table.column(column.trim())?,
        t0_index,
        scale,
    })
}

pub fn cmd_cipher(c: &CipherCommand, stdout: &mut dyn Write) -> CliResult<()> {
    let output = match c {
        CipherCommand::Encrypt(a) => {
            let session = CipherSession::new(a.options.codec.to_core(), key_source(&a.keys, a.options.scale)?);
            let codes = session.encrypt(&a.message)?;
            codes.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
        CipherCommand::Decrypt(a) => {
            let session = CipherSession::new(a.options.codec.to_core(), key_source(&a.keys, a.options.scale)?);
            session.decrypt(&a.ciphertext)?
        }
    };
    writeln!(stdout, "{output}").map_err(|e| CliError::io("writing standard output", e))
}
