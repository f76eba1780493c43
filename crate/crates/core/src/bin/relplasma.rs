use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info};
use serde::Serialize;

use relplasma::dispersion::{
    negative_index_scan, solve_dispersion, DispersionConfig, DispersionMode, DispersionSolution,
    Medium,
};
use relplasma::error::Error;
use relplasma::limits::{limits_report, LimitGroup};
use relplasma::response::ElectronGas;
use relplasma::state::{ThermoState, DEFAULT_TOL, E2_DEFAULT};
use relplasma::sweep::{
    format_float, render, run_sweep, GridInput, SweepOverrides, SweepSpec, TOL_ENV,
};
use relplasma::validation::run_all;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "relplasma",
    version,
    about = "Linear response of a relativistic electron gas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate response functions on a (t, zeta, omega, q) grid.
    Sweep(SweepArgs),
    /// Compare closed forms, quadrature and nonrelativistic limits.
    Limits(LimitsArgs),
    /// Refractive indices and the doubly negative band over a frequency range.
    Dispersion(DispersionArgs),
    /// Run the built-in acceptance checks.
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// Temperature grid: value, comma list or lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// auto, full, longwave, stationary or vacuum.
    #[arg(long)]
    regime: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    e2: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 2.0)]
    zeta: f64,
    #[arg(long, default_value_t = E2_DEFAULT)]
    e2: f64,
    #[arg(long)]
    tol: Option<f64>,
}

impl StateArgs {
    fn state(&self) -> Result<ThermoState, Error> {
        ThermoState::with_coupling(self.t, self.zeta, self.e2)
    }

    fn tol(&self) -> Result<f64, Error> {
        let tol = match (self.tol, std::env::var(TOL_ENV).ok()) {
            (Some(t), _) => t,
            (None, Some(v)) => v
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("{TOL_ENV}='{v}' is not a number")))?,
            (None, None) => DEFAULT_TOL,
        };
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(tol)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    All,
    Stationary,
    Drude,
}

#[derive(Args)]
struct LimitsArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Which rows to show.
    #[arg(long, value_enum, default_value = "all")]
    regime: GroupArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Longwave,
    Selfconsistent,
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0.01)]
    omega_min: f64,
    #[arg(long, default_value_t = 0.3)]
    omega_max: f64,
    #[arg(long, default_value_t = 60)]
    n_points: usize,
    #[arg(long, value_enum, default_value = "longwave")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Numerical(format!("writing output: {e}"));
    match out {
        Some(path) => fs::write(path, bytes).map_err(io),
        None => std::io::stdout().lock().write_all(bytes).map_err(io),
    }
}

fn grid(arg: &Option<String>) -> Option<GridInput> {
    arg.clone().map(GridInput::Text)
}

fn cmd_sweep(args: &SweepArgs) -> Result<bool, Failure> {
    let cli = SweepOverrides {
        t: grid(&args.t),
        zeta: grid(&args.zeta),
        omega: grid(&args.omega),
        q: grid(&args.q),
        regime: args.regime.clone(),
        tol: args.tol,
        e2: args.e2,
        format: args.format.map(|f| match f {
            Format::Csv => "csv".to_string(),
            Format::Json => "json".to_string(),
        }),
        out: args.out.clone(),
    };
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Some(SweepOverrides::from_json(&text)?)
        }
        None => None,
    };
    let env_tol = std::env::var(TOL_ENV).ok();
    let spec = SweepSpec::resolve(&cli, config.as_ref(), env_tol.as_deref())?;
    info!("sweeping {} grid points at tol {:e}", spec.len(), spec.tol);
    let outcome = run_sweep(&spec)?;
    emit(&render(&outcome.records, spec.format)?, spec.out.as_ref())?;
    if outcome.any_nonconverged() {
        error!("some grid points did not converge");
        return Ok(false);
    }
    Ok(true)
}

fn cmd_limits(args: &LimitsArgs) -> Result<bool, Failure> {
    let state = args.state.state()?;
    let rows: Vec<_> = limits_report(&state, args.state.tol()?)?
        .into_iter()
        .filter(|r| match args.regime {
            GroupArg::All => true,
            GroupArg::Stationary => r.group == LimitGroup::Stationary,
            GroupArg::Drude => r.group == LimitGroup::Drude,
        })
        .collect();
    let ok = rows.iter().all(|r| r.passed());
    let bytes = match args.format {
        Format::Json => {
            let mut v =
                serde_json::to_vec_pretty(&rows).map_err(|e| Failure::Numerical(e.to_string()))?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Failure::Numerical(e.to_string());
            w.write_record([
                "group",
                "quantity",
                "reference",
                "referenceValue",
                "method",
                "value",
                "deviation",
                "tolerance",
                "status",
            ])
            .map_err(csv_err)?;
            for r in &rows {
                let group = match r.group {
                    LimitGroup::Stationary => "stationary",
                    LimitGroup::Drude => "drude",
                };
                let status = match (r.tolerance, r.passed()) {
                    (None, _) => "info",
                    (Some(_), true) => "ok",
                    (Some(_), false) => "VIOLATED",
                };
                w.write_record([
                    group.to_string(),
                    r.quantity.to_string(),
                    r.reference_label.to_string(),
                    format_float(r.reference),
                    r.value_label.to_string(),
                    format_float(r.value),
                    format!("{:.3e}", r.deviation),
                    r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                    status.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner()
                .map_err(|e| Failure::Numerical(e.to_string()))?
        }
    };
    emit(&bytes, None)?;
    Ok(ok)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DispersionRecord {
    omega: f64,
    eps: f64,
    mu_inv: f64,
    tau: f64,
    n_index: Vec<f64>,
    residual: Vec<f64>,
    pole_nearby: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DispersionReport {
    negative_band: Vec<(f64, f64)>,
    pole_nearby: Vec<usize>,
    records: Vec<DispersionRecord>,
}

fn cmd_dispersion(args: &DispersionArgs) -> Result<bool, Failure> {
    let state = args.state.state()?;
    let gas = ElectronGas::new(state).with_tol(args.state.tol()?);
    let mode = match args.mode {
        ModeArg::Longwave => DispersionMode::LongWavelength,
        ModeArg::Selfconsistent => DispersionMode::SelfConsistent,
    };
    let band = negative_index_scan(&gas, args.omega_min, args.omega_max, args.n_points)?;
    let config = DispersionConfig::default();
    let mut records = Vec::with_capacity(band.omega_grid.len());
    for (i, &omega) in band.omega_grid.iter().enumerate() {
        let r = gas.longwave(omega)?;
        let sol: DispersionSolution = solve_dispersion(omega, &gas, mode, &config)?;
        records.push(DispersionRecord {
            omega,
            eps: band.eps_vals[i],
            mu_inv: band.mu_inv_vals[i],
            tau: r.tau,
            n_index: sol.n_index,
            residual: sol.residual,
            pole_nearby: sol.pole_nearby,
        });
    }
    for (lo, hi) in &band.negative_band {
        info!("doubly negative band [{lo:e}, {hi:e}]");
    }
    let report = DispersionReport {
        negative_band: band.negative_band,
        pole_nearby: band.pole_nearby,
        records,
    };
    let bytes = match args.format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&report)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let mut text = String::new();
            for (lo, hi) in &report.negative_band {
                text.push_str(&format!(
                    "# negativeBand {} {}\n",
                    format_float(*lo),
                    format_float(*hi)
                ));
            }
            text.push_str("omega,eps,muInv,tau,nIndex,residual,poleNearby\n");
            let join = |v: &[f64]| {
                v.iter()
                    .map(|x| format_float(*x))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            for r in &report.records {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    format_float(r.omega),
                    format_float(r.eps),
                    format_float(r.mu_inv),
                    format_float(r.tau),
                    join(&r.n_index),
                    join(&r.residual),
                    r.pole_nearby
                ));
            }
            text.into_bytes()
        }
    };
    emit(&bytes, args.out.as_ref())?;
    Ok(true)
}

fn cmd_check() -> Result<bool, Failure> {
    let outcomes = run_all();
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{o}").map_err(|e| Failure::Numerical(e.to_string()))?;
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(out, "{passed}/{} checks passed", outcomes.len())
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    Ok(passed == outcomes.len())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Limits(args) => cmd_limits(args),
        Command::Dispersion(args) => cmd_dispersion(args),
        Command::Check => cmd_check(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
