//! `qstep` command-line front end.
//!
//! All physics flags are in natural units with ħ = 2m = 1, so `E = ε²`.
//! Field grids use the adimensional coordinate `ξ = √V0·x`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::oracle::{
    packet_arrival, reflected_series, PacketSpec, TimeScan, DEFAULT_QUADRATURE_POINTS,
};
use crate::quat::Complex;
use crate::scattering::{delay_times, phase_data, solve_step, PhaseData, DEFAULT_PHASE_STEP};
use crate::step::StepPotential;
use crate::sweep::verify_suite;
use crate::wavefield::{sample_grid, WaveSample};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_OUTPUT: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "qstep",
    version,
    about = "Quaternionic Schrödinger equation for a one-dimensional potential step",
    long_about = "Quaternionic Schrödinger equation for a one-dimensional potential step.\n\n\
        The step i·V1 + j·V2 + k·V3 occupies x > 0. Units: ħ = 2m = 1, so E = ε² \
        and times are in the same natural units. Set QSTEP_LOG to error, warn, info or debug for diagnostics."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Scattering coefficients, phases and delay times as one JSON object
    Solve {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Central-difference step in ε for the phase derivatives
        #[arg(long, default_value_t = DEFAULT_PHASE_STEP)]
        phase_step: f64,
    },
    /// Sampled field Φ(ξ), density and current
    Field {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
        x_max: f64,
        /// Number of grid points
        #[arg(long, short = 'n', default_value_t = 1201)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// R, T and delay times along a sweep of the energy or of |W|/V0
    Scan {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// `energy` sweeps E; `ratio` sweeps |W|/V0 at fixed V0, W direction and E
        #[arg(long, value_enum, default_value_t = ScanParam::Energy)]
        param: ScanParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of values, endpoints included
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded property suite (conservation, oracles, residuals)
    Verify {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 42)]
        rng_seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Gaussian packet arrival times at x = 0
    Packet {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Packet width in ε; defaults to 0.02·√E
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_POINTS)]
        n_quad: usize,
        #[arg(long, allow_negative_numbers = true, requires_all = ["t_max", "n_t"])]
        t_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires_all = ["t_min", "n_t"])]
        t_max: Option<f64>,
        #[arg(long, requires_all = ["t_min", "t_max"])]
        n_t: Option<usize>,
        /// CSV file for the (t, |ψ_refl|) series
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct PhysicsArgs {
    /// Coefficient of i (V1 ≥ 0)
    #[arg(long, allow_negative_numbers = true)]
    pub v1: f64,
    /// Coefficient of j
    #[arg(long, allow_negative_numbers = true)]
    pub v2: f64,
    /// Coefficient of k
    #[arg(long, allow_negative_numbers = true)]
    pub v3: f64,
    /// Incident energy E
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file (stdout when absent)
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanParam {
    Energy,
    Ratio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub param: ScanParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl ScanSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == self.steps - 1 {
                    self.to
                } else {
                    self.from + step * k as f64
                }
            })
            .collect()
    }
}

/// A validated command.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Solve {
        potential: StepPotential,
        energy: f64,
        phase_step: f64,
    },
    Field {
        potential: StepPotential,
        energy: f64,
        grid: Grid,
        output: Option<PathBuf>,
        format: Format,
    },
    Scan {
        potential: StepPotential,
        energy: Option<f64>,
        scan: ScanSpec,
        output: Option<PathBuf>,
        format: Format,
    },
    Verify {
        cases: usize,
        seed: u64,
        format: Format,
    },
    Packet {
        potential: StepPotential,
        spec: PacketSpec,
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("{0} of {1} properties failed")]
    VerifyFailed(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Output { .. } => EXIT_OUTPUT,
            CliError::VerifyFailed(..) => EXIT_VERIFY,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::NonPositiveEnergy(_)
            | Error::InvalidPotential(_)
            | Error::InvalidGrid(_)
            | Error::InvalidPacket(_) => CliError::Validation(err.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn check_energy(energy: Option<f64>) -> Result<f64, CliError> {
    let e = energy.ok_or_else(|| validation("--energy is required"))?;
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::NonPositiveEnergy(e).into());
    }
    Ok(e)
}

fn check_potential(p: &PhysicsArgs) -> Result<StepPotential, CliError> {
    Ok(StepPotential::new(p.v1, p.v2, p.v3)?)
}

impl RunConfig {
    /// Validates parsed flags; nothing numeric runs before this succeeds.
    pub fn from_args(args: CommandArgs) -> Result<Self, CliError> {
        match args {
            CommandArgs::Solve {
                physics,
                phase_step,
            } => {
                let potential = check_potential(&physics)?;
                let energy = check_energy(physics.energy)?;
                if !(phase_step > 0.0) || !phase_step.is_finite() {
                    return Err(validation(format!(
                        "--phase-step must be positive (got {phase_step})"
                    )));
                }
                Ok(RunConfig::Solve {
                    potential,
                    energy,
                    phase_step,
                })
            }
            CommandArgs::Field {
                physics,
                x_min,
                x_max,
                n,
                output,
            } => {
                let potential = check_potential(&physics)?;
                let energy = check_energy(physics.energy)?;
                if n < 2 || !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "need x_min < x_max and n ≥ 2 (got {x_min}, {x_max}, {n})"
                    ))
                    .into());
                }
                let format = table_format(output.format)?;
                Ok(RunConfig::Field {
                    potential,
                    energy,
                    grid: Grid { x_min, x_max, n },
                    output: output.output,
                    format,
                })
            }
            CommandArgs::Scan {
                physics,
                param,
                from,
                to,
                steps,
                output,
            } => {
                let potential = check_potential(&physics)?;
                if steps == 0 || !from.is_finite() || !to.is_finite() {
                    return Err(validation(format!("scan needs finite bounds and at least one step (got {from}, {to}, {steps})")));
                }
                let energy = match param {
                    ScanParam::Energy => {
                        if !(from > 0.0) || !(to > 0.0) {
                            return Err(Error::NonPositiveEnergy(from.min(to)).into());
                        }
                        None
                    }
                    ScanParam::Ratio => {
                        if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) {
                            return Err(validation(format!(
                                "ratio bounds must lie in [0, 1] (got {from}, {to})"
                            )));
                        }
                        Some(check_energy(physics.energy)?)
                    }
                };
                let format = table_format(output.format)?;
                let scan = ScanSpec {
                    param,
                    from,
                    to,
                    steps,
                };
                Ok(RunConfig::Scan {
                    potential,
                    energy,
                    scan,
                    output: output.output,
                    format,
                })
            }
            CommandArgs::Verify {
                cases,
                rng_seed,
                format,
            } => {
                if cases == 0 {
                    return Err(validation("--cases must be at least 1"));
                }
                if format == Format::Csv {
                    return Err(validation("verify reports as text or json"));
                }
                Ok(RunConfig::Verify {
                    cases,
                    seed: rng_seed,
                    format,
                })
            }
            CommandArgs::Packet {
                physics,
                sigma,
                n_quad,
                t_min,
                t_max,
                n_t,
                output,
            } => {
                let potential = check_potential(&physics)?;
                let energy = check_energy(physics.energy)?;
                let mut spec = PacketSpec::new(energy, sigma.unwrap_or(0.02 * energy.sqrt()));
                spec.n_quad = n_quad;
                if let (Some(t_min), Some(t_max), Some(n_t)) = (t_min, t_max, n_t) {
                    spec.t_scan = Some(TimeScan { t_min, t_max, n_t });
                }
                // only the cheap checks here; the zone check happens at dispatch
                if !(spec.sigma_eps > 0.0) || !spec.sigma_eps.is_finite() {
                    return Err(Error::InvalidPacket(format!(
                        "sigma must be positive (got {})",
                        spec.sigma_eps
                    ))
                    .into());
                }
                Ok(RunConfig::Packet {
                    potential,
                    spec,
                    output,
                })
            }
        }
    }
}

fn table_format(f: Format) -> Result<Format, CliError> {
    match f {
        Format::Text => Err(validation("tables are written as csv or json")),
        other => Ok(other),
    }
}

fn pair(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct SolveRecord {
    v1: f64,
    v2: f64,
    v3: f64,
    energy: f64,
    zone: &'static str,
    r: [f64; 2],
    t: [f64; 2],
    r_tilde: [f64; 2],
    t_tilde: [f64; 2],
    #[serde(rename = "R")]
    big_r: f64,
    #[serde(rename = "T")]
    big_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    tau_r: Option<f64>,
    tau_t: Option<f64>,
    ill_conditioned: bool,
    delay_available: bool,
}

fn solve_record(
    potential: &StepPotential,
    energy: f64,
    phase_step: f64,
) -> Result<SolveRecord, CliError> {
    let sol = solve_step(potential, energy)?;
    let (theta_n, theta_d, theta) = match phase_data(&sol) {
        PhaseData::Partial { theta_n, theta_d } => (Some(theta_n), Some(theta_d), None),
        PhaseData::Total { theta, .. } => (None, None, Some(theta)),
    };
    let delays = match delay_times(potential, energy, phase_step) {
        Ok(d) => Some(d),
        Err(err) => {
            log::warn!("delay times unavailable: {err}");
            None
        }
    };
    Ok(SolveRecord {
        v1: potential.v1,
        v2: potential.v2,
        v3: potential.v3,
        energy,
        zone: sol.zone.as_str(),
        r: pair(sol.r),
        t: pair(sol.t),
        r_tilde: pair(sol.r_tilde),
        t_tilde: pair(sol.t_tilde),
        big_r: sol.reflectance,
        big_t: sol.transmittance,
        theta_n,
        theta_d,
        theta,
        tau_r: delays.map(|d| d.tau_r),
        tau_t: delays.and_then(|d| d.tau_t),
        ill_conditioned: sol.is_ill_conditioned() || delays.is_some_and(|d| d.ill_conditioned),
        delay_available: delays.is_some(),
    })
}

#[derive(Serialize)]
struct ScanRow {
    value: f64,
    #[serde(rename = "R")]
    big_r: f64,
    #[serde(rename = "T")]
    big_t: f64,
    tau_r: f64,
    tau_t: f64,
}

/// The potential for `|W|/V0 = ratio`, keeping `V0` and the direction of `W`.
pub fn potential_at_ratio(base: &StepPotential, ratio: f64) -> Result<StepPotential, Error> {
    let v0 = base.v0();
    let w = base.w();
    let dir = if w.norm() > 0.0 {
        w / w.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let new_w = dir * (ratio * v0);
    let v1 = (1.0 - ratio * ratio).max(0.0).sqrt() * v0;
    StepPotential::new(v1, new_w.re, -new_w.im)
}

fn scan_row(
    potential: &StepPotential,
    energy: Option<f64>,
    param: ScanParam,
    value: f64,
) -> ScanRow {
    let (pot, e) = match param {
        ScanParam::Energy => (Ok(*potential), value),
        ScanParam::Ratio => (
            potential_at_ratio(potential, value),
            energy.expect("validated"),
        ),
    };
    let nan = ScanRow {
        value,
        big_r: f64::NAN,
        big_t: f64::NAN,
        tau_r: f64::NAN,
        tau_t: f64::NAN,
    };
    let Ok(pot) = pot else { return nan };
    let sol = match solve_step(&pot, e) {
        Ok(sol) => sol,
        Err(err) => {
            log::warn!("scan value {value}: {err}");
            return nan;
        }
    };
    let (tau_r, tau_t) = match delay_times(&pot, e, DEFAULT_PHASE_STEP) {
        Ok(d) => (d.tau_r, d.tau_t.unwrap_or(f64::NAN)),
        Err(err) => {
            log::info!("scan value {value}: no delay times ({err})");
            (f64::NAN, f64::NAN)
        }
    };
    ScanRow {
        value,
        big_r: sol.reflectance,
        big_t: sol.transmittance,
        tau_r,
        tau_t,
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_line(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| fmt17(v)).collect();
    cells.join(",")
}

pub fn field_csv(samples: &[WaveSample]) -> String {
    let mut out = String::from("x,phi0,phi1,phi2,phi3,rho,j\n");
    for s in samples {
        out.push_str(&csv_line(&[
            s.x, s.phi0, s.phi1, s.phi2, s.phi3, s.rho, s.j,
        ]));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    phi0: f64,
    phi1: f64,
    phi2: f64,
    phi3: f64,
    rho: f64,
    j: f64,
}

fn write_output(path: Option<&Path>, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let output_err = |path: &Path, source| CliError::Output {
        path: path.display().to_string(),
        source,
    };
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| output_err(path, e))?;
            let mut w = BufWriter::new(file);
            w.write_all(body.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| output_err(path, e))
        }
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Output {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain records serialize");
    s.push('\n');
    s
}

/// Runs a validated command, writing reports to `stdout`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match config {
        RunConfig::Solve {
            potential,
            energy,
            phase_step,
        } => {
            let record = solve_record(potential, *energy, *phase_step)?;
            write_output(None, &to_json(&record), stdout)
        }
        RunConfig::Field {
            potential,
            energy,
            grid,
            output,
            format,
        } => {
            let sol = solve_step(potential, *energy)?;
            let samples = sample_grid(&sol, grid.x_min, grid.x_max, grid.n)?;
            let body = match format {
                Format::Json => {
                    let rows: Vec<FieldRow> = samples
                        .iter()
                        .map(|s| FieldRow {
                            x: s.x,
                            phi0: s.phi0,
                            phi1: s.phi1,
                            phi2: s.phi2,
                            phi3: s.phi3,
                            rho: s.rho,
                            j: s.j,
                        })
                        .collect();
                    to_json(&rows)
                }
                _ => field_csv(&samples),
            };
            log::info!("field: zone {}, {} samples", sol.zone, samples.len());
            write_output(output.as_deref(), &body, stdout)
        }
        RunConfig::Scan {
            potential,
            energy,
            scan,
            output,
            format,
        } => {
            let rows: Vec<ScanRow> = scan
                .values()
                .par_iter()
                .map(|&v| scan_row(potential, *energy, scan.param, v))
                .collect();
            let body = match format {
                Format::Json => to_json(&rows),
                _ => {
                    let mut out = String::from("value,R,T,tau_r,tau_t\n");
                    for r in &rows {
                        out.push_str(&csv_line(&[r.value, r.big_r, r.big_t, r.tau_r, r.tau_t]));
                        out.push('\n');
                    }
                    out
                }
            };
            write_output(output.as_deref(), &body, stdout)
        }
        RunConfig::Verify {
            cases,
            seed,
            format,
        } => {
            let report = verify_suite(*seed, *cases)?;
            let failed = report.properties.iter().filter(|p| !p.passed()).count();
            let body = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Prop<'a> {
                        name: &'a str,
                        passed: bool,
                        checked: usize,
                        failures: usize,
                        worst: f64,
                        tolerance: &'a str,
                    }
                    let props: Vec<Prop> = report
                        .properties
                        .iter()
                        .map(|p| Prop {
                            name: p.name,
                            passed: p.passed(),
                            checked: p.checked,
                            failures: p.failures,
                            worst: p.worst,
                            tolerance: &p.tolerance,
                        })
                        .collect();
                    to_json(&serde_json::json!({
                        "cases": report.cases,
                        "rng_seed": report.seed,
                        "passed": failed == 0,
                        "properties": props,
                    }))
                }
                _ => {
                    let mut out = format!(
                        "qstep verify: {} cases, rng seed {}\n",
                        report.cases, report.seed
                    );
                    for p in &report.properties {
                        out.push_str(&format!(
                            "{} {}: {} checked, {} failed, worst {:.3e} (tolerance {})\n",
                            if p.passed() { "PASS" } else { "FAIL" },
                            p.name,
                            p.checked,
                            p.failures,
                            p.worst,
                            p.tolerance
                        ));
                    }
                    if failed == 0 {
                        out.push_str("all properties passed\n");
                    } else {
                        out.push_str(&format!(
                            "{failed} of {} properties failed\n",
                            report.properties.len()
                        ));
                    }
                    out
                }
            };
            write_output(None, &body, stdout)?;
            if failed > 0 {
                return Err(CliError::VerifyFailed(failed, report.properties.len()));
            }
            Ok(())
        }
        RunConfig::Packet {
            potential,
            spec,
            output,
        } => {
            let zone = spec.validate(potential)?;
            let predicted = delay_times(potential, spec.e0, DEFAULT_PHASE_STEP)?;
            let measured = packet_arrival(potential, spec)?;
            if let Some(path) = output {
                let series = reflected_series(potential, spec)?;
                let mut body = String::from("t,abs_psi_refl\n");
                for (t, a) in series {
                    body.push_str(&csv_line(&[t, a]));
                    body.push('\n');
                }
                write_output(Some(path), &body, stdout)?;
            }
            let summary = serde_json::json!({
                "zone": zone.as_str(),
                "energy": spec.e0,
                "sigma_eps": spec.sigma_eps,
                "n_quad": spec.n_quad,
                "tau_r_measured": measured.tau_r,
                "tau_t_measured": measured.tau_t,
                "tau_r_predicted": predicted.tau_r,
                "tau_t_predicted": predicted.tau_t,
            });
            write_output(None, &to_json(&summary), stdout)
        }
    }
}

/// Parses nothing; validates `cli` and runs it. Returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let result = RunConfig::from_args(cli.command).and_then(|config| execute(&config, stdout));
    match result {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "qstep: {err}");
            err.exit_code()
        }
    }
}
