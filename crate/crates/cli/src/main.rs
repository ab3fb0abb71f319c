//! Command-line front end: gate amplitudes, the full CS report, the
//! reflectivity solver, landscape sweeps, plate angles, the composite
//! splitter, and the self-verification table, all as deterministic JSON/CSV
//! reports.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use linoptics::analysis::{magic_reflectivities, sweep, sweep_to_csv, SweepRow};
use linoptics::elements::composite_pol_bs;
use linoptics::fock::{FockState, ModeRegistry, Occupation, QubitAmplitudes};
use linoptics::gates::{cs_gate, ns_closed_form, ns_gate, NsConfig};
use linoptics::numfmt::to_json_string;
use linoptics::verify;

#[derive(Parser)]
#[command(
    name = "linoptics",
    version,
    about = "Polarization-encoded linear-optics gate simulator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nonlinear sign-shift gate on the basis state with m vertical and n
    /// horizontal photons: closed form next to the simulated amplitude.
    Ns {
        /// Vertical photon count of the input state.
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Horizontal photon count of the input state.
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[command(flatten)]
        refl: ReflArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conditional-sign gate: full report with intermediate states, output
    /// amplitudes, success probability, and the gate diagonal.
    Cs {
        /// Amplitude of |00>.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Amplitude of |01>.
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        /// Amplitude of |10>.
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        /// Amplitude of |11>.
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        #[command(flatten)]
        refl: ReflArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve for the reflectivities that make the gate diagonal uniform.
    Solve {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fidelity and success-probability landscape over the reflectivity
    /// square, on a uniform grid.
    Sweep {
        /// Grid points per axis over [0, 1].
        #[arg(long = "grid-steps", default_value_t = 21)]
        grid_steps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wave-plate angles realizing the given reflectivities.
    Angles {
        #[command(flatten)]
        refl: ReflArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The composite polarization-sensitive splitter at given plate angles
    /// and arm phase, compared against the ideal splitter.
    CompositeBs {
        /// V-arm plate angle in degrees.
        #[arg(long = "alpha-deg")]
        alpha_deg: f64,
        /// H-arm plate angle in degrees.
        #[arg(long = "beta-deg")]
        beta_deg: f64,
        /// Arm phase in radians (0 = aligned).
        #[arg(long = "phi-rad", default_value_t = 0.0)]
        phi_rad: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full verification suite and print a pass/fail table.
    Verify {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ReflArgs {
    /// Reflection probability for vertical polarization.
    #[arg(long = "r-v", conflicts_with = "magic")]
    r_v: Option<f64>,
    /// Reflection probability for horizontal polarization.
    #[arg(long = "r-h", conflicts_with = "magic")]
    r_h: Option<f64>,
    /// Use the solved working-point reflectivities.
    #[arg(long)]
    magic: bool,
}

impl ReflArgs {
    /// Defaults to the balanced splitter (1/2, 1/2) when nothing is given.
    fn resolve(&self) -> (f64, f64) {
        if self.magic {
            magic_reflectivities()
        } else {
            (self.r_v.unwrap_or(0.5), self.r_h.unwrap_or(0.5))
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Report format; CSV is supported by `sweep` only.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Validation failures exit 2, internal failures exit 1.
enum CliError {
    Validation(String),
    Internal(String),
}

impl From<linoptics::Error> for CliError {
    fn from(e: linoptics::Error) -> Self {
        match e {
            linoptics::Error::OutOfRange { .. } => CliError::Validation(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ns { m, n, refl, output } => {
            reject_csv(&output)?;
            let (r_v, r_h) = refl.resolve();
            let cfg = NsConfig::new(r_v, r_h)?;
            let registry = ModeRegistry::polarized(["C"])?;
            let input = FockState::basis(registry, [m, n])?;
            let outcome = ns_gate(&input, &cfg)?;
            let simulated = outcome.state.amplitude(&Occupation::from([m, n]));
            let closed = ns_closed_form(m, n, &cfg);
            let report = json!({
                "m": m,
                "n": n,
                "r_v": r_v,
                "r_h": r_h,
                "closed_form": complex_json(closed),
                "simulated": complex_json(simulated),
                "success_probability": outcome.success_probability,
            });
            emit(&output, to_json_string(&report))
        }
        Command::Cs { a, b, c, d, refl, output } => {
            reject_csv(&output)?;
            let (r_v, r_h) = refl.resolve();
            let cfg = NsConfig::new(r_v, r_h)?;
            let input = QubitAmplitudes::new(a, b, c, d);
            let report = cs_gate(&input, &cfg)?;
            emit(&output, to_json_string(&report.to_json_value()))
        }
        Command::Solve { output } => {
            reject_csv(&output)?;
            let (r_v, r_h) = linoptics::solve_magic_reflectivities(1e-12)?;
            let (res1, res2) = linoptics::equality_residuals(r_v, r_h);
            let report = json!({
                "r_v": r_v,
                "r_h": r_h,
                "residuals": [res1, res2],
            });
            emit(&output, to_json_string(&report))
        }
        Command::Sweep { grid_steps, output } => {
            if grid_steps < 2 {
                return Err(CliError::Validation(
                    "--grid-steps must be at least 2".to_string(),
                ));
            }
            let mut grid = Vec::with_capacity(grid_steps * grid_steps);
            for i in 0..grid_steps {
                for j in 0..grid_steps {
                    grid.push((
                        i as f64 / (grid_steps - 1) as f64,
                        j as f64 / (grid_steps - 1) as f64,
                    ));
                }
            }
            let rows = sweep(&grid)?;
            let text = match output.format {
                Format::Csv => sweep_to_csv(&rows),
                Format::Json => to_json_string(&json!({
                    "rows": rows.iter().map(sweep_row_json).collect::<Vec<Value>>(),
                })),
            };
            emit(&output, text)
        }
        Command::Angles { refl, output } => {
            reject_csv(&output)?;
            let (r_v, r_h) = refl.resolve();
            let (alpha, beta) = linoptics::reflectivity_to_angles(r_v, r_h)?;
            let report = json!({
                "r_v": r_v,
                "r_h": r_h,
                "alpha_deg": alpha.to_degrees(),
                "beta_deg": beta.to_degrees(),
            });
            emit(&output, to_json_string(&report))
        }
        Command::CompositeBs { alpha_deg, beta_deg, phi_rad, output } => {
            reject_csv(&output)?;
            let (alpha, beta) = (alpha_deg.to_radians(), beta_deg.to_radians());
            let registry = ModeRegistry::polarized(["1", "2"])?;
            let transform = composite_pol_bs(&registry, alpha, beta, phi_rad, "1", "2")?;
            let deviation =
                linoptics::analysis::composite_deviation_from_ideal(alpha, beta, phi_rad)?;
            let matrix: Vec<Value> = (0..registry.len())
                .map(|row| {
                    Value::Array(
                        (0..registry.len())
                            .map(|col| complex_json(transform.entry(row, col)))
                            .collect(),
                    )
                })
                .collect();
            let report = json!({
                "alpha_deg": alpha_deg,
                "beta_deg": beta_deg,
                "phi_rad": phi_rad,
                "r_v": alpha.cos().powi(2),
                "r_h": beta.cos().powi(2),
                "deviation_from_ideal": deviation,
                "modes": registry
                    .modes()
                    .iter()
                    .map(|m| Value::String(m.to_string()))
                    .collect::<Vec<Value>>(),
                "matrix": matrix,
            });
            emit(&output, to_json_string(&report))
        }
        Command::Verify { output } => {
            reject_csv(&output)?;
            let reports = verify::run_all();
            let mut table = String::new();
            for r in &reports {
                table.push_str(&r.line());
                table.push('\n');
            }
            let passed = verify::all_passed(&reports);
            table.push_str(&format!(
                "{}: {} of {} criteria passed\n",
                if passed { "OK" } else { "FAILED" },
                reports.iter().filter(|r| r.passed).count(),
                reports.len()
            ));
            emit(&output, table)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Internal("verification criteria failed".to_string()))
            }
        }
    }
}

fn complex_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn sweep_row_json(row: &SweepRow) -> Value {
    json!({
        "r_v": row.r_v,
        "r_h": row.r_h,
        "amp00_re": row.amps[0].re,
        "amp00_im": row.amps[0].im,
        "amp01_re": row.amps[1].re,
        "amp01_im": row.amps[1].im,
        "amp10_re": row.amps[2].re,
        "amp10_im": row.amps[2].im,
        "amp11_re": row.amps[3].re,
        "amp11_im": row.amps[3].im,
        "success_prob": row.success_probability,
        "fidelity": row.process_fidelity,
    })
}

fn reject_csv(output: &OutputArgs) -> Result<(), CliError> {
    if output.format == Format::Csv {
        return Err(CliError::Validation(
            "--format csv is only supported by `sweep`".to_string(),
        ));
    }
    Ok(())
}

fn emit(output: &OutputArgs, mut text: String) -> Result<(), CliError> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
