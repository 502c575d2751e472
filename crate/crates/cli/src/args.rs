use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::format::Precision;

#[derive(Debug, Parser)]
#[command(
    name = "pullin-dyn",
    version,
    about = "Pull-in, regimes and dynamics of electrostatic parallel-plate actuators",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file supplying defaults for any flag of the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Significant digits of emitted numbers (1-17) or `full`.
    #[arg(long, global = true, value_parser = parse_precision)]
    pub precision: Option<Precision>,

    /// Write a JSON run record (inputs, version, config hash, wall time) here.
    #[arg(long, global = true, value_name = "PATH")]
    pub record: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: crate::error::CliError| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pull-in voltage and position.
    Pullin(PullinArgs),
    /// Classify the response as periodic, critical or touchdown.
    Classify(ModelArgs),
    /// Integrate the equation of motion and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Stagnation time and period by quadrature and/or integration.
    Period(PeriodArgs),
    /// Tabulate static quantities and time scales over a parameter grid.
    Sweep(SweepArgs),
    /// Check the touch-down theorem for a generic damped forced model.
    Generic(GenericArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pullin(_) => "pullin",
            Command::Classify(_) => "classify",
            Command::Simulate(_) => "simulate",
            Command::Period(_) => "period",
            Command::Sweep(_) => "sweep",
            Command::Generic(_) => "generic",
        }
    }
}

/// Model parameters, either normalized or in SI units.
#[derive(Debug, Clone, Default, Args, serde::Serialize)]
pub struct ModelArgs {
    /// Normalized coating thickness d0 / (gap eps_r).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Normalized voltage.
    #[arg(long)]
    pub v: Option<f64>,
    /// Normalized cubic stiffness.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Normalized damping.
    #[arg(long)]
    pub mu: Option<f64>,

    /// Electrode mass (kg).
    #[arg(long, help_heading = "Physical units")]
    pub mass: Option<f64>,
    /// Linear spring constant (N/m).
    #[arg(long, help_heading = "Physical units")]
    pub spring_k: Option<f64>,
    /// Cubic spring constant (N/m^3).
    #[arg(long, help_heading = "Physical units")]
    pub spring_k3: Option<f64>,
    /// Electrode area (m^2).
    #[arg(long, help_heading = "Physical units")]
    pub area: Option<f64>,
    /// Vacuum permittivity (F/m).
    #[arg(long, help_heading = "Physical units")]
    pub eps0: Option<f64>,
    /// Relative permittivity of the coating.
    #[arg(long, help_heading = "Physical units")]
    pub eps_r: Option<f64>,
    /// Coating thickness (m).
    #[arg(long, help_heading = "Physical units")]
    pub d0: Option<f64>,
    /// Air gap (m).
    #[arg(long, help_heading = "Physical units")]
    pub gap: Option<f64>,
    /// Applied voltage (V).
    #[arg(long, help_heading = "Physical units")]
    pub voltage: Option<f64>,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct PullinArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also report derivatives with respect to kappa.
    #[arg(long)]
    pub sensitivity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
pub enum SchemeArg {
    Symplectic,
    Adaptive,
}

/// Integrator settings; unset values keep the library defaults.
#[derive(Debug, Clone, Default, Args, serde::Serialize)]
pub struct IntegratorArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Fixed step of the symplectic scheme.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Relative tolerance of the adaptive scheme.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive scheme.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Contact is declared this far below x = 1.
    #[arg(long)]
    pub contact_epsilon: Option<f64>,
    /// Event-time tolerance.
    #[arg(long)]
    pub event_tol: Option<f64>,
    /// Keep every n-th step in the output.
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Fail if the undamped energy drift exceeds this bound.
    #[arg(long)]
    pub max_energy_drift: Option<f64>,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
pub enum PeriodMethod {
    Quad,
    Ode,
    Both,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Quadrature, integration or both.
    #[arg(long, value_enum, default_value = "both")]
    pub method: PeriodMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct SweepArgs {
    /// Coating thickness: a value or `start:end:steps`.
    #[arg(long, default_value = "0")]
    pub xi: String,
    /// Cubic stiffness: a value or `start:end:steps`.
    #[arg(long, default_value = "0")]
    pub kappa: String,
    /// Voltage: a value or `start:end:steps` (alternative to --v-min/--v-max/--v-steps).
    #[arg(long, conflicts_with_all = ["v_min", "v_max", "v_steps"])]
    pub v: Option<String>,
    /// Lower end of the voltage axis.
    #[arg(long)]
    pub v_min: Option<f64>,
    /// Upper end of the voltage axis.
    #[arg(long)]
    pub v_max: Option<f64>,
    /// Number of voltage samples (at least 2).
    #[arg(long)]
    pub v_steps: Option<usize>,
    /// Comma-separated columns from x_s,t_p,t_c,regime,v_dpi,x_dpi.
    #[arg(long, default_value = "x_s,t_p,t_c,regime,v_dpi,x_dpi")]
    pub columns: String,
    /// Output table format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct GenericArgs {
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Touch-down position.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Claimed upper bound on |f|.
    #[arg(long)]
    pub c1: f64,
    /// Claimed lower bound on g.
    #[arg(long)]
    pub c2: f64,
    /// f(x, t): zero, linear[:k], const:c, or sin:amp:omega.
    #[arg(long, default_value = "linear")]
    pub f: String,
    /// g(x, t): coulomb[:c] for c / (a - x)^2 (default c = 1/2), or const:c.
    #[arg(long, default_value = "coulomb")]
    pub g: String,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}
