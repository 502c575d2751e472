mod generic;
mod period;
mod pullin;
mod simulate;
mod sweep;

use std::io::Write;
use std::path::Path;

use pullin_dyn::dynamics::{IntegratorConfig, Scheme};
use pullin_dyn::model::{self, ModelParams, PhysicalParams, VACUUM_PERMITTIVITY};
use serde_json::Value;

use crate::args::{Command, IntegratorArgs, ModelArgs, SchemeArg};
use crate::error::CliError;
use crate::format::{self, Precision, TABLE_DIGITS};

/// Output settings shared by all commands.
pub struct Context<'a> {
    pub precision_flag: Option<Precision>,
    pub env_precision: Option<&'a str>,
}

impl Context<'_> {
    /// Precision for JSON reports: full round-trip unless overridden.
    pub fn report_precision(&self) -> Result<Precision, CliError> {
        format::resolve(self.precision_flag, self.env_precision, Precision::Full)
    }

    /// Precision for tables and trajectories.
    pub fn table_precision(&self) -> Result<Precision, CliError> {
        format::resolve(self.precision_flag, self.env_precision, Precision::Digits(TABLE_DIGITS))
    }
}

pub fn execute(command: &Command, ctx: &Context<'_>, out: &mut dyn Write) -> Result<Option<String>, CliError> {
    match command {
        Command::Pullin(a) => pullin::pullin(a, ctx, out).map(|_| None),
        Command::Classify(a) => pullin::classify(a, ctx, out).map(|_| None),
        Command::Simulate(a) => simulate::simulate(a, ctx, out),
        Command::Period(a) => period::period(a, ctx, out).map(|_| None),
        Command::Sweep(a) => sweep::sweep(a, ctx, out),
        Command::Generic(a) => generic::generic(a, ctx, out).map(|_| None),
    }
}

/// Normalized model parameters from either flag family.
pub(crate) struct ResolvedModel {
    pub params: ModelParams,
    pub physical: Option<PhysicalParams>,
}

impl ModelArgs {
    fn has_physical(&self) -> bool {
        [self.mass, self.spring_k, self.spring_k3, self.area, self.eps0, self.eps_r, self.d0, self.gap, self.voltage]
            .iter()
            .any(Option::is_some)
    }

    pub(crate) fn resolve(&self, need_voltage: bool) -> Result<ResolvedModel, CliError> {
        let mu = self.mu.unwrap_or(0.0);
        if self.has_physical() {
            if self.xi.is_some() || self.v.is_some() || self.kappa.is_some() {
                return Err(CliError::Usage("physical-unit flags cannot be combined with --xi, --v or --kappa".into()));
            }
            let need = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| CliError::Usage(format!("--{name} is required with physical-unit flags")))
            };
            let p = PhysicalParams {
                mass: need("mass", self.mass)?,
                spring_k: need("spring-k", self.spring_k)?,
                spring_k3: self.spring_k3.unwrap_or(0.0),
                area: need("area", self.area)?,
                eps0: self.eps0.unwrap_or(VACUUM_PERMITTIVITY),
                eps_r: need("eps-r", self.eps_r)?,
                d0: need("d0", self.d0)?,
                gap: need("gap", self.gap)?,
                voltage: if need_voltage { need("voltage", self.voltage)? } else { self.voltage.unwrap_or(0.0) },
            };
            let params = model::normalize_physical(&p)?.with_damping(mu);
            params.validate()?;
            return Ok(ResolvedModel { params, physical: Some(p) });
        }
        let v = match (self.v, need_voltage) {
            (Some(v), _) => v,
            (None, false) => 0.0,
            (None, true) => return Err(CliError::Usage("--v (or physical-unit flags) is required".into())),
        };
        let params = ModelParams { xi: self.xi.unwrap_or(0.0), v, kappa: self.kappa.unwrap_or(0.0), mu };
        params.validate()?;
        Ok(ResolvedModel { params, physical: None })
    }
}

impl IntegratorArgs {
    pub(crate) fn config(&self, base: IntegratorConfig) -> Result<IntegratorConfig, CliError> {
        let mut cfg = base;
        if let Some(s) = self.scheme {
            cfg.scheme = match s {
                SchemeArg::Symplectic => Scheme::Symplectic,
                SchemeArg::Adaptive => Scheme::Adaptive,
            };
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
            cfg.dt_min = cfg.dt_min.min(v);
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.contact_epsilon {
            cfg.contact_epsilon = v;
        }
        if let Some(v) = self.event_tol {
            cfg.event_refine_tol = v;
        }
        if let Some(v) = self.sample_every {
            cfg.sample_every = v;
        }
        if self.max_energy_drift.is_some() {
            cfg.max_energy_drift = self.max_energy_drift;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Writes a JSON object followed by a newline.
pub(crate) fn emit_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    writeln!(out, "{value}").map_err(|e| CliError::io("cannot write output", e))
}

/// Writes `text` to `path`, or to `out` when no path is given. Returns the
/// path written, if any.
pub(crate) fn emit_text(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<Option<String>, CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(format!("cannot write {}", p.display()), e))?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            out.write_all(text.as_bytes()).map_err(|e| CliError::io("cannot write output", e))?;
            Ok(None)
        }
    }
}
