use std::io::Write;

use pullin_dyn::analysis::{self, Regime};
use pullin_dyn::dynamics::{integrate, EventKind, IntegratorConfig};
use pullin_dyn::model::ModelParams;
use pullin_dyn::quadrature;
use pullin_dyn::Error;
use serde_json::{json, Map, Value};

use super::{emit_json, Context};
use crate::args::{PeriodArgs, PeriodMethod};
use crate::error::CliError;

/// Horizon for the integrated period when no quadrature estimate is at hand.
const ODE_HORIZON: f64 = 1000.0;

struct OdePeriod {
    t_s: f64,
    t_p: f64,
    x_s: f64,
    energy_drift: Option<f64>,
}

fn ode_period(m: &ModelParams, cfg: IntegratorConfig) -> Result<OdePeriod, CliError> {
    let cfg = IntegratorConfig { stop_after_return: true, sample_every: usize::MAX, ..cfg };
    let tr = integrate(m, &cfg)?;
    let stag = tr.first_event(EventKind::Stagnation);
    let ret = tr.first_event(EventKind::ReturnToOrigin);
    match (stag, ret) {
        (Some(s), Some(r)) => Ok(OdePeriod { t_s: s.t, t_p: r.t, x_s: s.x, energy_drift: tr.energy_drift }),
        _ => Err(Error::IntegratorFailure(format!("no return to the origin before t = {}", cfg.t_max)).into()),
    }
}

fn require_periodic(m: &ModelParams) -> Result<(), CliError> {
    let class = analysis::classify_regime(m)?;
    match class.regime {
        Regime::Periodic { .. } => Ok(()),
        Regime::TouchDown { below_pull_in: false, .. } | Regime::Critical { .. } => {
            Err(Error::Supercritical { v: m.v, v_dpi: class.threshold.v_dpi }.into())
        }
        other => Err(Error::RegimeMismatch { expected: "periodic".into(), found: other.name().into() }.into()),
    }
}

pub fn period(args: &PeriodArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ctx.report_precision()?;
    let m = args.model.resolve(true)?.params;
    if m.mu != 0.0 {
        return Err(CliError::Usage("period requires an undamped model (mu = 0)".into()));
    }
    require_periodic(&m)?;

    let mut obj = Map::new();
    obj.insert("xi".into(), p.json(m.xi));
    obj.insert("v".into(), p.json(m.v));
    obj.insert("kappa".into(), p.json(m.kappa));

    let quad = match args.method {
        PeriodMethod::Quad | PeriodMethod::Both => Some(quadrature::period_by_quadrature(&m)?),
        PeriodMethod::Ode => None,
    };
    if let Some(q) = &quad {
        obj.insert(
            "quad".into(),
            json!({
                "t_s": p.json(q.t_s),
                "t_p": p.json(q.t_p),
                "t1_bound": p.json_opt(q.t1_bound),
                "ts_bound": p.json_opt(q.ts_bound),
                "error_estimate": p.json(q.quad_error),
            }),
        );
    }

    if args.method != PeriodMethod::Quad {
        let horizon = quad.as_ref().map_or(ODE_HORIZON, |q| 1.5 * q.t_p);
        let cfg = args.integrator.config(IntegratorConfig { t_max: horizon, ..Default::default() })?;
        let ode = ode_period(&m, cfg)?;
        obj.insert(
            "ode".into(),
            json!({
                "t_s": p.json(ode.t_s),
                "t_p": p.json(ode.t_p),
                "x_s": p.json(ode.x_s),
                "energy_drift": p.json_opt(ode.energy_drift),
            }),
        );
        if let Some(q) = &quad {
            obj.insert("discrepancy".into(), p.json(((ode.t_p - q.t_p) / q.t_p).abs()));
        }
    }
    emit_json(out, &Value::Object(obj))
}
