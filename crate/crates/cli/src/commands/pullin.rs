use std::io::Write;

use pullin_dyn::analysis::{self, Regime};
use pullin_dyn::model::convexity_bound;
use serde_json::{json, Map, Value};

use super::{emit_json, Context};
use crate::args::{ModelArgs, PullinArgs};
use crate::error::CliError;

pub fn pullin(args: &PullinArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ctx.report_precision()?;
    let model = args.model.resolve(false)?;
    let m = model.params;
    let pull = analysis::pullin(m.xi, m.kappa)?;
    let mut obj = Map::new();
    obj.insert("v_dpi".into(), p.json(pull.v_dpi));
    obj.insert("x_dpi".into(), p.json(pull.x_dpi));
    obj.insert("xi".into(), p.json(m.xi));
    obj.insert("kappa".into(), p.json(m.kappa));
    obj.insert("convexity_ok".into(), Value::Bool(true));
    obj.insert("convexity_bound".into(), p.json(convexity_bound(m.xi)));
    if let Some(phys) = model.physical {
        obj.insert("voltage_dpi".into(), p.json(phys.volts_from_normalized(pull.v_dpi)));
        obj.insert("time_scale".into(), p.json(phys.time_scale()));
    }
    if args.sensitivity {
        let s = analysis::pullin_sensitivity(m.xi, m.kappa)?;
        obj.insert("dx0_dkappa".into(), p.json(s.dx0_dkappa));
        obj.insert("dv_dpi_dkappa".into(), p.json(s.dv_dpi_dkappa));
        obj.insert("fd_consistent".into(), Value::Bool(s.fd_consistent));
    }
    emit_json(out, &Value::Object(obj))
}

pub fn classify(args: &ModelArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ctx.report_precision()?;
    let m = args.resolve(true)?.params;
    let class = analysis::classify_regime(&m)?;
    let mut obj = json!({
        "regime": class.regime.name(),
        "xi": p.json(m.xi),
        "v": p.json(m.v),
        "kappa": p.json(m.kappa),
        "v_dpi": p.json(class.threshold.v_dpi),
        "x_dpi": p.json(class.threshold.x_dpi),
    });
    let extra = obj.as_object_mut().expect("literal object");
    match class.regime {
        Regime::Periodic { x_s } => {
            extra.insert("x_s".into(), p.json(x_s));
        }
        Regime::Critical { x_limit } => {
            extra.insert("x_limit".into(), p.json(x_limit));
        }
        Regime::TouchDown { a_sq, tc_upper_bound, below_pull_in } => {
            extra.insert("a_sq".into(), p.json(a_sq));
            extra.insert("tc_bound".into(), p.json(tc_upper_bound));
            extra.insert("below_pull_in".into(), Value::Bool(below_pull_in));
        }
    }
    emit_json(out, &obj)
}
