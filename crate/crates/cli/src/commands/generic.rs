use std::io::Write;

use pullin_dyn::dynamics::{integrate_generic, GenericForcedModel, IntegratorConfig, Termination};
use serde_json::json;

use super::{emit_json, Context};
use crate::args::GenericArgs;
use crate::error::CliError;

type Field = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

fn numbers(spec: &str, parts: &[&str]) -> Result<Vec<f64>, CliError> {
    parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad number `{s}` in `{spec}`")))
        })
        .collect()
}

/// `zero`, `linear[:k]`, `const:c` or `sin:amp:omega`.
pub fn parse_f(spec: &str) -> Result<Field, CliError> {
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let n = numbers(spec, &rest)?;
    Ok(match (kind, n.as_slice()) {
        ("zero", []) => Box::new(|_, _| 0.0),
        ("linear", []) => Box::new(|x, _| x),
        ("linear", &[k]) => Box::new(move |x, _| k * x),
        ("const", &[c]) => Box::new(move |_, _| c),
        ("sin", &[amp, omega]) => Box::new(move |_, t| amp * (omega * t).sin()),
        _ => return Err(CliError::Usage(format!("unknown f specification `{spec}`"))),
    })
}

/// `coulomb[:c]` for `c / (a - x)^2` (default `c = 1/2`) or `const:c`.
pub fn parse_g(spec: &str, a: f64) -> Result<Field, CliError> {
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let n = numbers(spec, &rest)?;
    let coulomb = |c: f64| -> Field { Box::new(move |x, _| c / ((a - x) * (a - x))) };
    Ok(match (kind, n.as_slice()) {
        ("coulomb", []) => coulomb(0.5),
        ("coulomb", &[c]) => coulomb(c),
        ("const", &[c]) => Box::new(move |_, _| c),
        _ => return Err(CliError::Usage(format!("unknown g specification `{spec}`"))),
    })
}

pub fn generic(args: &GenericArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<(), CliError> {
    let p = ctx.report_precision()?;
    let f = parse_f(&args.f)?;
    let g = parse_g(&args.g, args.a)?;
    let gm = GenericForcedModel::new(args.mu, args.lambda, args.a, args.c1, args.c2, f, g);
    let cfg = args.integrator.config(IntegratorConfig::adaptive())?;
    let (traj, rep) = integrate_generic(&gm, &cfg)?;
    let ended = match traj.terminated_by {
        Termination::Horizon => "horizon",
        Termination::Event(k) => k.name(),
    };
    let obj = json!({
        "guaranteed": rep.guaranteed,
        "classification": if rep.guaranteed { "guaranteed" } else { "no-guarantee" },
        "margin": p.json(gm.margin()),
        "t_c": p.json_opt(rep.t_c),
        "t_c_bound": p.json_opt(rep.t_c_bound),
        "velocity_positive": rep.velocity_positive,
        "lower_bound_holds": rep.lower_bound_holds,
        "min_lower_bound_slack": p.json(rep.min_lower_bound_slack),
        "confirmed": rep.confirmed(),
        "terminated_by": ended,
    });
    emit_json(out, &obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs() {
        assert_eq!(parse_f("linear").unwrap()(0.3, 1.0), 0.3);
        assert_eq!(parse_f("linear:2").unwrap()(0.3, 1.0), 0.6);
        assert_eq!(parse_f("zero").unwrap()(0.3, 1.0), 0.0);
        assert_eq!(parse_f("const:-1.5").unwrap()(0.3, 1.0), -1.5);
        assert!((parse_f("sin:2:3").unwrap()(0.0, 0.5) - 2.0 * 1.5f64.sin()).abs() < 1e-15);
        assert_eq!(parse_g("coulomb", 1.0).unwrap()(0.5, 0.0), 2.0);
        assert_eq!(parse_g("coulomb:1", 2.0).unwrap()(1.0, 0.0), 1.0);
        assert_eq!(parse_g("const:3", 1.0).unwrap()(0.5, 0.0), 3.0);
        for bad in ["quadratic", "linear:x", "sin:1", "const"] {
            assert!(parse_f(bad).is_err(), "{bad}");
        }
        assert!(parse_g("coulomb:nan", 1.0).is_err());
    }
}
