use std::fmt::Write as _;
use std::io::Write;

use pullin_dyn::analysis::{self, Regime};
use pullin_dyn::dynamics::{integrate, integrate_critical, IntegratorConfig, Termination, Trajectory};
use pullin_dyn::model::{self, PhaseState};

use super::{emit_text, Context};
use crate::args::SimulateArgs;
use crate::error::CliError;
use crate::format::Precision;

pub fn simulate(args: &SimulateArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<Option<String>, CliError> {
    let p = ctx.table_precision()?;
    let m = args.model.resolve(true)?.params;
    let cfg = args.integrator.config(IntegratorConfig::default())?;
    let class = analysis::classify_regime(&m)?;

    let (traj, critical) = match class.regime {
        Regime::Critical { .. } if m.mu == 0.0 => {
            let (t, rep) = integrate_critical(&m, &cfg)?;
            (t, Some(rep))
        }
        _ => (integrate(&m, &cfg)?, None),
    };

    let with_energy = m.mu == 0.0;
    let mut csv = String::new();
    csv.push_str(if with_energy { "t,x,v,H\n" } else { "t,x,v\n" });
    for s in &traj.samples {
        row(&mut csv, s, with_energy.then(|| energy(s, &m)), p);
    }
    footer(&mut csv, &traj, p);
    if let Some(rep) = critical {
        let _ = writeln!(csv, "# critical,x_limit,{}", p.fmt(rep.x_limit));
        let _ = writeln!(csv, "# critical,final_gap,{}", p.fmt(rep.final_gap()));
        let _ = writeln!(csv, "# critical,monotone_approach,{}", rep.monotone_approach());
    }
    emit_text(out, args.output.as_deref(), &csv)
}

/// Energy of a sample, or `None` where it is undefined (contact at the
/// singularity).
fn energy(s: &PhaseState, m: &model::ModelParams) -> Option<f64> {
    model::hamiltonian(s, m).ok()
}

fn row(csv: &mut String, s: &PhaseState, h: Option<Option<f64>>, p: Precision) {
    let _ = write!(csv, "{},{},{}", p.fmt(s.t), p.fmt(s.x), p.fmt(s.v));
    if let Some(h) = h {
        csv.push(',');
        if let Some(h) = h {
            csv.push_str(&p.fmt(h));
        }
    }
    csv.push('\n');
}

fn footer(csv: &mut String, traj: &Trajectory, p: Precision) {
    for e in &traj.events {
        let _ = writeln!(csv, "# event,{},{},{}", e.kind.name(), p.fmt(e.t), p.fmt(e.x));
    }
    let ended = match traj.terminated_by {
        Termination::Horizon => "horizon",
        Termination::Event(k) => k.name(),
    };
    let _ = writeln!(csv, "# terminated_by,{ended}");
    if let Some(d) = traj.energy_drift {
        let _ = writeln!(csv, "# energy_drift,{}", p.fmt(d));
    }
    if let Some(r) = traj.first_integral_residual {
        let _ = writeln!(csv, "# first_integral_residual,{}", p.fmt(r));
    }
}
