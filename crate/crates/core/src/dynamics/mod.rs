//! Time-domain integration of the actuator equation of motion.
//!
//! Two schemes are available through [`IntegratorConfig::scheme`]: a
//! fixed-step Störmer–Verlet method (the default, which keeps the energy
//! error bounded over long undamped runs) and an adaptive Dormand–Prince
//! 5(4) method. Both share the same event machinery:
//!
//! * **Stagnation**: the velocity changes sign from positive to
//!   non-positive at `x > 0`.
//! * **ReturnToOrigin**: the velocity changes sign from negative to
//!   non-negative with `|x| <= return_tol`.
//! * **TouchDown**: `x` reaches `1 - contact_epsilon`. The force is never
//!   evaluated at the contact position itself.
//!
//! ```
//! use pullin_dyn::dynamics::{integrate, EventKind, IntegratorConfig};
//! use pullin_dyn::model::ModelParams;
//!
//! let cfg = IntegratorConfig { t_max: 4.0, ..Default::default() };
//! let traj = integrate(&ModelParams::linear(0.0, 0.4), &cfg).unwrap();
//! let stag = traj.first_event(EventKind::Stagnation).unwrap();
//! assert!((stag.x - 0.2).abs() < 1e-8);
//! ```

mod config;
mod critical;
mod driver;
mod generic;
mod hermite;
mod periodicity;
mod system;
mod trajectory;

pub use config::{IntegratorConfig, Scheme};
pub use critical::{integrate_critical, CriticalReport};
pub use generic::{integrate_generic, lower_bound_curve, touchdown_time_bound, GenericForcedModel, GenericReport};
pub use periodicity::{verify_periodicity, PeriodicityReport};
pub use trajectory::{Event, EventKind, Termination, Trajectory};

use crate::error::Result;
use crate::model::{ModelParams, PhaseState};
use driver::DriverOptions;
use system::ActuatorSystem;

/// Integrates from rest at the origin.
pub fn integrate(m: &ModelParams, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate_from(m, cfg, PhaseState::REST)
}

/// Integrates from an arbitrary initial state.
///
/// Non-rest starts are an extension: the first-integral residual is not
/// tracked for them, and negative positions are allowed.
pub fn integrate_from(m: &ModelParams, cfg: &IntegratorConfig, start: PhaseState) -> Result<Trajectory> {
    m.validate()?;
    let rest_start = start.x == 0.0 && start.v == 0.0;
    let sys = ActuatorSystem { params: *m, contact: 1.0, rest_start };
    let opts =
        DriverOptions { epsilon: cfg.contact_epsilon, extrapolate_contact: true, enforce_nonnegative: rest_start };
    driver::run(&sys, cfg, start, &opts, &mut |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis;
    use crate::error::Error;

    fn periodic_cfg(t_max: f64) -> IntegratorConfig {
        IntegratorConfig { t_max, ..Default::default() }
    }

    #[test]
    fn unforced_rest_stays_put() {
        let tr = integrate(&ModelParams::linear(0.0, 0.0), &periodic_cfg(10.0)).unwrap();
        assert_eq!(tr.samples.len(), 2);
        assert!(tr.events.is_empty());
        assert!(tr.samples.iter().all(|s| s.x == 0.0 && s.v == 0.0));
        assert_eq!(tr.terminated_by, Termination::Horizon);
    }

    #[test]
    fn periodic_events_alternate() {
        let m = ModelParams::linear(0.0, 0.4);
        let tr = integrate(&m, &periodic_cfg(12.0)).unwrap();
        let kinds: Vec<_> = tr.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, [EventKind::Stagnation, EventKind::ReturnToOrigin, EventKind::Stagnation]);
        let ts = tr.events[0].t;
        assert!((tr.events[1].t - 2.0 * ts).abs() < 1e-9);
        assert!((tr.events[2].t - 3.0 * ts).abs() < 1e-9);
        assert!((tr.events[0].x - 0.2).abs() < 1e-9);
        assert!(tr.max_return_offset.unwrap() < 1e-9);
        assert!(tr.energy_drift.unwrap() < 1e-8);
        assert!(tr.first_integral_residual.unwrap() < 1e-8);
        assert!(tr.max_x() <= 0.2 + 1e-8);
        assert!(tr.min_x() >= -1e-12);
    }

    #[test]
    fn adaptive_scheme_agrees() {
        let m = ModelParams::cubic(0.2, 0.5, 0.8);
        let xs = analysis::stagnation(&m).unwrap();
        for cfg in [periodic_cfg(8.0), IntegratorConfig { t_max: 8.0, ..IntegratorConfig::adaptive() }] {
            let tr = integrate(&m, &cfg).unwrap();
            let stag = tr.first_event(EventKind::Stagnation).unwrap();
            assert!((stag.x - xs).abs() < 1e-8, "{:?}: {} vs {xs}", cfg.scheme, stag.x);
        }
    }

    #[test]
    fn touchdown_terminates() {
        for cfg in [periodic_cfg(20.0), IntegratorConfig { t_max: 20.0, ..IntegratorConfig::adaptive() }] {
            let tr = integrate(&ModelParams::linear(0.0, 0.6), &cfg).unwrap();
            assert_eq!(tr.terminated_by, Termination::Event(EventKind::TouchDown));
            let tc = tr.touchdown_time().unwrap();
            assert!((tc - 3.445_424_885_747_784).abs() < 1e-6, "{:?}: {tc}", cfg.scheme);
            assert_eq!(tr.last().x, 1.0);
            assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
            assert!(tr.samples[1..].iter().all(|s| s.v > 0.0));
        }
    }

    #[test]
    fn damped_runs_skip_energy_checks() {
        let m = ModelParams::linear(0.0, 0.4).with_damping(0.3);
        let tr = integrate(&m, &periodic_cfg(5.0)).unwrap();
        assert!(tr.energy_drift.is_none());
        assert!(tr.first_integral_residual.is_none());
    }

    #[test]
    fn sampling_thins_output() {
        let m = ModelParams::linear(0.0, 0.4);
        let full = integrate(&m, &periodic_cfg(1.0)).unwrap();
        let thin = integrate(&m, &IntegratorConfig { sample_every: 100, ..periodic_cfg(1.0) }).unwrap();
        assert_eq!(full.samples.len(), 10_001);
        assert_eq!(thin.samples.len(), 101);
        assert_eq!(full.last(), thin.last());
    }

    #[test]
    fn stop_after_return() {
        let m = ModelParams::linear(0.0, 0.4);
        let cfg = IntegratorConfig { stop_after_return: true, ..periodic_cfg(50.0) };
        let tr = integrate(&m, &cfg).unwrap();
        assert_eq!(tr.terminated_by, Termination::Event(EventKind::ReturnToOrigin));
        assert!(tr.last().t < 7.2);
    }

    #[test]
    fn energy_bound_is_enforced() {
        let m = ModelParams::linear(0.0, 0.4);
        let cfg = IntegratorConfig { dt: 0.05, max_energy_drift: Some(1e-12), ..periodic_cfg(5.0) };
        assert!(matches!(integrate(&m, &cfg), Err(Error::IntegratorFailure(_))));
    }

    #[test]
    fn general_initial_state() {
        let m = ModelParams::linear(0.0, 0.0);
        let start = PhaseState::new(0.0, 0.5, 0.0);
        let tr = integrate_from(&m, &periodic_cfg(std::f64::consts::PI), start).unwrap();
        assert!((tr.last().x + 0.5).abs() < 1e-7);
        assert!(tr.first_integral_residual.is_none());
        assert!(integrate_from(&m, &periodic_cfg(1.0), PhaseState::new(0.0, 1.0, 0.0)).is_err());
    }
}
