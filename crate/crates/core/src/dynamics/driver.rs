use super::config::{IntegratorConfig, Scheme};
use super::hermite::QuinticHermite;
use super::system::ForcedSystem;
use super::trajectory::{Event, EventKind, Termination, Trajectory};
use crate::error::{Error, Result};
use crate::model::PhaseState;

/// Lowest position tolerated before the run is declared broken.
pub(crate) const NEGATIVE_X_TOL: f64 = 1e-12;
/// Fraction of the remaining gap to contact a single step may cover.
const GAP_FRACTION: f64 = 0.01;
/// Relative distance below contact within which an adaptive step underflow
/// is treated as arrival at contact.
const CONTACT_ZONE: f64 = 1e-3;
const DP5_INITIAL_STEP: f64 = 1e-3;

pub(crate) struct DriverOptions {
    /// Contact is declared at `system.contact() - epsilon`.
    pub epsilon: f64,
    /// Extrapolate the contact time over the last `epsilon` and record the
    /// final sample at the contact position.
    pub extrapolate_contact: bool,
    pub enforce_nonnegative: bool,
}

enum Trial {
    Inside {
        x: f64,
        v: f64,
        a: f64,
        err: f64,
    },
    Beyond {
        err: f64,
    },
    /// Step size underflow just below contact while accelerating into it.
    Stalled,
}

/// Compensated running sum for the time variable.
#[derive(Clone, Copy)]
struct Clock {
    t: f64,
    carry: f64,
}

impl Clock {
    fn advance(&mut self, h: f64) {
        let y = h - self.carry;
        let t = self.t + y;
        self.carry = (t - self.t) - y;
        self.t = t;
    }
}

struct Stepper<'a, S: ForcedSystem> {
    sys: &'a S,
    cfg: &'a IntegratorConfig,
    level: f64,
}

impl<S: ForcedSystem> Stepper<'_, S> {
    fn trial(&self, t: f64, x: f64, v: f64, a: f64, h: f64) -> Result<Trial> {
        match self.cfg.scheme {
            Scheme::Symplectic => self.verlet(t, x, v, h),
            Scheme::Adaptive => self.dopri5(t, x, v, a, h),
        }
    }

    fn verlet(&self, t: f64, x: f64, v: f64, h: f64) -> Result<Trial> {
        let damp = (-0.5 * self.sys.damping() * h).exp();
        let v_half = v * damp + 0.5 * h * self.sys.force(t, x)?;
        let x1 = x + h * v_half;
        if !(x1 < self.level) {
            return Ok(Trial::Beyond { err: 0.0 });
        }
        let f1 = self.sys.force(t + h, x1)?;
        let v1 = (v_half + 0.5 * h * f1) * damp;
        Ok(Trial::Inside { x: x1, v: v1, a: f1 - self.sys.damping() * v1, err: 0.0 })
    }

    fn dopri5(&self, t: f64, x: f64, v: f64, a: f64, h: f64) -> Result<Trial> {
        const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        const A: [&[f64]; 6] = [
            &[1.0 / 5.0],
            &[3.0 / 40.0, 9.0 / 40.0],
            &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
            &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
            &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] =
            [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
        let mu = self.sys.damping();
        let mut kx = [0.0; 7];
        let mut kv = [0.0; 7];
        kx[0] = v;
        kv[0] = a;
        for (stage, row) in A.iter().enumerate() {
            let (mut xs, mut vs) = (x, v);
            for (j, coef) in row.iter().enumerate() {
                xs += h * coef * kx[j];
                vs += h * coef * kv[j];
            }
            kx[stage + 1] = vs;
            kv[stage + 1] = self.sys.force(t + C[stage] * h, xs)? - mu * vs;
        }
        // The last stage is evaluated at the proposed endpoint.
        let b = A[5];
        let x1 = x + h * b.iter().zip(&kx).map(|(c, k)| c * k).sum::<f64>();
        let v1 = v + h * b.iter().zip(&kv).map(|(c, k)| c * k).sum::<f64>();
        let ex = h * E.iter().zip(&kx).map(|(c, k)| c * k).sum::<f64>();
        let ev = h * E.iter().zip(&kv).map(|(c, k)| c * k).sum::<f64>();
        let sx = self.cfg.abs_tol + self.cfg.rel_tol * x.abs().max(x1.abs());
        let sv = self.cfg.abs_tol + self.cfg.rel_tol * v.abs().max(v1.abs());
        let err = (0.5 * ((ex / sx).powi(2) + (ev / sv).powi(2))).sqrt();
        if !(x1 < self.level) {
            return Ok(Trial::Beyond { err });
        }
        Ok(Trial::Inside { x: x1, v: v1, a: kv[6], err })
    }

    /// Fixed step halved until the motion over one step is a small fraction
    /// of the remaining gap. `None` when that would need a step below
    /// `dt_min` while approaching contact inside the contact zone.
    fn near_contact_step(&self, x: f64, v: f64, a: f64, h: f64) -> Option<f64> {
        let gap = self.sys.contact() - x;
        let coarse = |h: f64| v.abs() * h > GAP_FRACTION * gap || a.abs() * h * h > GAP_FRACTION * gap;
        let mut h = h;
        while h > self.cfg.dt_min && coarse(h) {
            h *= 0.5;
        }
        if h < self.cfg.dt_min {
            if v > 0.0 && gap <= CONTACT_ZONE * self.sys.contact() && coarse(self.cfg.dt_min) {
                return None;
            }
            h = self.cfg.dt_min;
        }
        Some(h)
    }

    /// Largest partial step in `[0, h]` that stays below the contact level,
    /// found by bisection on the step length. Returns `(step, x, v)`.
    fn refine_contact(&self, t: f64, x: f64, v: f64, a: f64, h: f64) -> (f64, f64, f64) {
        let (mut lo, mut hi) = (0.0, h);
        let (mut x_lo, mut v_lo) = (x, v);
        while hi - lo > self.cfg.event_refine_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.trial(t, x, v, a, mid) {
                Ok(Trial::Inside { x, v, .. }) => {
                    lo = mid;
                    x_lo = x;
                    v_lo = v;
                }
                _ => hi = mid,
            }
        }
        (lo, x_lo, v_lo)
    }
}

/// Integrates `sys` from `start` until contact or the configured horizon,
/// calling `observer` on every accepted state.
pub(crate) fn run<S: ForcedSystem>(
    sys: &S,
    cfg: &IntegratorConfig,
    start: PhaseState,
    opts: &DriverOptions,
    observer: &mut dyn FnMut(&PhaseState),
) -> Result<Trajectory> {
    cfg.validate()?;
    let level = sys.contact() - opts.epsilon;
    if !(start.x.is_finite() && start.v.is_finite() && start.t.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite initial state {start:?}")));
    }
    if start.x >= level {
        return Err(Error::InvalidParameter(format!("initial position {} is at or beyond contact", start.x)));
    }
    if opts.enforce_nonnegative && start.x < -NEGATIVE_X_TOL {
        return Err(Error::InvalidParameter(format!("initial position {} is negative", start.x)));
    }
    let x0 = if opts.enforce_nonnegative { start.x.max(0.0) } else { start.x };
    let start = PhaseState::new(start.t, x0, start.v);
    let t_end = start.t + cfg.t_max;
    let a0 = sys.acceleration(start.t, start.x, start.v)?;
    let h_ref = sys.energy(start.x, start.v);
    let mut energy_drift = h_ref.map(|_| 0.0);
    let mut fi_residual = sys.first_integral_residual(start.x, start.v).map(f64::abs);
    observer(&start);

    if start.v == 0.0 && a0 == 0.0 && sys.force(t_end, start.x)? == 0.0 {
        let end = PhaseState::new(t_end, start.x, 0.0);
        observer(&end);
        return Ok(Trajectory {
            samples: vec![start, end],
            events: vec![],
            energy_drift,
            first_integral_residual: fi_residual,
            max_return_offset: None,
            terminated_by: Termination::Horizon,
            steps: 0,
        });
    }

    let stepper = Stepper { sys, cfg, level };
    let mut samples = vec![start];
    let mut events = Vec::new();
    let mut max_return_offset: Option<f64> = None;
    let mut clock = Clock { t: start.t, carry: 0.0 };
    let (mut x, mut v, mut a) = (start.x, start.v, a0);
    let mut h_adapt = DP5_INITIAL_STEP.min(cfg.t_max);
    let mut since_sample = 0usize;
    let mut steps = 0usize;
    let mut terminated_by = Termination::Horizon;

    while clock.t < t_end {
        let t = clock.t;
        let remaining = t_end - t;
        let (h, trial) = match cfg.scheme {
            Scheme::Symplectic => match stepper.near_contact_step(x, v, a, cfg.dt) {
                Some(h) => {
                    let h = h.min(remaining);
                    (h, stepper.verlet(t, x, v, h)?)
                }
                None => (0.0, Trial::Stalled),
            },
            Scheme::Adaptive => loop {
                let h = h_adapt.min(remaining);
                if h < cfg.dt_min && h < remaining {
                    let gap = sys.contact() - x;
                    if v > 0.0 && a > 0.0 && gap <= CONTACT_ZONE * sys.contact() {
                        break (0.0, Trial::Stalled);
                    }
                    return Err(Error::IntegratorFailure(format!("adaptive step underflow at t = {t}, x = {x}")));
                }
                match stepper.dopri5(t, x, v, a, h) {
                    Ok(trial) => {
                        let err = match trial {
                            Trial::Inside { err, .. } | Trial::Beyond { err } => err,
                            Trial::Stalled => 0.0,
                        };
                        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                        if err <= 1.0 {
                            h_adapt = h * factor;
                            break (h, trial);
                        }
                        h_adapt = h * factor.min(1.0);
                    }
                    Err(Error::Singularity { .. }) => h_adapt = 0.25 * h,
                    Err(e) => return Err(e),
                }
            },
        };
        steps += 1;

        let (x1, v1, a1) = match trial {
            Trial::Inside { x, v, a, .. } => (x, v, a),
            Trial::Beyond { .. } | Trial::Stalled => {
                let (dh, xc, vc) = match trial {
                    Trial::Stalled => (0.0, x, v),
                    _ => stepper.refine_contact(t, x, v, a, h),
                };
                let mut tc = t + dh;
                let mut xr = xc;
                if vc > 0.0 {
                    tc += (level - xc) / vc;
                    xr = level;
                    if opts.extrapolate_contact {
                        tc += opts.epsilon / vc;
                        xr = sys.contact();
                    }
                }
                let state = PhaseState::new(tc, xr, vc);
                observer(&state);
                samples.push(state);
                events.push(Event { kind: EventKind::TouchDown, t: tc, x: xr });
                terminated_by = Termination::Event(EventKind::TouchDown);
                break;
            }
        };
        if !x1.is_finite() || !v1.is_finite() {
            return Err(Error::IntegratorFailure(format!("non-finite state at t = {t}: x = {x1}, v = {v1}")));
        }
        clock.advance(h);
        let t1 = if clock.t > t_end || remaining == h { t_end } else { clock.t };
        if opts.enforce_nonnegative && x1 < -NEGATIVE_X_TOL {
            return Err(Error::IntegratorFailure(format!("non-negativity violated: x = {x1:e} at t = {t1}")));
        }

        let mut event_here = false;
        let mut stop = false;
        if (v > 0.0 && v1 <= 0.0) || (v < 0.0 && v1 >= 0.0) {
            let hm = QuinticHermite::new(t, x, v, a, t1, x1, v1, a1);
            let te = hm.velocity_root(cfg.event_refine_tol);
            let xe = hm.position(te);
            if v > 0.0 {
                if xe > 0.0 {
                    events.push(Event { kind: EventKind::Stagnation, t: te, x: xe });
                    event_here = true;
                }
            } else if xe.abs() <= cfg.return_tol {
                events.push(Event { kind: EventKind::ReturnToOrigin, t: te, x: xe });
                max_return_offset = Some(max_return_offset.unwrap_or(0.0).max(xe.abs()));
                event_here = true;
                if cfg.stop_after_return {
                    stop = true;
                    terminated_by = Termination::Event(EventKind::ReturnToOrigin);
                }
            }
        }

        let diagnosed = sys.contact() - x1 > CONTACT_ZONE * sys.contact();
        if let (Some(h0), true) = (h_ref, diagnosed) {
            if let Some(e) = sys.energy(x1, v1) {
                let drift = (e - h0).abs();
                let worst = energy_drift.get_or_insert(0.0);
                *worst = worst.max(drift);
                if let Some(bound) = cfg.max_energy_drift {
                    if drift > bound {
                        return Err(Error::IntegratorFailure(format!(
                            "energy drift {drift:e} exceeds bound {bound:e} at t = {t1}"
                        )));
                    }
                }
            }
        }
        if let (Some(r), true) = (sys.first_integral_residual(x1, v1), diagnosed) {
            let worst = fi_residual.get_or_insert(0.0);
            *worst = worst.max(r.abs());
        }

        let state = PhaseState::new(t1, x1, v1);
        observer(&state);
        since_sample += 1;
        if since_sample >= cfg.sample_every || event_here || stop || t1 >= t_end {
            samples.push(state);
            since_sample = 0;
        }
        x = x1;
        v = v1;
        a = a1;
        if t1 >= t_end {
            clock.t = t_end;
        }
        if stop {
            break;
        }
    }

    Ok(Trajectory {
        samples,
        events,
        energy_drift,
        first_integral_residual: fi_residual,
        max_return_offset,
        terminated_by,
        steps,
    })
}
