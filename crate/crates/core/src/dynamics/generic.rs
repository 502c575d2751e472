use std::fmt;
use std::sync::Arc;

use super::config::{IntegratorConfig, Scheme};
use super::driver::{self, DriverOptions};
use super::system::ForcedSystem;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::model::PhaseState;

/// Points per axis of the grid used to validate the claimed bounds.
pub const BOUND_GRID: usize = 1000;
/// Distance below the contact position where the validation grid stops.
pub const BOUND_GRID_INSET: f64 = 1e-6;
/// Slack allowed when comparing sampled values with the claimed bounds.
pub const BOUND_SLACK: f64 = 1e-9;
/// Slack allowed when comparing the trajectory with the lower-bound curve.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `x'' + mu x' + f(x, t) = lambda g(x, t)` on `0 <= x < a`, starting from
/// rest at the origin.
///
/// `c1` must bound `|f|` from above and `c2` must bound `g` from below.
#[derive(Clone)]
pub struct GenericForcedModel {
    pub mu: f64,
    pub lambda: f64,
    pub f_fn: FieldFn,
    pub forcing_g: FieldFn,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
}

impl fmt::Debug for GenericForcedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericForcedModel")
            .field("mu", &self.mu)
            .field("lambda", &self.lambda)
            .field("a", &self.a)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .finish_non_exhaustive()
    }
}

impl GenericForcedModel {
    pub fn new<F, G>(mu: f64, lambda: f64, a: f64, c1: f64, c2: f64, f_fn: F, forcing_g: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { mu, lambda, f_fn: Arc::new(f_fn), forcing_g: Arc::new(forcing_g), a, c1, c2 }
    }

    /// The worked example: `f = x`, `g = 1 / (2 (1 - x)^2)`, `a = 1`,
    /// `C1 = 1`, `C2 = 1/2`.
    pub fn coulomb_example(mu: f64, lambda: f64) -> Self {
        Self::new(mu, lambda, 1.0, 1.0, 0.5, |x, _| x, |x, _| 0.5 / ((1.0 - x) * (1.0 - x)))
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("mu", self.mu, self.mu >= 0.0),
            ("lambda", self.lambda, self.lambda > 0.0),
            ("a", self.a, self.a > 0.0),
            ("C1", self.c1, self.c1 >= 0.0),
            ("C2", self.c2, self.c2 > 0.0),
        ];
        for (name, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} out of range: {value}")));
            }
        }
        Ok(())
    }

    /// `lambda C2 - C1`; the touch-down guarantee needs this to be positive.
    pub fn margin(&self) -> f64 {
        self.lambda * self.c2 - self.c1
    }

    /// Samples `f` and `g` on a grid over `[0, a - inset] x [0, t_max]` and
    /// fails if either claimed bound is violated.
    pub fn check_bounds(&self, t_max: f64) -> Result<()> {
        let x_hi = self.a - BOUND_GRID_INSET;
        let n = BOUND_GRID - 1;
        for i in 0..BOUND_GRID {
            let x = x_hi * i as f64 / n as f64;
            for j in 0..BOUND_GRID {
                let t = t_max * j as f64 / n as f64;
                let f = (self.f_fn)(x, t);
                if !(f.abs() <= self.c1 + BOUND_SLACK) {
                    return Err(Error::InvalidParameter(format!(
                        "|f({x}, {t})| = {} exceeds C1 = {}",
                        f.abs(),
                        self.c1
                    )));
                }
                let g = (self.forcing_g)(x, t);
                if !(g >= self.c2 - BOUND_SLACK) {
                    return Err(Error::InvalidParameter(format!("g({x}, {t}) = {g} is below C2 = {}", self.c2)));
                }
            }
        }
        Ok(())
    }
}

/// Lower bound on the displacement implied by `x'' + mu x' >= lambda C2 - C1`.
pub fn lower_bound_curve(margin: f64, mu: f64, t: f64) -> f64 {
    if mu > 0.0 {
        margin / mu * (t + (-mu * t).exp_m1() / mu)
    } else {
        0.5 * margin * t * t
    }
}

/// Time at which [`lower_bound_curve`] reaches `a`. `None` if `margin <= 0`.
pub fn touchdown_time_bound(margin: f64, mu: f64, a: f64) -> Option<f64> {
    if !(margin > 0.0) {
        return None;
    }
    if mu == 0.0 {
        return Some((2.0 * a / margin).sqrt());
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while lower_bound_curve(margin, mu, hi) < a {
        hi *= 2.0;
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lower_bound_curve(margin, mu, mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Comparison of a generic-model trajectory with the touch-down theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericReport {
    /// `lambda C2 > C1`.
    pub guaranteed: bool,
    pub t_c: Option<f64>,
    pub t_c_bound: Option<f64>,
    /// `v > 0` at every accepted step before contact.
    pub velocity_positive: bool,
    /// `x(t)` stays above the lower-bound curve at every accepted step.
    pub lower_bound_holds: bool,
    /// Smallest `x(t) - lower_bound(t)` seen.
    pub min_lower_bound_slack: f64,
}

impl GenericReport {
    /// All theorem predictions confirmed. Always false without the
    /// guarantee.
    pub fn confirmed(&self) -> bool {
        self.guaranteed
            && self.velocity_positive
            && self.lower_bound_holds
            && matches!((self.t_c, self.t_c_bound), (Some(t), Some(b)) if t <= b)
    }
}

struct GenericSystem<'a>(&'a GenericForcedModel);

impl ForcedSystem for GenericSystem<'_> {
    fn force(&self, t: f64, x: f64) -> Result<f64> {
        let m = self.0;
        if !(x < m.a) {
            return Err(Error::Singularity { x, limit: m.a });
        }
        let value = m.lambda * (m.forcing_g)(x, t) - (m.f_fn)(x, t);
        if !value.is_finite() {
            return Err(Error::IntegratorFailure(format!("forcing is not finite at x = {x}, t = {t}")));
        }
        Ok(value)
    }

    fn damping(&self) -> f64 {
        self.0.mu
    }

    fn contact(&self) -> f64 {
        self.0.a
    }
}

/// Integrates a generic forced model from rest and checks the touch-down
/// theorem. Without the guarantee the run still happens and the report has
/// `guaranteed = false`.
///
/// The symplectic scheme is not meaningful for time-dependent forcing, so
/// the adaptive scheme is always used.
pub fn integrate_generic(gm: &GenericForcedModel, cfg: &IntegratorConfig) -> Result<(Trajectory, GenericReport)> {
    gm.validate()?;
    cfg.validate()?;
    gm.check_bounds(cfg.t_max)?;
    let cfg = IntegratorConfig { scheme: Scheme::Adaptive, ..cfg.clone() };
    let margin = gm.margin();
    let guaranteed = margin > 0.0;
    let opts = DriverOptions {
        epsilon: cfg.contact_epsilon * gm.a,
        extrapolate_contact: true,
        enforce_nonnegative: guaranteed,
    };

    let mut velocity_positive = true;
    let mut min_slack = f64::INFINITY;
    let mut observer = |p: &PhaseState| {
        if p.t > 0.0 {
            velocity_positive &= p.v > 0.0;
            if guaranteed && p.x < gm.a {
                min_slack = min_slack.min(p.x - lower_bound_curve(margin, gm.mu, p.t));
            }
        }
    };
    let traj = driver::run(&GenericSystem(gm), &cfg, PhaseState::REST, &opts, &mut observer)?;
    let report = GenericReport {
        guaranteed,
        t_c: traj.touchdown_time(),
        t_c_bound: touchdown_time_bound(margin, gm.mu, gm.a),
        velocity_positive,
        lower_bound_holds: guaranteed && min_slack >= -LOWER_BOUND_SLACK,
        min_lower_bound_slack: min_slack,
    };
    Ok((traj, report))
}
