use super::config::IntegratorConfig;
use super::driver::{self, DriverOptions};
use super::system::ActuatorSystem;
use super::trajectory::{Termination, Trajectory};
use crate::analysis::{self, Regime};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PhaseState};

/// Step of the gap integration, in normalized time.
const GAP_STEP: f64 = 1e-3;

/// Diagnostics of the approach to the unstable equilibrium at the pull-in
/// threshold.
///
/// Near the equilibrium `x` becomes indistinguishable from `x_limit` in
/// floating point long before the horizon, so the monotonicity checks are
/// made on `gaps`, the distance `x_limit - x` integrated directly.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalReport {
    pub x_limit: f64,
    /// Time at which the integration switched from the equation of motion
    /// to the logarithmic gap equation.
    pub switch_time: f64,
    /// `x_limit - x` at each sample of the trajectory.
    pub gaps: Vec<f64>,
    pub gap_positive: bool,
    pub gap_strictly_decreasing: bool,
    pub velocity_positive: bool,
}

impl CriticalReport {
    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("critical trajectory is non-empty")
    }

    /// Monotone approach from below that never reaches the limit.
    pub fn monotone_approach(&self) -> bool {
        self.gap_positive && self.gap_strictly_decreasing && self.velocity_positive
    }
}

/// Integrates a model at its pull-in threshold.
///
/// Up to `x = x_limit / 2` the equation of motion is integrated with the
/// configured scheme. Beyond that the gap `y = x_limit - x` obeys
/// `d(ln y)/dt = -sqrt(x q(x) / (xi+1-x))`, where `q` is the cofactor of the
/// double root of the first integral, and `ln y` is advanced with RK4.
pub fn integrate_critical(m: &ModelParams, cfg: &IntegratorConfig) -> Result<(Trajectory, CriticalReport)> {
    m.validate()?;
    cfg.validate()?;
    if m.mu != 0.0 {
        return Err(Error::InvalidParameter("critical integration requires mu = 0".into()));
    }
    let class = analysis::classify_regime(m)?;
    let Regime::Critical { x_limit } = class.regime else {
        return Err(Error::RegimeMismatch { expected: "critical".into(), found: class.regime.name().into() });
    };
    let s = m.xi + 1.0;
    let q =
        analysis::quotient_by_roots(&analysis::g_coefficients(m.xi, class.threshold.v_dpi, m.kappa), x_limit, x_limit);
    let rate = |x: f64| {
        let qx = q[0] + x * (q[1] + x * q[2]);
        (x * qx / (s - x)).max(0.0).sqrt()
    };

    let sys = ActuatorSystem { params: *m, contact: 0.5 * x_limit, rest_start: true };
    let opts = DriverOptions { epsilon: 0.0, extrapolate_contact: false, enforce_nonnegative: true };
    let mut phase1 = driver::run(&sys, cfg, PhaseState::REST, &opts, &mut |_| {})?;
    if phase1.terminated_by == Termination::Horizon {
        let gaps = phase1.samples.iter().map(|p| x_limit - p.x).collect();
        let report = assess(x_limit, phase1.last().t, gaps, &phase1);
        return Ok((phase1, report));
    }
    phase1.events.clear();
    let switch = phase1.last();
    let t_end = cfg.t_max;
    let mut gaps: Vec<f64> = phase1.samples.iter().map(|p| x_limit - p.x).collect();

    let mut y = (x_limit - switch.x).ln();
    let mut t = switch.t;
    let mut n = 0usize;
    let dy = |y: f64| -rate(x_limit - y.exp());
    while t < t_end {
        let h = GAP_STEP.min(t_end - t);
        let k1 = dy(y);
        let k2 = dy(y + 0.5 * h * k1);
        let k3 = dy(y + 0.5 * h * k2);
        let k4 = dy(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        n += 1;
        t = if t_end - t <= h { t_end } else { switch.t + n as f64 * GAP_STEP };
        if n.is_multiple_of(cfg.sample_every) || t >= t_end {
            let gap = y.exp();
            let x = x_limit - gap;
            phase1.samples.push(PhaseState::new(t, x, gap * rate(x)));
            gaps.push(gap);
        }
    }
    phase1.steps += n;
    phase1.terminated_by = Termination::Horizon;
    let report = assess(x_limit, switch.t, gaps, &phase1);
    Ok((phase1, report))
}

fn assess(x_limit: f64, switch_time: f64, gaps: Vec<f64>, traj: &Trajectory) -> CriticalReport {
    CriticalReport {
        x_limit,
        switch_time,
        gap_positive: gaps.iter().all(|&g| g > 0.0),
        gap_strictly_decreasing: gaps.windows(2).all(|w| w[1] < w[0]),
        velocity_positive: traj.samples[1..].iter().all(|p| p.v > 0.0),
        gaps,
    }
}
