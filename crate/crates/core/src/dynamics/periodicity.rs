use super::trajectory::{EventKind, Trajectory};
use crate::error::{Error, Result};

/// Outcome of comparing the rising and falling halves of a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicityReport {
    pub t_s: f64,
    pub x_s: f64,
    /// First return to the origin after the stagnation, if any.
    pub t_return: Option<f64>,
    /// `max |x(t_s + tau) - x(t_s - tau)|` over samples with `tau <= t_s`.
    pub symmetry_defect: f64,
    /// `|t_return - 2 t_s|`, or infinity when there is no return.
    pub period_defect: f64,
    pub compared: usize,
}

impl PeriodicityReport {
    pub fn period(&self) -> f64 {
        2.0 * self.t_s
    }

    /// Whether the return time matches `2 t_s` within `tol`.
    pub fn period_consistent(&self, tol: f64) -> bool {
        self.period_defect <= tol
    }
}

/// Checks the reflection symmetry of a trajectory about its first
/// stagnation time.
pub fn verify_periodicity(traj: &Trajectory) -> Result<PeriodicityReport> {
    let stag = traj
        .first_event(EventKind::Stagnation)
        .ok_or_else(|| Error::NotApplicable("trajectory has no stagnation event".into()))?;
    let t0 = traj.samples[0].t;
    let t_s = stag.t;
    let mirror_end = 2.0 * t_s - t0;
    if traj.last().t < mirror_end {
        return Err(Error::NotApplicable(format!(
            "trajectory ends at t = {} before the mirror time {mirror_end}",
            traj.last().t
        )));
    }
    let mut defect = 0.0f64;
    let mut compared = 0;
    for s in traj.samples.iter().take_while(|s| s.t <= t_s) {
        let mirrored = traj.position_at(2.0 * t_s - s.t).expect("mirror time lies inside the sampled interval");
        defect = defect.max((mirrored - s.x).abs());
        compared += 1;
    }
    let t_return = traj.events_of(EventKind::ReturnToOrigin).find(|e| e.t > t_s).map(|e| e.t);
    Ok(PeriodicityReport {
        t_s,
        x_s: stag.x,
        t_return,
        symmetry_defect: defect,
        period_defect: t_return.map_or(f64::INFINITY, |t| (t - 2.0 * t_s).abs()),
        compared,
    })
}
