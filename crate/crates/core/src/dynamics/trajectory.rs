use crate::model::PhaseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Stagnation,
    ReturnToOrigin,
    TouchDown,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Stagnation => "stagnation",
            EventKind::ReturnToOrigin => "return",
            EventKind::TouchDown => "touchdown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Horizon,
    Event(EventKind),
}

/// An integrated trajectory. Built once by the integrators and read-only
/// afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub events: Vec<Event>,
    /// `max |H(t) - H(0)|` over every accepted step; `None` for damped or
    /// non-Hamiltonian runs.
    pub energy_drift: Option<f64>,
    /// `max |v^2 - first_integral_rhs(x)|` over every accepted step; `None`
    /// unless the run is undamped and starts from rest at the origin.
    pub first_integral_residual: Option<f64>,
    /// Largest `x` recorded at a return-to-origin event.
    pub max_return_offset: Option<f64>,
    pub terminated_by: Termination,
    pub steps: usize,
}

impl Trajectory {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<Event> {
        self.events_of(kind).next().copied()
    }

    pub fn touchdown_time(&self) -> Option<f64> {
        self.first_event(EventKind::TouchDown).map(|e| e.t)
    }

    pub fn last(&self) -> PhaseState {
        *self.samples.last().expect("trajectory always has samples")
    }

    pub fn max_x(&self) -> f64 {
        self.samples.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_x(&self) -> f64 {
        self.samples.iter().map(|s| s.x).fold(f64::INFINITY, f64::min)
    }

    /// Position at time `t` by cubic Hermite interpolation between the
    /// bracketing samples. `None` outside the sampled interval.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        let first = s.first()?;
        let last = s.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        let i = s.partition_point(|p| p.t <= t);
        if i == s.len() {
            return Some(last.x);
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let u2 = u * u;
        let u3 = u2 * u;
        Some(
            (2.0 * u3 - 3.0 * u2 + 1.0) * a.x
                + (u3 - 2.0 * u2 + u) * h * a.v
                + (-2.0 * u3 + 3.0 * u2) * b.x
                + (u3 - u2) * h * b.v,
        )
    }

    /// First time the position rises through `level`, located by bisection
    /// on the cubic Hermite interpolant of the bracketing samples.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        let i = self.samples.windows(2).position(|w| w[0].x < level && w[1].x >= level)?;
        let (mut lo, mut hi) = (self.samples[i].t, self.samples[i + 1].t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.position_at(mid)? < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}
