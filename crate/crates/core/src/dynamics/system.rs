use crate::error::Result;
use crate::model::{self, ModelParams, PhaseState};

/// A one-degree-of-freedom system `x'' = F(t, x) - mu x'` that makes
/// contact at a fixed position.
pub(crate) trait ForcedSystem {
    /// Position-dependent force. Must return an error rather than a
    /// non-finite value when `x` is outside the admissible range.
    fn force(&self, t: f64, x: f64) -> Result<f64>;

    fn damping(&self) -> f64;

    /// Position at which the motion ends in contact.
    fn contact(&self) -> f64;

    /// Conserved energy, if the system has one.
    fn energy(&self, _x: f64, _v: f64) -> Option<f64> {
        None
    }

    /// `v^2 - f(x)` for the rest-start first integral, if applicable.
    fn first_integral_residual(&self, _x: f64, _v: f64) -> Option<f64> {
        None
    }

    fn acceleration(&self, t: f64, x: f64, v: f64) -> Result<f64> {
        Ok(self.force(t, x)? - self.damping() * v)
    }
}

pub(crate) struct ActuatorSystem {
    pub params: ModelParams,
    pub contact: f64,
    /// Whether the run started from rest at the origin, so that the first
    /// integral applies.
    pub rest_start: bool,
}

impl ForcedSystem for ActuatorSystem {
    fn force(&self, _t: f64, x: f64) -> Result<f64> {
        model::force(x, &self.params)
    }

    fn damping(&self) -> f64 {
        self.params.mu
    }

    fn contact(&self) -> f64 {
        self.contact
    }

    fn energy(&self, x: f64, v: f64) -> Option<f64> {
        if self.params.mu > 0.0 {
            return None;
        }
        model::hamiltonian(&PhaseState::new(0.0, x, v), &self.params).ok()
    }

    fn first_integral_residual(&self, x: f64, v: f64) -> Option<f64> {
        if self.params.mu > 0.0 || !self.rest_start {
            return None;
        }
        model::first_integral_rhs(x, &self.params).ok().map(|f| v * v - f)
    }
}
