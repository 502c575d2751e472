use crate::error::{Error, Result};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Fixed-step kick-drift-kick Störmer–Verlet, with step halving near
    /// contact.
    #[default]
    Symplectic,
    /// Dormand–Prince 5(4) with local error control.
    Adaptive,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Symplectic => "symplectic",
            Scheme::Adaptive => "adaptive",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symplectic" | "verlet" => Ok(Scheme::Symplectic),
            "adaptive" | "dopri5" => Ok(Scheme::Adaptive),
            other => {
                Err(Error::InvalidParameter(format!("unknown scheme `{other}` (expected symplectic or adaptive)")))
            }
        }
    }
}

/// Integrator settings. Construct with [`IntegratorConfig::default`] and
/// override fields as needed.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    /// Fixed step of the symplectic scheme.
    pub dt: f64,
    /// Smallest step allowed while refining near contact.
    pub dt_min: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    /// Contact is declared once `x >= contact - contact_epsilon`.
    pub contact_epsilon: f64,
    pub event_refine_tol: f64,
    /// Largest `x` at a velocity minimum that still counts as a return to
    /// the origin.
    pub return_tol: f64,
    /// Keep every n-th accepted step in `samples` (events and the final
    /// state are always kept).
    pub sample_every: usize,
    /// Stop at the first return to the origin.
    pub stop_after_return: bool,
    /// Fail with an integrator error if undamped energy drift exceeds this.
    pub max_energy_drift: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Symplectic,
            dt: 1e-4,
            dt_min: 1e-12,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_max: 50.0,
            contact_epsilon: 1e-9,
            event_refine_tol: 1e-10,
            return_tol: 1e-9,
            sample_every: 1,
            stop_after_return: false,
            max_energy_drift: None,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive() -> Self {
        Self { scheme: Scheme::Adaptive, ..Self::default() }
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("dt_min", self.dt_min),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("event_refine_tol", self.event_refine_tol),
            ("return_tol", self.return_tol),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if !(self.contact_epsilon > 0.0 && self.contact_epsilon < 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "contact_epsilon must lie in (0, 1e-3), got {}",
                self.contact_epsilon
            )));
        }
        if self.dt_min > self.dt {
            return Err(Error::InvalidParameter(format!("dt_min {} exceeds dt {}", self.dt_min, self.dt)));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter("sample_every must be at least 1".into()));
        }
        if let Some(bound) = self.max_energy_drift {
            if !(bound >= 0.0) {
                return Err(Error::InvalidParameter(format!("max_energy_drift must be non-negative, got {bound}")));
            }
        }
        Ok(())
    }
}
