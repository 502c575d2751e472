//! Actuator parameters, unit normalization, energy and force.
//!
//! All quantities here are in normalized units: displacement is measured in
//! units of the initial gap, time in units of `sqrt(m/k)`, energy in units of
//! `k g^2`. The electrostatic singularity sits at `x = xi + 1`; physical
//! contact with the dielectric happens earlier, at `x = 1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Device parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Mass of the movable electrode (kg).
    pub mass: f64,
    /// Linear spring constant (N/m).
    pub spring_k: f64,
    /// Cubic spring constant (N/m^3).
    pub spring_k3: f64,
    /// Electrode area (m^2).
    pub area: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Relative permittivity of the dielectric coating.
    pub eps_r: f64,
    /// Dielectric thickness (m).
    pub d0: f64,
    /// Initial gap between the electrode and the dielectric (m).
    pub gap: f64,
    /// Applied step voltage (V).
    pub voltage: f64,
}

/// Vacuum permittivity in F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("spring_k", self.spring_k),
            ("area", self.area),
            ("eps0", self.eps0),
            ("gap", self.gap),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and positive, got {value}")));
            }
        }
        let nonneg = [("spring_k3", self.spring_k3), ("d0", self.d0), ("voltage", self.voltage)];
        for (name, value) in nonneg {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {value}")));
            }
        }
        if !(self.eps_r.is_finite() && self.eps_r >= 1.0) {
            return Err(Error::InvalidParameter(format!("eps_r must be at least 1, got {}", self.eps_r)));
        }
        Ok(())
    }

    /// Angular frequency `sqrt(k/m)` that converts physical time to normalized time.
    pub fn time_scale(&self) -> f64 {
        (self.spring_k / self.mass).sqrt()
    }

    /// Physical voltage corresponding to a normalized voltage for this device.
    pub fn volts_from_normalized(&self, v: f64) -> f64 {
        v * (self.spring_k * self.gap.powi(3) / (self.eps0 * self.area)).sqrt()
    }
}

/// Normalized actuator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Normalized dielectric thickness `d0 / (g eps_r)`.
    pub xi: f64,
    /// Normalized applied voltage.
    pub v: f64,
    /// Normalized cubic stiffness `k3 g^2 / k`.
    pub kappa: f64,
    /// Normalized damping coefficient.
    pub mu: f64,
}

impl ModelParams {
    /// Undamped linear-spring actuator.
    pub fn linear(xi: f64, v: f64) -> Self {
        Self { xi, v, kappa: 0.0, mu: 0.0 }
    }

    /// Undamped actuator with a cubic spring.
    pub fn cubic(xi: f64, v: f64, kappa: f64) -> Self {
        Self { xi, v, kappa, mu: 0.0 }
    }

    pub fn with_damping(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("xi", self.xi), ("v", self.v), ("kappa", self.kappa), ("mu", self.mu)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {value}")));
            }
        }
        Ok(())
    }

    /// Location of the electrostatic singularity, `xi + 1`.
    pub fn singularity(&self) -> f64 {
        self.xi + 1.0
    }

    /// The elastic potential `x^2/2 + kappa x^4/4` of these parameters.
    pub fn potential(&self) -> ElasticPotential {
        ElasticPotential::cubic(self.kappa)
    }

    fn check_domain(&self, x: f64) -> Result<f64> {
        let limit = self.singularity();
        if !x.is_finite() || x >= limit {
            return Err(Error::Singularity { x, limit });
        }
        Ok(limit - x)
    }
}

/// A point in phase space at a given normalized time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

impl PhaseState {
    /// The rest state `x = 0, v = 0` at `t = 0`.
    pub const REST: PhaseState = PhaseState { t: 0.0, x: 0.0, v: 0.0 };

    pub fn new(t: f64, x: f64, v: f64) -> Self {
        Self { t, x, v }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A general elastic potential `Phi(x)` together with its derivative.
#[derive(Clone)]
pub struct ElasticPotential {
    phi: ScalarFn,
    phi_prime: ScalarFn,
}

impl fmt::Debug for ElasticPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElasticPotential").finish_non_exhaustive()
    }
}

impl ElasticPotential {
    pub fn new<P, D>(phi: P, phi_prime: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { phi: Arc::new(phi), phi_prime: Arc::new(phi_prime) }
    }

    /// `Phi(x) = x^2 / 2`.
    pub fn linear() -> Self {
        Self::new(|x| 0.5 * x * x, |x| x)
    }

    /// `Phi(x) = x^2 / 2 + kappa x^4 / 4`.
    pub fn cubic(kappa: f64) -> Self {
        Self::new(move |x| 0.5 * x * x + 0.25 * kappa * x.powi(4), move |x| x + kappa * x.powi(3))
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        (self.phi_prime)(x)
    }

    /// `Psi(x) = V^2/(xi+1) - 2 (xi+1-x) Phi(x) / x`, the function whose strict
    /// convexity on `(0, xi+1)` makes the first-integral analysis go through.
    pub fn psi(&self, x: f64, xi: f64, v: f64) -> f64 {
        let s = xi + 1.0;
        v * v / s - 2.0 * (s - x) * self.phi(x) / x
    }
}

/// SI parameters to normalized parameters. Damping is set to zero.
pub fn normalize_physical(p: &PhysicalParams) -> Result<ModelParams> {
    p.validate()?;
    let xi = p.d0 / (p.gap * p.eps_r);
    let v = (p.eps0 * p.area * p.voltage * p.voltage / (p.spring_k * p.gap.powi(3))).sqrt();
    let kappa = p.spring_k3 * p.gap * p.gap / p.spring_k;
    Ok(ModelParams { xi, v, kappa, mu: 0.0 })
}

/// Normalized energy `v^2/2 + x^2/2 + kappa x^4/4 - V^2 / (2 (xi+1-x))`.
pub fn hamiltonian(s: &PhaseState, m: &ModelParams) -> Result<f64> {
    let d = m.check_domain(s.x)?;
    let x2 = s.x * s.x;
    Ok(0.5 * s.v * s.v + 0.5 * x2 + 0.25 * m.kappa * x2 * x2 - 0.5 * m.v * m.v / d)
}

/// Normalized restoring plus electrostatic force, `-x - kappa x^3 + V^2 / (2 (xi+1-x)^2)`.
///
/// Damping is not included; see [`acceleration`].
pub fn force(x: f64, m: &ModelParams) -> Result<f64> {
    let d = m.check_domain(x)?;
    Ok(-x - m.kappa * x * x * x + 0.5 * m.v * m.v / (d * d))
}

/// `force(x) - mu v`.
pub fn acceleration(x: f64, v: f64, m: &ModelParams) -> Result<f64> {
    Ok(force(x, m)? - m.mu * v)
}

/// Right-hand side of the first integral: the value of `v^2` along the
/// undamped trajectory that starts at rest from `x = 0`.
pub fn first_integral_rhs(x: f64, m: &ModelParams) -> Result<f64> {
    let d = m.check_domain(x)?;
    Ok(x / d * g_of_x(x, m))
}

/// `g(x) = V^2/(xi+1) - (xi+1-x) x - (kappa/2)(xi+1-x) x^3`, the factor of the
/// first integral that decides where the velocity can vanish.
pub fn g_of_x(x: f64, m: &ModelParams) -> f64 {
    let s = m.xi + 1.0;
    m.v * m.v / s - (s - x) * x * (1.0 + 0.5 * m.kappa * x * x)
}

/// Derivative of [`g_of_x`] with respect to `x`.
pub fn g_of_x_prime(x: f64, xi: f64, kappa: f64) -> f64 {
    let s = xi + 1.0;
    2.0 * kappa * x.powi(3) - 1.5 * kappa * s * x * x + 2.0 * x - s
}

/// Upper bound on the cubic stiffness keeping `g` strictly convex: `16 / (3 (xi+1)^2)`.
pub fn convexity_bound(xi: f64) -> f64 {
    16.0 / (3.0 * (xi + 1.0).powi(2))
}

/// Outcome of a convexity diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub pass: bool,
    /// For the cubic check, `bound - kappa`; for a general potential, the
    /// smallest second divided difference of `Psi` on the sampling grid.
    pub margin: f64,
}

/// Number of grid points used by [`check_potential_convexity`].
pub const CONVEXITY_GRID_POINTS: usize = 10_001;
/// Distance kept from both ends of `(0, xi+1)` by the grid.
pub const CONVEXITY_GRID_INSET: f64 = 1e-9;
/// Second divided differences must exceed this.
pub const CONVEXITY_THRESHOLD: f64 = 1e-12;

/// Strict convexity of the cubic first-integral factor.
pub fn check_convexity(m: &ModelParams) -> ConvexityReport {
    let margin = convexity_bound(m.xi) - m.kappa;
    ConvexityReport { pass: margin > 0.0, margin }
}

/// Strict convexity of `Psi` for a general potential, sampled on a uniform grid.
pub fn check_potential_convexity(pot: &ElasticPotential, xi: f64, v: f64) -> ConvexityReport {
    let lo = CONVEXITY_GRID_INSET;
    let hi = xi + 1.0 - CONVEXITY_GRID_INSET;
    let n = CONVEXITY_GRID_POINTS;
    let h = (hi - lo) / (n - 1) as f64;
    let psi: Vec<f64> = (0..n).map(|i| pot.psi(lo + h * i as f64, xi, v)).collect();
    let margin = psi.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h)).fold(f64::INFINITY, |acc, d| {
        if d.is_nan() {
            f64::NAN
        } else {
            acc.min(d)
        }
    });
    ConvexityReport { pass: margin > CONVEXITY_THRESHOLD, margin }
}
