//! Stagnation time, period and contact time from the first integral.
//!
//! Separating `dx/dt = sqrt(f(x))` gives `t = ∫ dx / sqrt(f(x))`. Both
//! endpoint singularities of the integrand are of inverse-square-root type,
//! so the substitution `x = x_end sin^2(θ)` turns each integral into a smooth
//! one on `[0, π/2]`, which is then evaluated with composite Gauss–Legendre.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::analysis::{classify_regime, factorization, pullin, Regime};
use crate::error::{Error, Result};
use crate::model::{g_of_x, ModelParams};

/// Nodes per Gauss–Legendre panel.
pub const BASE_NODES: usize = 32;
/// Maximum number of times the panel count is doubled.
pub const MAX_DOUBLINGS: usize = 20;
/// Relative agreement between successive refinements required for convergence.
pub const REL_TOL: f64 = 1e-10;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }

    /// The rule applied on `panels` equal subintervals of `[a, b]`.
    pub fn composite<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels).map(|k| self.integrate(a + h * k as f64, a + h * (k + 1) as f64, &f)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    if n == 0 {
        (1.0, 0.0)
    } else {
        (p1, d)
    }
}

/// Result of a panel-doubling integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// `|I_k - I_{k-1}|` of the final refinement.
    pub error: f64,
    /// Number of integrand evaluations in the final refinement.
    pub nodes: usize,
    /// Error estimate after each refinement.
    pub history: Vec<f64>,
}

/// Integrates a smooth `f` on `[a, b]`, doubling the number of
/// [`BASE_NODES`]-point panels until successive values agree to `rel_tol`.
pub fn integrate_doubling<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Integral> {
    let rule = GaussLegendre::new(BASE_NODES);
    let mut panels = 1;
    let mut prev = rule.composite(a, b, panels, &f);
    let mut history = Vec::new();
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let value = rule.composite(a, b, panels, &f);
        if !value.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integral with {panels} panels")));
        }
        let error = (value - prev).abs();
        history.push(error);
        if error <= rel_tol * value.abs() {
            return Ok(Integral { value, error, nodes: panels * rule.len(), history });
        }
        prev = value;
    }
    Err(Error::QuadratureFailure(format!("no convergence to {rel_tol} after {MAX_DOUBLINGS} doublings")))
}

/// Stagnation time, period and the closed-form time bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScales {
    pub t_s: f64,
    /// Always exactly `2 t_s`.
    pub t_p: f64,
    pub t_c: Option<f64>,
    pub t1_bound: Option<f64>,
    pub ts_bound: Option<f64>,
    pub tc_bound: Option<f64>,
    /// Error estimate of the quadrature that produced the times.
    pub quad_error: f64,
}

/// Closed-form upper bounds on the half-level crossing time `t1`, the
/// stagnation time and the contact time. Only those meaningful for the regime
/// are populated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyticBounds {
    pub t1_bound: Option<f64>,
    pub ts_bound: Option<f64>,
    pub tc_bound: Option<f64>,
}

fn not_periodic(m: &ModelParams, found: &Regime) -> Error {
    match pullin(m.xi, m.kappa) {
        Ok(p) if m.v >= p.v_dpi - crate::analysis::band_width(crate::analysis::CRITICAL_BAND, p.v_dpi) => {
            Error::Supercritical { v: m.v, v_dpi: p.v_dpi }
        }
        _ => Error::RegimeMismatch { expected: "periodic".into(), found: found.name().into() },
    }
}

/// `t_s = ∫_0^{x_s} dx / sqrt(f(x))` with `x = x_s sin^2 θ`, and `t_p = 2 t_s`.
pub fn period_by_quadrature(m: &ModelParams) -> Result<TimeScales> {
    let class = classify_regime(m)?;
    if !matches!(class.regime, Regime::Periodic { .. }) {
        return Err(not_periodic(m, &class.regime));
    }
    let fac = factorization(m)?;
    let s = m.xi + 1.0;
    let x_s = fac.x1;
    // After substitution: 2 sqrt((s - x) / ((x2 - x) q(x))), smooth on [0, π/2].
    let integrand = |theta: f64| {
        let x = x_s * theta.sin().powi(2);
        2.0 * ((s - x) / ((fac.x2 - x) * fac.q(x))).sqrt()
    };
    let integral = integrate_doubling(integrand, 0.0, FRAC_PI_2, REL_TOL)?;
    let bounds = analytic_bounds(m)?;
    Ok(TimeScales {
        t_s: integral.value,
        t_p: 2.0 * integral.value,
        t_c: None,
        t1_bound: bounds.t1_bound,
        ts_bound: bounds.ts_bound,
        tc_bound: None,
        quad_error: integral.error,
    })
}

/// `t_c = ∫_0^1 dx / sqrt(f(x))` with `x = sin^2 θ`.
///
/// With `f = x g(x) / (xi+1-x)` the transformed integrand is
/// `2 cos θ sqrt((xi + cos^2 θ) / g(sin^2 θ))`, which stays bounded at both
/// ends even when `xi = 0` and the contact point coincides with the singularity.
pub fn contact_time_by_quadrature(m: &ModelParams) -> Result<f64> {
    let class = classify_regime(m)?;
    let below_pull_in = match class.regime {
        Regime::TouchDown { below_pull_in, .. } => below_pull_in,
        _ => {
            return Err(Error::Subcritical { v: m.v, v_dpi: class.threshold.v_dpi });
        }
    };
    if below_pull_in && g_of_x(1.0, m) <= 0.0 {
        return Err(Error::QuadratureFailure(
            "stagnation exactly at contact; contact time is the stagnation time".into(),
        ));
    }
    let xi = m.xi;
    let integrand = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let x = sin * sin;
        2.0 * cos * ((xi + cos * cos) / g_of_x(x, m)).sqrt()
    };
    Ok(integrate_doubling(integrand, 0.0, FRAC_PI_2, REL_TOL)?.value)
}

/// Closed-form upper bounds on `t1`, `t_s` (periodic regime) and `t_c` (touch-down).
///
/// For the cubic spring the residual factor `q` is bounded below on `[0, x1]`
/// by `q_min`, and both periodic bounds are divided by `sqrt(q_min)`; for the
/// linear spring `q_min = 1`.
pub fn analytic_bounds(m: &ModelParams) -> Result<AnalyticBounds> {
    let class = classify_regime(m)?;
    let s = m.xi + 1.0;
    match class.regime {
        Regime::Periodic { .. } => {
            let fac = factorization(m)?;
            let (x1, x2) = (fac.x1, fac.x2);
            let q_min = fac.q_min_on(0.0, x1);
            let t1_bound = 2.0 * SQRT_2 * (s / ((2.0 * x2 - x1) * q_min)).sqrt();
            let ts_bound =
                2.0 * (((s - 0.5 * x1) / ((x2 - x1) * q_min)).sqrt() + SQRT_2 * (s / ((2.0 * x2 - x1) * q_min)).sqrt());
            Ok(AnalyticBounds { t1_bound: Some(t1_bound), ts_bound: Some(ts_bound), tc_bound: None })
        }
        Regime::TouchDown { tc_upper_bound, .. } => {
            Ok(AnalyticBounds { tc_bound: tc_upper_bound.is_finite().then_some(tc_upper_bound), ..Default::default() })
        }
        Regime::Critical { .. } => Ok(AnalyticBounds::default()),
    }
}
