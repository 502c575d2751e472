//! Static analysis of the first integral: factorization, stagnation position,
//! pull-in threshold, regime classification and parameter sensitivities.
//!
//! Along the trajectory that starts at rest from `x = 0`, energy conservation
//! gives `v^2 = x g(x) / (xi + 1 - x)` with
//!
//! ```text
//! g(x) = V^2/(xi+1) - (xi+1-x) x - (kappa/2)(xi+1-x) x^3
//! ```
//!
//! Everything about the motion follows from the sign pattern of `g` on
//! `[0, xi+1]`. When `kappa < 16/(3(xi+1)^2)`, `g` is strictly convex with a
//! single interior minimizer `x0` that does not depend on `V`. If `g(x0) < 0`
//! the electrode stagnates at the smaller root `x1 < x0`; if `g(x0) > 0` it is
//! driven into contact; `g(x0) = 0` defines the pull-in voltage.

use crate::error::{Error, Result};
use crate::model::{convexity_bound, g_of_x, g_of_x_prime, ModelParams};
use crate::roots::{safeguarded_newton, MAX_ITER, ROOT_TOL};

/// Default half-width of the band around the pull-in voltage that classifies
/// as critical, relative to `max(1, v_dpi)`.
pub const CRITICAL_BAND: f64 = 1e-12;

/// Absolute half-width of a critical band of size `band` around `v_dpi`:
/// absolute for thresholds below one, relative above.
pub fn band_width(band: f64, v_dpi: f64) -> f64 {
    band * v_dpi.max(1.0)
}

/// Step used by the finite-difference self-checks.
pub const FD_STEP: f64 = 1e-6;
/// Relative agreement required between analytic and finite-difference sensitivities.
pub const FD_REL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorCase {
    Linear,
    Cubic,
}

/// `g(x) = (x1 - x)(x2 - x) q(x)`.
///
/// For the linear spring `q == 1`; for the cubic spring `q` is a quadratic
/// that stays positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegralFactorization {
    pub x1: f64,
    pub x2: f64,
    /// Coefficients of `q` in ascending powers of `x`.
    pub q_coeffs: Vec<f64>,
    pub case: FactorCase,
}

impl FirstIntegralFactorization {
    pub fn q(&self, x: f64) -> f64 {
        self.q_coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Smallest value of `q` on `[lo, hi]`.
    pub fn q_min_on(&self, lo: f64, hi: f64) -> f64 {
        let mut m = self.q(lo).min(self.q(hi));
        if let [_, b, a] = self.q_coeffs[..] {
            if a != 0.0 {
                let vertex = -b / (2.0 * a);
                if vertex > lo && vertex < hi {
                    m = m.min(self.q(vertex));
                }
            }
        }
        m
    }

    /// `g(x)` rebuilt from the factors.
    pub fn g(&self, x: f64) -> f64 {
        (self.x1 - x) * (self.x2 - x) * self.q(x)
    }
}

/// Pull-in threshold of a spring law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullInResult {
    /// Dynamic pull-in voltage (normalized).
    pub v_dpi: f64,
    /// Dynamic pull-in position (normalized).
    pub x_dpi: f64,
    /// Minimizer of `g`; equal to `x_dpi`.
    pub x0: f64,
    pub kappa: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Symmetric periodic motion between `0` and the stagnation position.
    Periodic { x_s: f64 },
    /// Monotone approach to the pull-in position as `t -> infinity`.
    Critical { x_limit: f64 },
    /// Contact at `x = 1` in finite time.
    ///
    /// `a_sq` is the minimum of `g` over `[0, 1]`; the contact time is at
    /// most `2 sqrt(xi + 1) / sqrt(a_sq)`. `below_pull_in` marks thick
    /// coatings where contact at `x = 1` comes before the stagnation point
    /// or the pull-in position would be reached.
    TouchDown { a_sq: f64, tc_upper_bound: f64, below_pull_in: bool },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Periodic { .. } => "periodic",
            Regime::Critical { .. } => "critical",
            Regime::TouchDown { .. } => "touchdown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub threshold: PullInResult,
    pub v_applied: f64,
}

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_finite() && xi >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("xi must be finite and nonnegative, got {xi}")))
    }
}

fn check_kappa(xi: f64, kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be finite and nonnegative, got {kappa}")));
    }
    let bound = convexity_bound(xi);
    if kappa >= bound {
        return Err(Error::ConvexityViolation { kappa, bound });
    }
    Ok(())
}

fn check_voltage(v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("v must be finite and nonnegative, got {v}")))
    }
}

/// Roots of `x^2 - (xi+1) x + V^2/(xi+1)` for the linear spring.
pub fn linear_factorization(xi: f64, v: f64) -> Result<FirstIntegralFactorization> {
    check_xi(xi)?;
    check_voltage(v)?;
    let s = xi + 1.0;
    let product = v * v / s;
    let disc = s * s - 4.0 * product;
    if disc <= 0.0 {
        return Err(Error::Supercritical { v, v_dpi: pullin_linear(xi).v_dpi });
    }
    let x2 = 0.5 * (s + disc.sqrt());
    // Vieta avoids cancellation in the small root.
    let x1 = product / x2;
    Ok(FirstIntegralFactorization { x1, x2, q_coeffs: vec![1.0], case: FactorCase::Linear })
}

/// Stagnation position of the linear spring.
pub fn stagnation_linear(xi: f64, v: f64) -> Result<f64> {
    linear_factorization(xi, v).map(|f| f.x1)
}

/// Pull-in voltage `(1+xi)^{3/2} / 2` and position `(1+xi)/2` of the linear spring.
pub fn pullin_linear(xi: f64) -> PullInResult {
    let s = xi + 1.0;
    PullInResult { v_dpi: 0.5 * s * s.sqrt(), x_dpi: 0.5 * s, x0: 0.5 * s, kappa: 0.0, xi }
}

/// Unique minimizer of `g` on `(0, xi+1)`, the root of
/// `2 kappa x^3 - (3/2) kappa (xi+1) x^2 + 2x - (xi+1)`.
pub fn cubic_min_point(xi: f64, kappa: f64) -> Result<f64> {
    check_xi(xi)?;
    check_kappa(xi, kappa)?;
    if kappa == 0.0 {
        return Ok(0.5 * (xi + 1.0));
    }
    let s = xi + 1.0;
    let x0 = safeguarded_newton(
        |x| (g_of_x_prime(x, xi, kappa), g_of_x_second(x, xi, kappa)),
        1e-15,
        s - 1e-15,
        ROOT_TOL,
        MAX_ITER,
    )?;
    Ok(polish(x0, |x| (g_of_x_prime(x, xi, kappa), g_of_x_second(x, xi, kappa))))
}

fn g_of_x_second(x: f64, xi: f64, kappa: f64) -> f64 {
    6.0 * kappa * x * x - 3.0 * kappa * (xi + 1.0) * x + 2.0
}

/// Two extra Newton steps, kept only while they reduce the residual.
fn polish<F: Fn(f64) -> (f64, f64)>(mut x: f64, f: F) -> f64 {
    for _ in 0..2 {
        let (fx, dfx) = f(x);
        if fx == 0.0 || dfx == 0.0 {
            break;
        }
        let next = x - fx / dfx;
        if f(next).0.abs() < fx.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Pull-in threshold for the cubic spring; `kappa = 0` gives the linear result.
pub fn cubic_pullin(xi: f64, kappa: f64) -> Result<PullInResult> {
    check_xi(xi)?;
    check_kappa(xi, kappa)?;
    if kappa == 0.0 {
        return Ok(pullin_linear(xi));
    }
    let x0 = cubic_min_point(xi, kappa)?;
    let s = xi + 1.0;
    let v_dpi = (s * h_of_x(x0, xi, kappa)).sqrt();
    Ok(PullInResult { v_dpi, x_dpi: x0, x0, kappa, xi })
}

/// `h(x) = (xi+1-x) x + (kappa/2)(xi+1-x) x^3`, so that `g = V^2/(xi+1) - h`.
pub fn h_of_x(x: f64, xi: f64, kappa: f64) -> f64 {
    (xi + 1.0 - x) * x * (1.0 + 0.5 * kappa * x * x)
}

/// Stagnation position `x1*` for the cubic spring.
pub fn cubic_stagnation(xi: f64, v: f64, kappa: f64) -> Result<f64> {
    cubic_factorization(xi, v, kappa).map(|f| f.x1)
}

/// Full factorization of `g` below pull-in; `kappa = 0` routes to the closed form.
pub fn cubic_factorization(xi: f64, v: f64, kappa: f64) -> Result<FirstIntegralFactorization> {
    check_xi(xi)?;
    check_voltage(v)?;
    check_kappa(xi, kappa)?;
    if kappa == 0.0 {
        return linear_factorization(xi, v);
    }
    let pull = cubic_pullin(xi, kappa)?;
    let m = ModelParams::cubic(xi, v, kappa);
    let x0 = pull.x0;
    if v >= pull.v_dpi || g_of_x(x0, &m) >= 0.0 {
        return Err(Error::Supercritical { v, v_dpi: pull.v_dpi });
    }
    let s = xi + 1.0;
    let gf = |x: f64| (g_of_x(x, &m), g_of_x_prime(x, xi, kappa));
    let x1 = polish(safeguarded_newton(gf, 0.0, x0, ROOT_TOL, MAX_ITER)?, gf);
    let x2 = polish(safeguarded_newton(gf, x0, s, ROOT_TOL, MAX_ITER)?, gf);
    let q_coeffs = quotient_by_roots(&g_coefficients(xi, v, kappa), x1, x2).to_vec();
    Ok(FirstIntegralFactorization { x1, x2, q_coeffs, case: FactorCase::Cubic })
}

/// Ascending coefficients of `g` as a quartic.
pub fn g_coefficients(xi: f64, v: f64, kappa: f64) -> [f64; 5] {
    let s = xi + 1.0;
    [v * v / s, -s, 1.0, -0.5 * kappa * s, 0.5 * kappa]
}

/// Quadratic quotient of a quartic divided by `(x - r1)(x - r2)`.
pub fn quotient_by_roots(c: &[f64; 5], r1: f64, r2: f64) -> [f64; 3] {
    let sum = r1 + r2;
    let prod = r1 * r2;
    let a2 = c[4];
    let a1 = c[3] + sum * a2;
    let a0 = c[2] + sum * a1 - prod * a2;
    [a0, a1, a2]
}

/// Pull-in threshold for any admissible `kappa` (linear closed form at zero).
pub fn pullin(xi: f64, kappa: f64) -> Result<PullInResult> {
    cubic_pullin(xi, kappa)
}

/// Stagnation position for any admissible `kappa`.
pub fn stagnation(m: &ModelParams) -> Result<f64> {
    cubic_stagnation(m.xi, m.v, m.kappa)
}

/// Factorization for any admissible `kappa`.
pub fn factorization(m: &ModelParams) -> Result<FirstIntegralFactorization> {
    cubic_factorization(m.xi, m.v, m.kappa)
}

/// Regime of the undamped actuator, with the default critical band.
///
/// Damping is ignored: the classification describes the Hamiltonian flow.
pub fn classify_regime(m: &ModelParams) -> Result<RegimeClassification> {
    classify_regime_with_band(m, CRITICAL_BAND)
}

pub fn classify_regime_with_band(m: &ModelParams, band: f64) -> Result<RegimeClassification> {
    m.validate()?;
    if !(band.is_finite() && band >= 0.0) {
        return Err(Error::InvalidParameter(format!("band must be nonnegative, got {band}")));
    }
    let threshold = pullin(m.xi, m.kappa)?;
    let v = m.v;
    let width = band_width(band, threshold.v_dpi);

    let touchdown = |below_pull_in: bool| {
        let a_sq = g_of_x(threshold.x0.min(1.0), m);
        let tc_upper_bound = if a_sq > 0.0 { 2.0 * (m.xi + 1.0).sqrt() / a_sq.sqrt() } else { f64::INFINITY };
        Regime::TouchDown { a_sq, tc_upper_bound, below_pull_in }
    };

    let regime = if v < threshold.v_dpi - width {
        let x_s = stagnation(m)?;
        if x_s < 1.0 {
            Regime::Periodic { x_s }
        } else {
            touchdown(true)
        }
    } else if v <= threshold.v_dpi + width {
        if threshold.x_dpi <= 1.0 {
            Regime::Critical { x_limit: threshold.x_dpi }
        } else {
            touchdown(true)
        }
    } else {
        touchdown(false)
    };
    Ok(RegimeClassification { regime, threshold, v_applied: v })
}

/// Derivatives of the stagnation position, analytic and by finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StagnationSensitivity {
    pub d_kappa: f64,
    pub d_v: f64,
    pub fd_d_kappa: f64,
    pub fd_d_v: f64,
    pub fd_consistent: bool,
}

/// Derivatives of the pull-in position and voltage with respect to `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullInSensitivity {
    pub dx0_dkappa: f64,
    pub dv_dpi_dkappa: f64,
    pub fd_dx0_dkappa: f64,
    pub fd_dv_dpi_dkappa: f64,
    pub fd_consistent: bool,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Derivative by central differences, or forward differences when the
/// parameter sits on its lower bound.
fn finite_difference<F: Fn(f64) -> Result<f64>>(f: F, at: f64, step: f64) -> Result<f64> {
    if at - step >= 0.0 {
        Ok((f(at + step)? - f(at - step)?) / (2.0 * step))
    } else {
        // second-order one-sided
        Ok((-3.0 * f(at)? + 4.0 * f(at + step)? - f(at + 2.0 * step)?) / (2.0 * step))
    }
}

/// `dx1*/dkappa = (xi+1-x1*)(x1*)^3 / (2 g'(x1*))` and
/// `dx1*/dV = -(2V/(xi+1)) / g'(x1*)`, from implicit differentiation of `g(x1*) = 0`.
pub fn stagnation_sensitivities(xi: f64, v: f64, kappa: f64) -> Result<StagnationSensitivity> {
    let x1 = cubic_stagnation(xi, v, kappa)?;
    let s = xi + 1.0;
    let gp = g_of_x_prime(x1, xi, kappa);
    let d_kappa = 0.5 * (s - x1) * x1.powi(3) / gp;
    let d_v = -(2.0 * v / s) / gp;

    let fd_d_kappa = finite_difference(|k| cubic_stagnation(xi, v, k), kappa, FD_STEP)?;
    let fd_d_v = finite_difference(|vv| cubic_stagnation(xi, vv, kappa), v, FD_STEP)?;
    let fd_consistent = rel_close(d_kappa, fd_d_kappa, FD_REL_TOL) && rel_close(d_v, fd_d_v, FD_REL_TOL);
    Ok(StagnationSensitivity { d_kappa, d_v, fd_d_kappa, fd_d_v, fd_consistent })
}

/// Sensitivity of the pull-in threshold to the cubic stiffness.
///
/// `dx0/dkappa = -F_kappa / F_x` with `F = g'`, and
/// `dV*/dkappa = (1/2) sqrt((xi+1)/h(x0)) (xi+1-x0) x0^3 / 2` since `h'(x0) = 0`.
/// `F_kappa` is evaluated directly, which stays regular at `kappa = 0`.
pub fn pullin_sensitivity(xi: f64, kappa: f64) -> Result<PullInSensitivity> {
    let pull = cubic_pullin(xi, kappa)?;
    let s = xi + 1.0;
    let x0 = pull.x0;
    let f_x = g_of_x_second(x0, xi, kappa);
    let f_kappa = 2.0 * x0.powi(3) - 1.5 * s * x0 * x0;
    let dx0_dkappa = -f_kappa / f_x;
    let dv_dpi_dkappa = 0.5 * (s / h_of_x(x0, xi, kappa)).sqrt() * (0.5 * (s - x0) * x0.powi(3));

    let fd_dx0_dkappa = finite_difference(|k| cubic_min_point(xi, k), kappa, FD_STEP)?;
    let fd_dv_dpi_dkappa = finite_difference(|k| cubic_pullin(xi, k).map(|p| p.v_dpi), kappa, FD_STEP)?;
    let fd_consistent =
        rel_close(dx0_dkappa, fd_dx0_dkappa, FD_REL_TOL) && rel_close(dv_dpi_dkappa, fd_dv_dpi_dkappa, FD_REL_TOL);
    Ok(PullInSensitivity { dx0_dkappa, dv_dpi_dkappa, fd_dx0_dkappa, fd_dv_dpi_dkappa, fd_consistent })
}
