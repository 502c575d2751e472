use proptest::prelude::*;

use pullin_dyn::analysis::{self, Regime};
use pullin_dyn::dynamics::{integrate, EventKind, IntegratorConfig};
use pullin_dyn::model::{self, convexity_bound, ModelParams, PhaseState, PhysicalParams};
use pullin_dyn::quadrature;

/// `(xi, kappa, V)` with `V` a fraction of the pull-in voltage.
fn subcritical() -> impl Strategy<Value = ModelParams> {
    (0.0..1.0f64, 0.0..0.95f64, 0.05..0.95f64).prop_map(|(xi, kf, vf)| {
        let kappa = kf * convexity_bound(xi);
        let v = vf * analysis::pullin(xi, kappa).unwrap().v_dpi;
        ModelParams::cubic(xi, v, kappa)
    })
}

fn supercritical() -> impl Strategy<Value = ModelParams> {
    (0.0..1.0f64, 0.0..0.95f64, 1.02..2.0f64).prop_map(|(xi, kf, vf)| {
        let kappa = kf * convexity_bound(xi);
        let v = vf * analysis::pullin(xi, kappa).unwrap().v_dpi;
        ModelParams::cubic(xi, v, kappa)
    })
}

proptest! {
    #[test]
    fn linear_roots_satisfy_vieta(xi in 0.0..5.0f64, vf in 0.0..1.0f64) {
        let s = xi + 1.0;
        let v = vf * analysis::pullin_linear(xi).v_dpi;
        let f = analysis::linear_factorization(xi, v).unwrap();
        prop_assert!((f.x1 + f.x2 - s).abs() <= 1e-13 * s);
        prop_assert!((f.x1 * f.x2 - v * v / s).abs() <= 1e-13 * s * s);
        prop_assert!(f.x1 <= f.x2);
    }

    #[test]
    fn cubic_factorization_rebuilds_g(m in subcritical(), u in 0.0..1.0f64) {
        let f = analysis::factorization(&m).unwrap();
        let x = u * (m.xi + 1.0);
        let scale = 1.0 + model::g_of_x(x, &m).abs();
        prop_assert!((f.g(x) - model::g_of_x(x, &m)).abs() <= 1e-11 * scale);
        prop_assert!(f.q_min_on(0.0, f.x1) > 0.0);
        prop_assert!(f.x1 < f.x2);
    }

    #[test]
    fn first_integral_is_energy(m in subcritical(), u in 0.0..0.999f64) {
        let x = u * (m.xi + 1.0).min(1.0);
        let h0 = model::hamiltonian(&PhaseState::REST, &m).unwrap();
        let hx = model::hamiltonian(&PhaseState::new(0.0, x, 0.0), &m).unwrap();
        let rhs = model::first_integral_rhs(x, &m).unwrap();
        prop_assert!((rhs + 2.0 * (hx - h0)).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn voltage_scales_linearly(volts in 0.1..100.0f64, factor in 0.1..10.0f64) {
        let p = PhysicalParams {
            mass: 1e-9, spring_k: 2.0, spring_k3: 5e10, area: 1e-8, eps0: model::VACUUM_PERMITTIVITY,
            eps_r: 7.5, d0: 1e-7, gap: 2e-6, voltage: volts,
        };
        let a = model::normalize_physical(&p).unwrap();
        let b = model::normalize_physical(&PhysicalParams { voltage: volts * factor, ..p }).unwrap();
        prop_assert!((b.v - factor * a.v).abs() <= 1e-12 * b.v);
        prop_assert_eq!(a.xi, b.xi);
        prop_assert_eq!(a.kappa, b.kappa);
    }

    #[test]
    fn zero_kappa_matches_linear(xi in 0.0..3.0f64, vf in 0.01..0.99f64) {
        let v = vf * analysis::pullin_linear(xi).v_dpi;
        let lin = analysis::linear_factorization(xi, v).unwrap();
        let cub = analysis::cubic_factorization(xi, v, 0.0).unwrap();
        prop_assert_eq!(lin, cub);
        prop_assert_eq!(analysis::cubic_pullin(xi, 0.0).unwrap(), analysis::pullin_linear(xi));
    }

    #[test]
    fn linear_period_grows_with_voltage(xi in 0.0..1.0f64, a in 0.05..0.95f64, b in 0.05..0.95f64) {
        prop_assume!((a - b).abs() > 1e-3);
        let vd = analysis::pullin_linear(xi).v_dpi;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t_lo = quadrature::period_by_quadrature(&ModelParams::linear(xi, lo * vd)).unwrap().t_p;
        let t_hi = quadrature::period_by_quadrature(&ModelParams::linear(xi, hi * vd)).unwrap().t_p;
        prop_assert!(t_lo < t_hi);
    }

    #[test]
    fn stagnation_time_below_bound(m in subcritical()) {
        let t = quadrature::period_by_quadrature(&m).unwrap();
        prop_assert!(t.t_s <= t.ts_bound.unwrap());
        prop_assert!(t.t1_bound.unwrap() < t.ts_bound.unwrap());
    }

    #[test]
    fn contact_time_below_bound(m in supercritical()) {
        let tc = quadrature::contact_time_by_quadrature(&m).unwrap();
        let bound = quadrature::analytic_bounds(&m).unwrap().tc_bound.unwrap();
        prop_assert!(tc > 0.0 && tc <= bound);
    }

    #[test]
    fn classification_is_consistent(xi in 0.0..2.0f64, kf in 0.0..0.95f64, vf in 0.0..2.0f64) {
        let kappa = kf * convexity_bound(xi);
        let pull = analysis::pullin(xi, kappa).unwrap();
        let m = ModelParams::cubic(xi, vf * pull.v_dpi, kappa);
        let class = analysis::classify_regime(&m).unwrap();
        match class.regime {
            Regime::Periodic { x_s } => {
                prop_assert!(vf < 1.0);
                prop_assert!(x_s < 1.0 && x_s <= pull.x0);
            }
            Regime::Critical { .. } => prop_assert!((vf - 1.0).abs() <= 1e-12),
            Regime::TouchDown { a_sq, .. } => prop_assert!(vf > 1.0 || pull.x0 > 1.0 || a_sq > 0.0),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn undamped_orbits_conserve_and_stay_bounded(m in subcritical()) {
        let cfg = IntegratorConfig { t_max: 12.0, sample_every: 10, ..Default::default() };
        let tr = integrate(&m, &cfg).unwrap();
        let x_s = analysis::stagnation(&m).unwrap();
        prop_assert!(tr.energy_drift.unwrap() <= 1e-8);
        prop_assert!(tr.first_integral_residual.unwrap() <= 1e-8);
        prop_assert!(tr.max_x() <= x_s + 1e-8);
        prop_assert!(tr.min_x() >= -1e-12);
        prop_assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
        let stag = tr.first_event(EventKind::Stagnation).unwrap();
        prop_assert!((stag.x - x_s).abs() <= 1e-8);
    }

    #[test]
    fn touchdown_is_monotone(m in supercritical()) {
        let tr = integrate(&m, &IntegratorConfig { sample_every: 5, ..Default::default() }).unwrap();
        prop_assert!(tr.touchdown_time().is_some());
        prop_assert!(tr.samples[1..].iter().all(|p| p.v > 0.0));
        prop_assert!(tr.samples.iter().all(|p| (0.0..=1.0).contains(&p.x)));
    }
}

/// A strongly hardening spring shortens the period as the amplitude grows,
/// so the period is not monotone in the voltage once `kappa` is large.
#[test]
fn stiff_cubic_period_is_not_monotone() {
    let kappa = 0.86 * convexity_bound(0.0);
    let vd = analysis::pullin(0.0, kappa).unwrap().v_dpi;
    let t = |f: f64| quadrature::period_by_quadrature(&ModelParams::cubic(0.0, f * vd, kappa)).unwrap().t_p;
    assert!(t(0.39) > t(0.82));
    assert!(t(0.999) > t(0.39));
}
