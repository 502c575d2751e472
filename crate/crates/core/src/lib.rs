//! Dynamics of an electrostatic parallel-plate actuator with a dielectric
//! coating, in normalized units.
//!
//! The movable electrode obeys
//!
//! ```text
//! x'' + mu x' + x + kappa x^3 = V^2 / (2 (xi + 1 - x)^2),   x(0) = x'(0) = 0
//! ```
//!
//! where `xi` is the normalized coating thickness, `V` the normalized
//! voltage and `kappa` the cubic stiffness. Contact happens at `x = 1`.
//!
//! * [`model`]: parameters, normalization from SI units, energy and force.
//! * [`analysis`]: pull-in threshold, stagnation position, regime
//!   classification and sensitivities.
//! * [`quadrature`]: stagnation time, period and contact time, plus closed
//!   form bounds on them.
//! * [`dynamics`]: time integration with event detection, and the generic
//!   damped touch-down model.
//!
//! ```
//! use pullin_dyn::{analysis, quadrature, model::ModelParams};
//!
//! let pull = analysis::pullin(0.0, 0.0).unwrap();
//! assert_eq!((pull.v_dpi, pull.x_dpi), (0.5, 0.5));
//!
//! let m = ModelParams::linear(0.0, 0.4);
//! assert!((analysis::stagnation(&m).unwrap() - 0.2).abs() < 1e-15);
//! let times = quadrature::period_by_quadrature(&m).unwrap();
//! assert!(times.t_s < times.ts_bound.unwrap());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
