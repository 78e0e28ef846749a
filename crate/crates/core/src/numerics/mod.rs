//! Numeric kernels shared by every geometric module: an adaptive
//! Dormand–Prince integrator with dense output, Gauss–Kronrod quadrature
//! with automatic removal of inverse-square-root endpoint singularities,
//! and bracketed scalar root finding / minimisation.
//!
//! Everything here is a pure function of its inputs.

pub mod ode;
pub mod quad;
pub mod root;

pub use ode::{integrate_ode, integrate_ode_until, integrate_uniform, OdeError, Trajectory};
pub use quad::{quad, quad_singular, QuadError, Singular};
pub use root::{find_root, minimize_scalar, RootError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance bundle threaded through every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative local error per ODE step.
    pub ode_rel: f64,
    /// Absolute local error per ODE step.
    pub ode_abs: f64,
    /// Absolute quadrature error.
    pub quad_tol: f64,
    /// Width of the final root bracket.
    pub root_tol: f64,
    /// Threshold used when deciding whether a value is "zero".
    pub zero_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode_rel: 1e-10,
            ode_abs: 1e-10,
            quad_tol: 1e-10,
            root_tol: 1e-10,
            zero_eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("tolerance `{name}` must be strictly positive and finite, got {value}")]
pub struct InvalidTolerance {
    pub name: &'static str,
    pub value: f64,
}

impl Tolerances {
    pub fn new(
        ode_rel: f64,
        ode_abs: f64,
        quad_tol: f64,
        root_tol: f64,
        zero_eps: f64,
    ) -> Result<Self, InvalidTolerance> {
        let tol = Self {
            ode_rel,
            ode_abs,
            quad_tol,
            root_tol,
            zero_eps,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), InvalidTolerance> {
        let fields = [
            ("ode_rel", self.ode_rel),
            ("ode_abs", self.ode_abs),
            ("quad_tol", self.quad_tol),
            ("root_tol", self.root_tol),
            ("zero_eps", self.zero_eps),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    /// Same bundle with the ODE and quadrature tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            ode_rel: self.ode_rel * factor,
            ode_abs: self.ode_abs * factor,
            quad_tol: self.quad_tol * factor,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let t = Tolerances::default();
        assert_eq!(t.ode_rel, 1e-10);
        assert_eq!(t.ode_abs, 1e-10);
        assert_eq!(t.quad_tol, 1e-10);
        assert_eq!(t.root_tol, 1e-10);
        assert_eq!(t.zero_eps, 1e-8);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn rejects_non_positive_fields() {
        let err = Tolerances::new(1e-10, 0.0, 1e-10, 1e-10, 1e-8).unwrap_err();
        assert_eq!(err.name, "ode_abs");
        assert!(Tolerances::new(1e-10, 1e-10, f64::NAN, 1e-10, 1e-8).is_err());
        assert!(Tolerances::new(1e-10, 1e-10, 1e-10, -1.0, 1e-8).is_err());
    }
}
