//! Rotationally invariant stable domains `𝒟ₐ(t₁, t₂) = F([t₁, t₂] × S¹)`.
//!
//! Every boundary is located in the variable `τ = f(a, t)` through the sign
//! of `φ_a(a, τ)` and mapped back to heights with `φ`.

use crate::error::{require, Error, Result};
use crate::jacobi::RadialScalar;
use crate::numerics::{find_root, Tolerances};
use crate::profile::{phi, phi_a, tau_of_t, CatenoidParams, ProfileCurve};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Stable,
    StableUnstable,
    Unstable,
}

/// The Jacobi field whose sign pattern justifies a classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum Certificate {
    /// `v_ζ`, positive on the upper half and negative on the lower half.
    Vertical,
    /// `w(a, t₁, ·) = v(t₁) e + e(t₁) v`, vanishing at `−t₁` and at the
    /// companion height.
    Companion { t1: f64, companion: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub t1: f64,
    pub t2: f64,
    pub classification: Classification,
    pub basis: Certificate,
}

fn surface_only(params: CatenoidParams) -> Result<()> {
    require(params.n() == 1, "n", params.n() as f64, "n = 1")
}

/// Smallest `τ > a` with `φ_a(a, τ) < target`, approached geometrically.
fn lower_bracket(params: CatenoidParams, target: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let mut d = 0.5;
    for _ in 0..200 {
        let tau = a * (1.0 + d);
        if phi_a(params, tau, tol)? < target {
            return Ok(tau);
        }
        d *= 0.25;
    }
    Err(Error::Bracket {
        what: "phi_a lower end",
    })
}

/// Some `τ` with `φ_a(a, τ) > target`.
fn upper_bracket(params: CatenoidParams, target: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let mut tau = 2.0 * a + 1.0;
    for _ in 0..200 {
        if phi_a(params, tau, tol)? > target {
            return Ok(tau);
        }
        tau *= 2.0;
    }
    Err(Error::Bracket {
        what: "phi_a upper end",
    })
}

/// `τ` with `φ_a(a, τ) = target`; `φ_a(a, ·)` increases from `−∞` to `+∞`.
pub fn solve_phi_a(params: CatenoidParams, target: f64, tol: &Tolerances) -> Result<f64> {
    let lo = lower_bracket(params, target, tol)?;
    let hi = upper_bracket(params, target, tol)?;
    let mut failure = None;
    let root = find_root(
        |tau| match phi_a(params, tau, tol) {
            Ok(v) => v - target,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol.root_tol.min(1e-13 * hi),
    );
    match (root, failure) {
        (_, Some(e)) => Err(e),
        (r, None) => Ok(r?),
    }
}

/// Zero `τ*(a)` of `φ_a(a, ·)`, i.e. `f(a, z(a))`.
pub fn conjugate_tau(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    surface_only(params)?;
    solve_phi_a(params, 0.0, tol)
}

/// The conjugate height `z(a) > 0`, unique positive zero of `e(a, ·)`.
pub fn conjugate_value(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let tau = conjugate_tau(params, tol)?;
    phi(params, tau, tol)
}

/// Height `t₂ > 0` such that `𝒟ₐ(−t₁, t₂)` is stable-unstable.
pub fn companion_boundary(params: CatenoidParams, t1: f64, tol: &Tolerances) -> Result<f64> {
    surface_only(params)?;
    require(t1 > 0.0 && t1.is_finite(), "t1", t1, "t1 > 0")?;
    let tau1 = tau_of_t(params, t1, tol)?;
    let tau2 = solve_phi_a(params, -phi_a(params, tau1, tol)?, tol)?;
    phi(params, tau2, tol)
}

/// `w(a, t₁, t) = v(t₁) e(t) + e(t₁) v(t)`, from the co-integrated profile.
pub fn companion_field(profile: &ProfileCurve, t1: f64, t: f64) -> Result<f64> {
    let v = |t| RadialScalar::V.eval(profile, t);
    let e = |t| RadialScalar::E.eval(profile, t);
    Ok(v(t1)? * e(t)? + e(t1)? * v(t)?)
}

/// Classifies `𝒟ₐ(t₁, t₂)`. Domains inside a closed half-catenoid are
/// stable; a domain across the neck is compared with the companion of
/// `−t₁`, with `|t₂ − companion| ≤ zero_eps · max(1, t₂)` counted as
/// stable-unstable.
pub fn classify_domain(params: CatenoidParams, t1: f64, t2: f64, tol: &Tolerances) -> Result<DomainSpec> {
    require(t1 < t2, "t2", t2, "t1 < t2")?;
    require(t1.is_finite() && t2.is_finite(), "t1", t1, "finite bounds")?;
    if t1 >= 0.0 || t2 <= 0.0 {
        return Ok(DomainSpec {
            t1,
            t2,
            classification: Classification::Stable,
            basis: Certificate::Vertical,
        });
    }
    let companion = companion_boundary(params, -t1, tol)?;
    let classification = if (t2 - companion).abs() <= tol.zero_eps * t2.max(1.0) {
        Classification::StableUnstable
    } else if t2 < companion {
        Classification::Stable
    } else {
        Classification::Unstable
    };
    Ok(DomainSpec {
        t1,
        t2,
        classification,
        basis: Certificate::Companion { t1: -t1, companion },
    })
}
