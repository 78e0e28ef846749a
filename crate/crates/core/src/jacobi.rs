//! Scalar fields on the catenoid `𝒞ₐ ⊂ Nil(3)` entering the second
//! variation of area, and a finite-difference check of the Jacobi equation
//!
//! ```text
//! J̃u = −(1/D) ∂_t((G/D) ∂_t u) + (k²/G) u − Ṽ u = 0
//! ```
//!
//! for fields `u(t) cos kθ`, written in the twisted parametrisation in which
//! the induced metric is diagonal, `D²/G dt² + G dθ²`.

use crate::error::{require, Error, Result};
use crate::nilgeometry::FrameVector;
use crate::numerics::{minimize_scalar, quad_singular, Singular, Tolerances};
use crate::profile::{boundary_factor, phi_a_integral, CatenoidParams, ProfileCurve, ProfileState};
use serde::{Deserialize, Serialize};

/// `W = (1 + f_t² + ¼ f² f_t²)^(-1/2)`; equals `a/f` on `𝒞ₐ`.
pub fn w_factor(f: f64, f_t: f64) -> f64 {
    1.0 / (1.0 + f_t * f_t * (1.0 + 0.25 * f * f)).sqrt()
}

/// `(G, D)` with `G = f²(1 + f²/4)` and `D = f / W`.
pub fn metric_coeffs(profile: &ProfileCurve, t: f64) -> Result<(f64, f64)> {
    let st = profile.state(t)?;
    Ok(metric_at(&st))
}

fn metric_at(st: &ProfileState) -> (f64, f64) {
    let f = st.f;
    (f * f * (1.0 + 0.25 * f * f), f / w_factor(f, st.f_t))
}

/// Unit normal `N = αX + βY + γZ` at `F(t, θ)`.
pub fn normal_vector(profile: &ProfileCurve, t: f64, theta: f64) -> Result<FrameVector> {
    let st = profile.state(t)?;
    let w = w_factor(st.f, st.f_t);
    let h = 0.5 * st.f * st.f_t;
    let (s, c) = theta.sin_cos();
    Ok(FrameVector::new(w * (-c - h * s), w * (-s + h * c), w * st.f_t))
}

/// Z-component of the normal, `γ = W f_t`.
pub fn gamma(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::Gamma.eval(profile, t)
}

/// The vertical Jacobi field `v_ζ = W f_t`.
pub fn jacobi_v(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::V.eval(profile, t)
}

/// `ẽ(a, τ) = −φ_a(a, τ) ṽ(a, τ)`, the variation field of the family at the
/// height where `f = τ`. Written as `1 − 2 I / (τ B)` with `I` the integral
/// part of `φ_a`, which stays accurate as `τ → a`.
pub fn e_of_tau(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau >= a, "tau", tau, "tau >= a")?;
    if tau == a {
        return Ok(1.0);
    }
    let i = phi_a_integral(a, tau, tol)?;
    Ok(1.0 - 2.0 * i / (tau * boundary_factor(a, tau)))
}

/// Jacobi field `e = W f_a` of the variation in `a`, through the quadrature
/// representation of `φ_a`.
pub fn jacobi_e(profile: &ProfileCurve, t: f64) -> Result<f64> {
    let st = profile.state(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    e_of_tau(profile.params(), st.f.max(profile.a()), profile.tolerances())
}

/// `e = W f_a` with `f_a` from the co-integrated variational equation.
pub fn jacobi_e_variational(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::E.eval(profile, t)
}

/// Phase `ω` of the rotational Jacobi fields, `ω_t = 4f²/(f⁴ + 4a²)`.
pub fn twist_omega(profile: &ProfileCurve, t: f64) -> Result<f64> {
    Ok(profile.state(t)?.omega)
}

/// `Ω(a) = lim ω(a, t)` as `t → ∞`, by quadrature in `u = f(t)`.
pub fn omega_limit(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let integrand = |u: f64| {
        let u2 = u * u;
        u2 * (u2 + 4.0).sqrt() / ((u2 * u2 + 4.0 * a * a) * ((u - a) * (u + a)).sqrt())
    };
    let tol_u = tol.quad_tol / (2.0 * a);
    Ok(2.0 * a * quad_singular(integrand, a, f64::INFINITY, Singular::Lo, tol_u)?)
}

/// Upper bound for `Ω(a) − ω(a, t)` when `f(a, t) = tau`.
pub fn omega_tail_bound(a: f64, tau: f64) -> f64 {
    2.0 * (1.0 + 4.0 / (tau * tau)).sqrt() * (a / tau).min(1.0).asin()
}

/// `Ω₁(b) = ∫₁^∞ √u/√(u−1) · √(u+b)/(u²+b) du`; `Ω(a) = Ω₁(4/a²)`.
pub fn omega1(b: f64, tol: &Tolerances) -> Result<f64> {
    require(b > 0.0, "b", b, "b > 0")?;
    let integrand = |u: f64| (u / (u - 1.0)).sqrt() * (u + b).sqrt() / (u * u + b);
    Ok(quad_singular(
        integrand,
        1.0,
        f64::INFINITY,
        Singular::Lo,
        tol.quad_tol,
    )?)
}

/// Lower estimate `I(b) = ∫₁^∞ √(u+b)/(u²+b) du` of `Ω₁(b)`.
pub fn omega1_lower(b: f64, tol: &Tolerances) -> Result<f64> {
    require(b > 0.0, "b", b, "b > 0")?;
    let integrand = |u: f64| (u + b).sqrt() / (u * u + b);
    Ok(quad_singular(
        integrand,
        1.0,
        f64::INFINITY,
        Singular::None,
        tol.quad_tol,
    )?)
}

/// `Ṽ = 2a²/f⁴ + 2(a²+4)/(4+f²)²` as a function of `f`.
pub fn potential_at(a: f64, f: f64) -> f64 {
    let (f2, q) = (f * f, 4.0 + f * f);
    2.0 * a * a / (f2 * f2) + 2.0 * (a * a + 4.0) / (q * q)
}

/// `GṼ = (a²/2)(4+f²)/f² + ((a²+4)/2) f²/(4+f²)`.
pub fn gv_at(a: f64, f: f64) -> f64 {
    let (f2, q) = (f * f, 4.0 + f * f);
    0.5 * a * a * q / f2 + 0.5 * (a * a + 4.0) * f2 / q
}

/// Sharp bounds `(a√(a²+4), a²+2)` of `GṼ` over the catenoid.
pub fn gv_bounds(a: f64) -> (f64, f64) {
    (a * (a * a + 4.0).sqrt(), a * a + 2.0)
}

pub fn potential_v(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::PotentialV.eval(profile, t)
}

pub fn gv(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::Gv.eval(profile, t)
}

/// `|A|² = Ṽ − Ric(N) = Ṽ + ½ − γ²`.
pub fn second_ff_norm(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::A2.eval(profile, t)
}

/// The closed form `½ − 4/f² + 4(a²+4)/(f²(f²+4)) + 2(a²+4)/(f²+4)²`
/// sometimes quoted for `|A|²`. It differs from [`second_ff_norm`] by
/// exactly `2a²/f⁴`; kept only so the discrepancy can be reported.
pub fn second_ff_norm_quoted(profile: &ProfileCurve, t: f64) -> Result<f64> {
    let f = profile.state(t)?.f;
    let a = profile.a();
    let (f2, q) = (f * f, f * f + 4.0);
    Ok(0.5 - 4.0 / f2 + 4.0 * (a * a + 4.0) / (f2 * q) + 2.0 * (a * a + 4.0) / (q * q))
}

/// Gauss curvature `K = ¼ − γ² − ½|A|²`.
pub fn gauss_curvature(profile: &ProfileCurve, t: f64) -> Result<f64> {
    RadialScalar::GaussK.eval(profile, t)
}

/// `W₁ = (1/f) √((4a² + f⁴)/(4 + f²))`.
pub fn w1_at(a: f64, f: f64) -> f64 {
    let f2 = f * f;
    ((4.0 * a * a + f2 * f2) / (4.0 + f2)).sqrt() / f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Radial fields on `𝒞ₐ`, all evaluated from the profile state at one `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialScalar {
    Gamma,
    V,
    /// `e = W f_a` (variational route).
    E,
    Omega,
    PotentialV,
    Gv,
    A2,
    W,
    W1,
    GaussK,
}

impl RadialScalar {
    pub const ALL: [RadialScalar; 10] = [
        Self::Gamma,
        Self::V,
        Self::E,
        Self::Omega,
        Self::PotentialV,
        Self::Gv,
        Self::A2,
        Self::W,
        Self::W1,
        Self::GaussK,
    ];

    pub fn parity(self) -> Parity {
        match self {
            Self::Gamma | Self::V | Self::Omega => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn eval(self, profile: &ProfileCurve, t: f64) -> Result<f64> {
        Ok(self.at_state(profile.a(), &profile.state(t)?))
    }

    pub fn at_state(self, a: f64, st: &ProfileState) -> f64 {
        let w = w_factor(st.f, st.f_t);
        let g = w * st.f_t;
        let a2 = || potential_at(a, st.f) + 0.5 - g * g;
        match self {
            Self::Gamma | Self::V => g,
            Self::E => w * st.f_a,
            Self::Omega => st.omega,
            Self::PotentialV => potential_at(a, st.f),
            Self::Gv => gv_at(a, st.f),
            Self::A2 => a2(),
            Self::W => w,
            Self::W1 => w * (1.0 + 0.25 * st.f * st.f * st.f_t * st.f_t).sqrt(),
            Self::GaussK => 0.25 - g * g - 0.5 * a2(),
        }
    }
}

/// One of the four bounded Jacobi fields `w₁ … w₄` built from the
/// rotational Killing fields: `W₁ cos ω` or `W₁ sin ω`, times `cos θ` or
/// `sin θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularJacobi {
    pub sine_phase: bool,
    pub sine_angle: bool,
}

impl AngularJacobi {
    pub const W1: Self = Self {
        sine_phase: false,
        sine_angle: false,
    };
    pub const W2: Self = Self {
        sine_phase: false,
        sine_angle: true,
    };
    pub const W3: Self = Self {
        sine_phase: true,
        sine_angle: false,
    };
    pub const W4: Self = Self {
        sine_phase: true,
        sine_angle: true,
    };

    pub const MODE: u32 = 1;

    pub fn radial_at(self, st: &ProfileState) -> f64 {
        let w1 = RadialScalar::W1.at_state(0.0, st);
        w1 * if self.sine_phase {
            st.omega.sin()
        } else {
            st.omega.cos()
        }
    }

    pub fn radial(self, profile: &ProfileCurve, t: f64) -> Result<f64> {
        Ok(self.radial_at(&profile.state(t)?))
    }

    pub fn eval(self, profile: &ProfileCurve, t: f64, theta: f64) -> Result<f64> {
        let ang = if self.sine_angle { theta.sin() } else { theta.cos() };
        Ok(self.radial(profile, t)? * ang)
    }
}

/// A candidate Jacobi field for [`jacobi_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobiCandidate {
    Radial(RadialScalar),
    Angular(AngularJacobi),
}

impl JacobiCandidate {
    fn at_state(self, a: f64, st: &ProfileState) -> f64 {
        match self {
            Self::Radial(r) => r.at_state(a, st),
            Self::Angular(w) => w.radial_at(st),
        }
    }
}

/// Default grid spacing of [`jacobi_residual`].
pub const RESIDUAL_STEP: f64 = 1e-3;

/// `max |J̃_k u|` over the interior of the uniform grid of spacing `h` on
/// `[−half_width, half_width]`, using the conservative centred stencil
/// `((G/D)_{i+½}(u_{i+1}−u_i) − (G/D)_{i−½}(u_i−u_{i−1})) / (D_i h²)`.
pub fn jacobi_residual(u: JacobiCandidate, profile: &ProfileCurve, k: u32, h: f64, half_width: f64) -> Result<f64> {
    let states = profile.sample_uniform(h, half_width)?;
    if states.len() < 5 {
        return Err(Error::GridTooCoarse { points: states.len() });
    }
    let a = profile.a();
    let vals: Vec<f64> = states.iter().map(|s| u.at_state(a, s)).collect();
    let coef: Vec<(f64, f64)> = states.iter().map(metric_at).collect();
    let k2 = (k * k) as f64;
    let mut worst = 0.0f64;
    for i in 1..states.len() - 1 {
        let (g, d) = coef[i];
        let flux = |j: usize| 0.5 * (coef[j].0 / coef[j].1 + coef[j + 1].0 / coef[j + 1].1) * (vals[j + 1] - vals[j]);
        let lu = -(flux(i) - flux(i - 1)) / (d * h * h);
        let r = lu + (k2 / g - potential_at(a, states[i].f)) * vals[i];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `γ` as a function of `f ≥ a` on `𝒞ₐ`: `2√(f²−a²)/(f√(f²+4))`.
pub fn gamma_of_f(a: f64, f: f64) -> f64 {
    2.0 * ((f - a) * (f + a)).max(0.0).sqrt() / (f * (f * f + 4.0).sqrt())
}

/// Half-width `max_t γ(t)` of the band of latitudes covered by the Gauss map.
pub fn gauss_strip_halfwidth(params: CatenoidParams) -> f64 {
    let a = params.a();
    // the maximiser f² = a² + a√(a²+4) lies below 2a² + 2a
    let hi = 2.0 * (2.0 * a * a + 2.0 * a).sqrt() + 1.0;
    let (_, neg) = minimize_scalar(|f| -gamma_of_f(a, f), a, hi, 1e-10 * hi);
    -neg
}

/// Closed form of [`gauss_strip_halfwidth`].
pub fn gauss_strip_halfwidth_exact(a: f64) -> f64 {
    gamma_of_f(a, (a * a + a * (a * a + 4.0).sqrt()).sqrt())
}
