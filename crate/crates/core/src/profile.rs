//! Generating curve `t ↦ (f(a,t), t)` of the catenoid `𝒞ₐ ⊂ Nil(3)`.
//!
//! Two independent routes are provided. [`solve_profile`] integrates the
//! Cauchy problem
//!
//! ```text
//! f (f² + 4) f_tt = 4 (1 + f_t²),   f(0) = a,   f_t(0) = 0
//! ```
//!
//! while [`phi`] evaluates the inverse function `τ ↦ t` by quadrature of the
//! first integral `(f²+4)(1+f_t²)/f² = (a²+4)/a²`.
//!
//! The ODE state also carries the quantities that later modules need at
//! every dense-output point: the compactifying coordinate `s`, the
//! orthogonalising twist `φ_t = 2/(4+f²)`, the phase `ω` of the rotational
//! Jacobi fields and the variation `f_a` with respect to the neck radius.

use crate::error::{require, Error, Result};
use crate::numerics::{self, quad_singular, Singular, Tolerances, Trajectory};
use serde::{Deserialize, Serialize};

/// Neck radius `a` and dimension index `n` of `𝒞ₐ ⊂ Nil(2n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidParams {
    a: f64,
    n: u32,
}

impl CatenoidParams {
    pub fn new(a: f64, n: u32) -> Result<Self> {
        require(a.is_finite() && a > 0.0, "a", a, "a > 0")?;
        require(n >= 1, "n", n as f64, "n >= 1")?;
        Ok(Self { a, n })
    }

    /// Catenoid in `Nil(3)`.
    pub fn surface(a: f64) -> Result<Self> {
        Self::new(a, 1)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

// state layout
const F: usize = 0;
const FT: usize = 1;
const S: usize = 2;
const TWIST: usize = 3;
const OMEGA: usize = 4;
const FA: usize = 5;
const FTA: usize = 6;
const DIM: usize = 7;

/// Everything known about the profile at one value of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileState {
    pub t: f64,
    pub f: f64,
    pub f_t: f64,
    /// Compactifying coordinate, `s_t = 4 / (a (4 + f²))`.
    pub s: f64,
    /// Orthogonalising twist, `φ_t = 2 / (4 + f²)`.
    pub twist: f64,
    /// Phase of the rotational Jacobi fields, `ω_t = 4f² / (f⁴ + 4a²)`.
    pub omega: f64,
    /// `∂f/∂a`.
    pub f_a: f64,
    /// `∂f_t/∂a`.
    pub f_ta: f64,
}

impl ProfileState {
    fn from_raw(t: f64, y: &[f64; DIM]) -> Self {
        Self {
            t,
            f: y[F],
            f_t: y[FT],
            s: y[S],
            twist: y[TWIST],
            omega: y[OMEGA],
            f_a: y[FA],
            f_ta: y[FTA],
        }
    }

    // f, f_a even; everything else odd
    fn reflected(self) -> Self {
        Self {
            t: -self.t,
            f_t: -self.f_t,
            s: -self.s,
            twist: -self.twist,
            omega: -self.omega,
            f_ta: -self.f_ta,
            ..self
        }
    }
}

/// Right-hand side of the profile system, augmented with the co-integrated
/// fields and the variational equation in `a`.
fn rhs(a: f64) -> impl Fn(f64, &[f64; DIM]) -> [f64; DIM] {
    move |_t, y| {
        let (f, p) = (y[F], y[FT]);
        let f2 = f * f;
        let q = 4.0 + f2;
        let acc = 4.0 * (1.0 + p * p) / (f * q);
        // linearisation of acc in (f, p)
        let d_f = -4.0 * (1.0 + p * p) * (4.0 + 3.0 * f2) / (f2 * q * q);
        let d_p = 8.0 * p / (f * q);
        [
            p,
            acc,
            4.0 / (a * q),
            2.0 / q,
            4.0 * f2 / (f2 * f2 + 4.0 * a * a),
            y[FTA],
            d_f * y[FA] + d_p * y[FTA],
        ]
    }
}

fn initial_state(a: f64) -> [f64; DIM] {
    // f(a, 0) = a for every a, hence f_a(0) = 1
    [a, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]
}

/// Default half-height of the constructed profile.
pub fn default_t_max(a: f64) -> f64 {
    40.0 / a
}

/// Immutable, evaluable generating curve on `[-t_max, t_max]`.
///
/// Only `t ≥ 0` is integrated; negative `t` is obtained by the exact
/// even/odd reflection, so the parity identities hold bit for bit.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    params: CatenoidParams,
    t_max: f64,
    tol: Tolerances,
    traj: Trajectory<DIM>,
}

pub(crate) const GLOBAL_SAFETY: f64 = 0.1;

pub fn solve_profile(params: CatenoidParams, t_max: Option<f64>, tol: &Tolerances) -> Result<ProfileCurve> {
    tol.validate()?;
    require(params.n() == 1, "n", params.n() as f64, "n = 1 for surfaces in Nil(3)")?;
    let a = params.a();
    let t_max = t_max.unwrap_or_else(|| default_t_max(a));
    require(t_max.is_finite() && t_max > 0.0, "t_max", t_max, "t_max > 0")?;
    // local control at `tol` lets the conserved quantity drift by a few
    // multiples of it over long spans
    let ode_tol = tol.tightened(GLOBAL_SAFETY);
    let traj = numerics::integrate_ode(rhs(a), initial_state(a), (0.0, t_max), &ode_tol)?;
    Ok(ProfileCurve {
        params,
        t_max,
        tol: *tol,
        traj,
    })
}

impl ProfileCurve {
    pub fn params(&self) -> CatenoidParams {
        self.params
    }

    pub fn a(&self) -> f64 {
        self.params.a()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn state(&self, t: f64) -> Result<ProfileState> {
        let y = self
            .traj
            .eval(t.abs())
            .ok_or(Error::OutOfRange { t, t_max: self.t_max })?;
        let st = ProfileState::from_raw(t.abs(), &y);
        Ok(if t < 0.0 { st.reflected() } else { st })
    }

    /// `(f, f_t)` at `t` from the dense ODE output.
    pub fn eval_f(&self, t: f64) -> Result<(f64, f64)> {
        let st = self.state(t)?;
        Ok((st.f, st.f_t))
    }

    /// `(f²+4)(1+f_t²)/f² − (a²+4)/a²` along the integrated curve.
    pub fn first_integral_residual(&self, t: f64) -> Result<f64> {
        let (f, p) = self.eval_f(t)?;
        Ok(first_integral(f, p) - first_integral(self.a(), 0.0))
    }

    /// Flux constant `f (4 + f² f_t² + 4 f_t²)^(-1/2)`, equal to `a/2`.
    pub fn flux_constant(&self, t: f64) -> Result<f64> {
        let (f, p) = self.eval_f(t)?;
        Ok(f / (4.0 + f * f * p * p + 4.0 * p * p).sqrt())
    }

    /// States on the uniform grid `t = i h`, `|i| ≤ ⌊half_width / h⌋`,
    /// produced by fixed-step integration so that the sampling error is a
    /// smooth function of `t`.
    pub fn sample_uniform(&self, h: f64, half_width: f64) -> Result<Vec<ProfileState>> {
        require(h.is_finite() && h > 0.0, "h", h, "h > 0")?;
        let n = (half_width / h).floor() as usize;
        require(
            half_width <= self.t_max,
            "half_width",
            half_width,
            "half_width <= t_max",
        )?;
        // substeps keep the per-step error well below the grid resolution
        let substeps = (h / 2.5e-4).ceil().max(1.0) as usize;
        let ys = numerics::integrate_uniform(rhs(self.a()), initial_state(self.a()), 0.0, h, n, substeps)?;
        let pos: Vec<ProfileState> = ys
            .iter()
            .enumerate()
            .map(|(i, y)| ProfileState::from_raw(i as f64 * h, y))
            .collect();
        let mut out: Vec<ProfileState> = pos[1..].iter().rev().map(|s| s.reflected()).collect();
        out.extend(pos);
        Ok(out)
    }
}

/// Left-hand side of the first integral, `(f²+4)(1+f_t²)/f²`.
pub fn first_integral(f: f64, f_t: f64) -> f64 {
    (f * f + 4.0) * (1.0 + f_t * f_t) / (f * f)
}

/// `|f_t|` recovered from `f` through the first integral:
/// `2 √(f²−a²) / (a √(f²+4))`.
pub fn slope_from_first_integral(a: f64, f: f64) -> f64 {
    2.0 * ((f - a) * (f + a)).max(0.0).sqrt() / (a * (f * f + 4.0).sqrt())
}

/// Inverse function `φ(a, τ)` of `f(a, ·)` on `[0, ∞)`:
/// `(a/2) ∫₁^{τ/a} √((a²v²+4)/(v²−1)) dv`.
pub fn phi(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau >= a, "tau", tau, "tau >= a")?;
    if tau == a {
        return Ok(0.0);
    }
    let integrand = |v: f64| ((a * a * v * v + 4.0) / ((v - 1.0) * (v + 1.0))).sqrt();
    let tol_v = tol.quad_tol * 2.0 / a;
    Ok(0.5 * a * quad_singular(integrand, 1.0, tau / a, Singular::Lo, tol_v)?)
}

/// `∂φ/∂τ = (a/2) √((τ²+4)/(τ²−a²))`.
pub fn phi_tau(a: f64, tau: f64) -> f64 {
    0.5 * a * ((tau * tau + 4.0) / ((tau - a) * (tau + a))).sqrt()
}

/// The integral part of `φ_a`: `∫₁^{τ/a} (a²v²+2)/√((a²v²+4)(v²−1)) dv`.
pub(crate) fn phi_a_integral(a: f64, tau: f64, tol: &Tolerances) -> Result<f64> {
    let integrand = |v: f64| {
        let av2 = a * a * v * v;
        (av2 + 2.0) / ((av2 + 4.0) * (v - 1.0) * (v + 1.0)).sqrt()
    };
    Ok(quad_singular(integrand, 1.0, tau / a, Singular::Lo, tol.quad_tol)?)
}

/// Boundary factor `B = √((τ²+4)/(τ²−a²))`, so that `φ_τ = aB/2`.
pub(crate) fn boundary_factor(a: f64, tau: f64) -> f64 {
    ((tau * tau + 4.0) / ((tau - a) * (tau + a))).sqrt()
}

/// `∂φ/∂a(a, τ)`; tends to `−∞` as `τ → a⁺` and to `+∞` as `τ → ∞`.
pub fn phi_a(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau > a, "tau", tau, "tau > a")?;
    Ok(phi_a_integral(a, tau, tol)? - 0.5 * tau * boundary_factor(a, tau))
}

/// Solves `φ(a, τ) = t` for `τ ≥ a`, i.e. evaluates `f(a, |t|)` through the
/// quadrature route.
pub fn tau_of_t(params: CatenoidParams, t: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let t = t.abs();
    if t == 0.0 {
        return Ok(a);
    }
    // f_t < 2/a everywhere, so f(a,t) < a + 2t/a
    let mut hi = a + 2.0 * t / a + 1.0;
    let g = |tau: f64| phi(params, tau, tol).map(|v| v - t);
    let mut tries = 0;
    while g(hi)? < 0.0 {
        hi = a + 2.0 * (hi - a);
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket { what: "tau(t)" });
        }
    }
    let root_tol = tol.root_tol.min(1e-12 * hi.max(1.0));
    let mut failure = None;
    let root = numerics::find_root(
        |tau| match g(tau) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        a,
        hi,
        root_tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}
