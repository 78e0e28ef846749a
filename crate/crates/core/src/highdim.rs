//! Rotational minimal hypersurfaces `(t, θ) ↦ (f(t) θ, t)`, `θ ∈ S^{2n−1}`,
//! of `Nil(2n+1)`. The profile solves
//!
//! ```text
//! f (4 + f²) f_tt = 4(2n−1)(1 + f_t²) + (2n−2) f² f_t²
//! ```
//!
//! with first integral `f^{2n−1} (4 + 4f_t² + f² f_t²)^{−1/2} = a^{2n−1}/2`.
//! For `n ≥ 2` the solution escapes to infinity at a finite height `T(a)`,
//! and `φ_a(a, ·)` has a finite positive limit `Λ(a)`, which is why a
//! companion boundary need not exist.

use crate::error::{require, Error, Result};
use crate::numerics::{self, find_root, quad_singular, Singular, Tolerances, Trajectory};
use crate::profile::{self, CatenoidParams, GLOBAL_SAFETY};
use serde::Serialize;

/// Profile state with `f`, `f_t`, `f_a`, `f_ta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighDimState {
    pub t: f64,
    pub f: f64,
    pub f_t: f64,
    pub f_a: f64,
    pub f_ta: f64,
}

/// Height at which the ODE is stopped and the remaining escape time is
/// taken from the asymptotic tail.
pub const ESCAPE_F: f64 = 1e3;

fn m_of(n: u32) -> i32 {
    4 * n as i32 - 2
}

/// `(v^m − 1)/(v − 1) = 1 + v + … + v^{m−1}`, free of cancellation near 1.
fn geometric(v: f64, m: i32) -> f64 {
    (0..m).fold(0.0, |acc, _| acc * v + 1.0)
}

fn rhs(n: u32) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let (c1, c2) = (4.0 * (2 * n - 1) as f64, (2 * n - 2) as f64);
    move |_t, y| {
        let (f, p) = (y[0], y[1]);
        let f2 = f * f;
        let num = c1 * (1.0 + p * p) + c2 * f2 * p * p;
        let den = f * (4.0 + f2);
        let d_f = (2.0 * c2 * f * p * p * den - num * (4.0 + 3.0 * f2)) / (den * den);
        let d_p = (2.0 * c1 * p + 2.0 * c2 * f2 * p) / den;
        [p, num / den, y[3], d_f * y[2] + d_p * y[3]]
    }
}

/// `(a^{2n−1}/2) (4 + 4f_t² + f² f_t²)^{1/2} / f^{2n−1} − 1`; vanishes on
/// the catenoid.
pub fn first_integral_defect(params: CatenoidParams, f: f64, f_t: f64) -> f64 {
    let e = (2 * params.n() - 1) as i32;
    let lhs = 2.0 * (f / params.a()).powi(e) / (4.0 + f_t * f_t * (4.0 + f * f)).sqrt();
    lhs - 1.0
}

/// `f_t ≥ 0` recovered from the first integral.
pub fn slope_from_first_integral(params: CatenoidParams, f: f64) -> f64 {
    let v = f / params.a();
    let m = m_of(params.n());
    2.0 * ((v - 1.0) * geometric(v, m)).max(0.0).sqrt() / (4.0 + f * f).sqrt()
}

#[derive(Debug, Clone)]
pub struct HighDimProfile {
    params: CatenoidParams,
    traj: Trajectory<4>,
    height: f64,
    lambda: f64,
}

/// Integrates the profile from the neck until `f` reaches [`ESCAPE_F`].
pub fn solve_profile_nd(params: CatenoidParams, tol: &Tolerances) -> Result<HighDimProfile> {
    tol.validate()?;
    require(params.n() >= 2, "n", params.n() as f64, "n >= 2")?;
    let height = height(params, tol)?;
    let lambda = lambda(params, tol)?;
    let a = params.a();
    let ode_tol = tol.tightened(GLOBAL_SAFETY);
    let traj = numerics::integrate_ode_until(
        rhs(params.n()),
        [a, 0.0, 1.0, 0.0],
        (0.0, 2.0 * height + 1.0),
        &ode_tol,
        |_, y| y[0] >= ESCAPE_F,
    )?;
    if !traj.stopped_early() {
        return Err(Error::Bracket {
            what: "escape of the profile",
        });
    }
    Ok(HighDimProfile {
        params,
        traj,
        height,
        lambda,
    })
}

impl HighDimProfile {
    pub fn params(&self) -> CatenoidParams {
        self.params
    }

    /// Largest `|t|` at which the profile is evaluable.
    pub fn t_reach(&self) -> f64 {
        self.traj.t_end()
    }

    /// `T(a)` from quadrature.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// `Λ(a) = lim φ_a(a, τ)` as `τ → ∞`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn state(&self, t: f64) -> Result<HighDimState> {
        let y = self.traj.eval(t.abs()).ok_or(Error::OutOfRange {
            t,
            t_max: self.t_reach(),
        })?;
        let sgn = if t < 0.0 { -1.0 } else { 1.0 };
        Ok(HighDimState {
            t,
            f: y[0],
            f_t: sgn * y[1],
            f_a: y[2],
            f_ta: sgn * y[3],
        })
    }

    pub fn first_integral_residual(&self, t: f64) -> Result<f64> {
        let st = self.state(t)?;
        Ok(first_integral_defect(self.params, st.f, st.f_t))
    }

    /// Escape time seen by the ODE: the stopping time plus the tail
    /// `∫_F^∞ df/f_t ≈ F / ((2n−3) f_t(F))` of the asymptotic regime
    /// `f_t ∝ f^{2n−2}`.
    pub fn escape_time(&self) -> f64 {
        let y = self.traj.final_state();
        let k = (2 * self.params.n() - 3) as f64;
        self.traj.t_end() + y[0] / (k * y[1])
    }

    /// `W = (1 + f_t² + ¼ f² f_t²)^{−1/2}`, equal to `(a/f)^{2n−1}`.
    pub fn w(&self, t: f64) -> Result<f64> {
        let st = self.state(t)?;
        Ok(1.0 / (1.0 + st.f_t * st.f_t * (1.0 + 0.25 * st.f * st.f)).sqrt())
    }

    /// Vertical Jacobi field `v = W f_t`.
    pub fn jacobi_v(&self, t: f64) -> Result<f64> {
        Ok(self.w(t)? * self.state(t)?.f_t)
    }

    /// Variation field `e = W f_a`.
    pub fn jacobi_e(&self, t: f64) -> Result<f64> {
        Ok(self.w(t)? * self.state(t)?.f_a)
    }
}

/// `φ(a, τ) = (a/2) ∫₁^{τ/a} √((a²v²+4)/(v^{4n−2}−1)) dv`, the inverse of
/// `f(a, ·)` on `[0, T(a))`. Accepts `n = 1`.
pub fn phi_nd(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau >= a, "tau", tau, "tau >= a")?;
    if tau == a {
        return Ok(0.0);
    }
    let hi = tau / a;
    Ok(0.5 * a * quad_singular(phi_integrand(params), 1.0, hi, Singular::Lo, 2.0 * tol.quad_tol / a)?)
}

fn phi_integrand(params: CatenoidParams) -> impl Fn(f64) -> f64 {
    let a = params.a();
    let m = m_of(params.n());
    move |v: f64| ((a * a * v * v + 4.0) / ((v - 1.0) * geometric(v, m))).sqrt()
}

/// The same integral in the original variable,
/// `(a^{2n−1}/2) ∫_a^τ √((u²+4)/(u^{4n−2} − a^{4n−2})) du`.
pub fn phi_nd_u(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau >= a, "tau", tau, "tau >= a")?;
    let m = m_of(params.n());
    let e = (2 * params.n() - 1) as i32;
    let am = a.powi(m);
    let integrand = |u: f64| ((u * u + 4.0) / (u.powi(m) - am)).sqrt();
    let scale = 0.5 * a.powi(e);
    Ok(scale * quad_singular(integrand, a, tau, Singular::Lo, tol.quad_tol / scale)?)
}

/// Finite height `T(a) = lim φ(a, τ)`; requires `n ≥ 2`.
pub fn height(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    require(params.n() >= 2, "n", params.n() as f64, "n >= 2 (finite height)")?;
    let a = params.a();
    Ok(0.5
        * a
        * quad_singular(
            phi_integrand(params),
            1.0,
            f64::INFINITY,
            Singular::Lo,
            2.0 * tol.quad_tol / a,
        )?)
}

fn phi_a_integrand(params: CatenoidParams) -> impl Fn(f64) -> f64 {
    let a = params.a();
    let m = m_of(params.n());
    move |v: f64| {
        let av2 = a * a * v * v;
        (av2 + 2.0) / ((av2 + 4.0) * (v - 1.0) * geometric(v, m)).sqrt()
    }
}

/// `∂φ/∂a(a, τ)`; for `n = 1` this coincides with [`profile::phi_a`].
pub fn phi_a_nd(params: CatenoidParams, tau: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    require(tau > a, "tau", tau, "tau > a")?;
    let v = tau / a;
    let integral = quad_singular(phi_a_integrand(params), 1.0, v, Singular::Lo, tol.quad_tol)?;
    let boundary = tau / (2.0 * a) * ((tau * tau + 4.0) / ((v - 1.0) * geometric(v, m_of(params.n())))).sqrt();
    Ok(integral - boundary)
}

/// `Λ(a) = ∫₁^∞ (a²v²+2)/√((a²v²+4)(v^{4n−2}−1)) dv`, the limit of `φ_a`;
/// requires `n ≥ 2`.
pub fn lambda(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    require(params.n() >= 2, "n", params.n() as f64, "n >= 2 (finite limit)")?;
    Ok(quad_singular(
        phi_a_integrand(params),
        1.0,
        f64::INFINITY,
        Singular::Lo,
        tol.quad_tol,
    )?)
}

/// `τ` with `φ_a(a, τ) = target`, for `target < Λ(a)`.
fn solve_phi_a_nd(params: CatenoidParams, target: f64, tol: &Tolerances) -> Result<Option<f64>> {
    let a = params.a();
    let g = |tau: f64| phi_a_nd(params, tau, tol).map(|v| v - target);
    let mut d = 0.5;
    let lo = loop {
        let tau = a * (1.0 + d);
        if g(tau)? < 0.0 {
            break tau;
        }
        d *= 0.25;
        if d < 1e-30 {
            return Err(Error::Bracket {
                what: "phi_a lower end",
            });
        }
    };
    let mut hi = 2.0 * lo;
    while g(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 * a {
            return Ok(None);
        }
    }
    let mut failure = None;
    let root = find_root(
        |tau| match g(tau) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol.root_tol.min(1e-13 * hi),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(Some(root?)),
    }
}

fn level(params: CatenoidParams, target: f64, what: &'static str, tol: &Tolerances) -> Result<f64> {
    let tau = solve_phi_a_nd(params, target, tol)?.ok_or(Error::Bracket { what })?;
    phi_nd(params, tau, tol)
}

/// Conjugate height `z(a)`: `e(a, ·)` vanishes there.
pub fn conjugate_value_nd(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    require(params.n() >= 2, "n", params.n() as f64, "n >= 2")?;
    level(params, 0.0, "zero of phi_a", tol)
}

/// `ℓ(a)`, the height with `φ_a(a, f(a, ℓ)) = −Λ(a)`.
pub fn ell(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let lam = lambda(params, tol)?;
    level(params, -lam, "level -Lambda of phi_a", tol)
}

/// `τ = f(a, |t|)` through the quadrature route, for `|t| < T(a)`.
pub fn tau_of_t_nd(params: CatenoidParams, t: f64, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let t = t.abs();
    if t == 0.0 {
        return Ok(a);
    }
    let big_t = height(params, tol)?;
    if t >= big_t {
        return Err(Error::OutOfRange { t, t_max: big_t });
    }
    let g = |tau: f64| phi_nd(params, tau, tol).map(|v| v - t);
    let mut hi = 2.0 * a;
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Bracket { what: "tau(t)" });
        }
    }
    let mut failure = None;
    let root = find_root(
        |tau| match g(tau) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        a,
        hi,
        tol.root_tol.min(1e-13 * hi),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(root?),
    }
}

/// Companion height `t₂` making `𝒟ₐ(−t₁, t₂)` stable-unstable, or `None`
/// when `φ_a(a, f(a, t₁)) ≤ −Λ(a)` and no such height exists.
pub fn companion_nd(params: CatenoidParams, t1: f64, tol: &Tolerances) -> Result<Option<f64>> {
    require(params.n() >= 2, "n", params.n() as f64, "n >= 2")?;
    require(t1 > 0.0, "t1", t1, "t1 > 0")?;
    let lam = lambda(params, tol)?;
    let tau1 = tau_of_t_nd(params, t1, tol)?;
    let target = -phi_a_nd(params, tau1, tol)?;
    if target >= lam {
        return Ok(None);
    }
    match solve_phi_a_nd(params, target, tol)? {
        Some(tau2) => Ok(Some(phi_nd(params, tau2, tol)?)),
        None => Ok(None),
    }
}

/// Whether every `t₁ > 0` has a companion height. For `n = 1`, `φ_a`
/// grows without bound (checked at a large `τ` against its value at a
/// moderate one); for `n ≥ 2` it is capped by the finite `Λ(a)`.
pub fn lindelof_check(params: CatenoidParams, tol: &Tolerances) -> Result<bool> {
    if params.n() == 1 {
        let a = params.a();
        let near = profile::phi_a(params, 10.0 * a + 10.0, tol)?;
        let far = profile::phi_a(params, 1e3 * (a + 1.0), tol)?;
        return Ok(far > 10.0 * near.abs().max(1.0));
    }
    let lam = lambda(params, tol)?;
    Ok(!lam.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, n: u32) -> CatenoidParams {
        CatenoidParams::new(a, n).unwrap()
    }

    #[test]
    fn n1_reduces_to_surface_equation() {
        let y = [1.3, 0.7, 0.0, 0.0];
        let acc = rhs(1)(0.0, &y)[1];
        let f = y[0];
        assert!((acc - 4.0 * (1.0 + 0.49) / (f * (4.0 + f * f))).abs() < 1e-15);
    }

    #[test]
    fn geometric_sum() {
        assert_eq!(geometric(1.0, 6), 6.0);
        assert!((geometric(2.0, 6) - 63.0).abs() < 1e-12);
    }

    #[test]
    fn n1_formulas_agree_with_surface_module() {
        let tol = Tolerances::default();
        let q = p(1.0, 1);
        let a = profile::phi(q, 3.0, &tol).unwrap();
        assert!((phi_nd(q, 3.0, &tol).unwrap() - a).abs() < 1e-9);
        assert!((phi_nd_u(q, 3.0, &tol).unwrap() - a).abs() < 1e-9);
        let pa = profile::phi_a(q, 3.0, &tol).unwrap();
        assert!((phi_a_nd(q, 3.0, &tol).unwrap() - pa).abs() < 1e-9);
    }

    #[test]
    fn u_and_v_forms_agree() {
        let tol = Tolerances::default();
        for (a, n) in [(1.0, 2), (0.5, 3), (2.0, 2)] {
            let q = p(a, n);
            for tau in [1.01 * a, 2.0 * a, 10.0 * a] {
                let (x, y) = (phi_nd(q, tau, &tol).unwrap(), phi_nd_u(q, tau, &tol).unwrap());
                assert!((x - y).abs() < 1e-9, "a={a} n={n} τ={tau}");
            }
        }
    }

    #[test]
    fn profile_conserves_first_integral() {
        let tol = Tolerances::default();
        for n in [2, 3] {
            for a in [0.5, 1.0, 2.0] {
                let prof = solve_profile_nd(p(a, n), &tol).unwrap();
                assert_eq!(prof.state(0.0).unwrap().f, a);
                let reach = prof.t_reach();
                for i in 0..=200 {
                    let t = reach * (i as f64 / 100.0 - 1.0);
                    let r = prof.first_integral_residual(t).unwrap();
                    assert!(r.abs() < 1e-8, "n={n} a={a} t={t}: {r}");
                }
            }
        }
    }

    #[test]
    fn slope_reconstruction() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let prof = solve_profile_nd(q, &tol).unwrap();
        for frac in [0.1, 0.5, 0.9] {
            let st = prof.state(frac * prof.t_reach()).unwrap();
            let s = slope_from_first_integral(q, st.f);
            assert!((s - st.f_t).abs() < 1e-8 * st.f_t.max(1.0));
        }
    }

    #[test]
    fn escape_time_matches_height() {
        let tol = Tolerances::default();
        for (a, n) in [(1.0, 2), (0.5, 2), (2.0, 3), (1.0, 3)] {
            let prof = solve_profile_nd(p(a, n), &tol).unwrap();
            assert!(prof.height().is_finite());
            assert!(prof.t_reach() < prof.height());
            let d = (prof.escape_time() - prof.height()).abs();
            assert!(d < 1e-6, "a={a} n={n}: {d}");
        }
    }

    #[test]
    fn round_trip_through_phi() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let prof = solve_profile_nd(q, &tol).unwrap();
        for frac in [0.0, 0.2, 0.6, 0.95, 0.999] {
            let t = frac * prof.t_reach();
            let st = prof.state(t).unwrap();
            assert!((phi_nd(q, st.f, &tol).unwrap() - t).abs() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn phi_a_limit_and_fd_oracle() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let lam = lambda(q, &tol).unwrap();
        assert!(lam > 0.0);
        // the gap closes like 1/τ
        let gaps: Vec<f64> = [1e3, 1e5, 1e7]
            .iter()
            .map(|&t| (phi_a_nd(q, t, &tol).unwrap() - lam).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        assert!(gaps[2] < 1e-6, "{gaps:?}");
        let h = 1e-5;
        for tau in [1.5, 3.0, 20.0] {
            let fd =
                (phi_nd(p(1.0 + h, 2), tau, &tol).unwrap() - phi_nd(p(1.0 - h, 2), tau, &tol).unwrap()) / (2.0 * h);
            assert!((fd - phi_a_nd(q, tau, &tol).unwrap()).abs() < 1e-6, "τ={tau}");
        }
    }

    #[test]
    fn phi_a_is_increasing() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let vals: Vec<f64> = (1..400)
            .map(|i| phi_a_nd(q, 1.0 + 0.001 * 1.03f64.powi(i), &tol).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn levels_are_ordered() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let prof = solve_profile_nd(q, &tol).unwrap();
        let z = conjugate_value_nd(q, &tol).unwrap();
        let l = ell(q, &tol).unwrap();
        assert!(0.0 < l && l < z && z < prof.height(), "ℓ={l} z={z} T={}", prof.height());
        assert!(prof.jacobi_e(z).unwrap().abs() < 1e-6);
        assert!(prof.jacobi_e(0.5 * z).unwrap() > 0.0);
        assert!(prof.jacobi_e(0.5 * (z + prof.t_reach())).unwrap() < 0.0);
    }

    #[test]
    fn companion_exists_only_beyond_ell() {
        let tol = Tolerances::default();
        let q = p(1.0, 2);
        let l = ell(q, &tol).unwrap();
        let t2 = companion_nd(q, 2.0 * l, &tol).unwrap().expect("companion beyond ℓ");
        assert!(t2 > 0.0 && t2 < height(q, &tol).unwrap());
        assert!(companion_nd(q, 0.5 * l, &tol).unwrap().is_none());
        let z = conjugate_value_nd(q, &tol).unwrap();
        assert!((companion_nd(q, z, &tol).unwrap().unwrap() - z).abs() < 1e-7);
    }

    #[test]
    fn vertical_field_positive_on_upper_half() {
        let tol = Tolerances::default();
        let prof = solve_profile_nd(p(1.0, 2), &tol).unwrap();
        for i in 1..=100 {
            let t = prof.t_reach() * i as f64 / 100.0;
            assert!(prof.jacobi_v(t).unwrap() > 0.0);
            let w = prof.w(t).unwrap();
            let f = prof.state(t).unwrap().f;
            assert!((w - (1.0 / f).powi(3)).abs() < 1e-8 * w.max(1e-30) + 1e-14);
        }
    }

    #[test]
    fn lindelof() {
        let tol = Tolerances::default();
        assert!(lindelof_check(p(1.0, 1), &tol).unwrap());
        assert!(!lindelof_check(p(1.0, 2), &tol).unwrap());
        assert!(!lindelof_check(p(0.5, 3), &tol).unwrap());
    }
}
