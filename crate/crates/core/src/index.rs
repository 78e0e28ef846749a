//! Morse index of `𝒞ₐ ⊂ Nil(3)` by Fourier decomposition and Sturm
//! oscillation.
//!
//! Mode `k` contributes `−u_ss + (k² − U(s)) u` on the compact interval
//! `(−S(a), S(a))`, where `s_t = 4/(a(4+f²))` and `U(s(t)) = GṼ(t)`. The
//! even solution with `u(0) = 1` has a zero in `(0, S(a))` exactly when
//! the mode carries a (single) negative eigenvalue.
//!
//! The shooting runs in the variable `θ` with `f = a cosh θ`, which turns
//! `ds/dθ = 2/√(a² cosh² θ + 4)` into a smooth, exponentially decaying
//! speed and removes the branch point of `df/ds` at the neck.

use crate::error::{require, Error, Result};
use crate::jacobi::{gv_at, gv_bounds};
use crate::numerics::{self, find_root, quad_singular, Singular, Tolerances, Trajectory};
use crate::profile::{CatenoidParams, ProfileCurve};
use serde::{Deserialize, Serialize};

/// `S(a) = (2/a) ∫₁^∞ du / √((u² + 4/a²)(u² − 1))`, half-length of the
/// compactified catenoid.
pub fn s_limit(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let b = 4.0 / (a * a);
    let integrand = |u: f64| 1.0 / ((u * u + b) * (u - 1.0) * (u + 1.0)).sqrt();
    Ok(2.0 / a * quad_singular(integrand, 1.0, f64::INFINITY, Singular::Lo, tol.quad_tol * 0.5 * a)?)
}

/// `J(a) = 2 ∫₁^∞ dv / (v (v + √(v² + 4/a²)) √((v² − 1)(v² + 4/a²)))`, so
/// that `S(a) = π/a − 4 J(a)/a³`.
pub fn j_of_a(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let a = params.a();
    let b = 4.0 / (a * a);
    let integrand = |v: f64| {
        let r = (v * v + b).sqrt();
        1.0 / (v * (v + r) * ((v - 1.0) * (v + 1.0)).sqrt() * r)
    };
    Ok(2.0 * quad_singular(integrand, 1.0, f64::INFINITY, Singular::Lo, tol.quad_tol)?)
}

/// Upper bound for `S(a) − s(t)` when `f(a, t) = tau`.
pub fn s_tail_bound(a: f64, tau: f64) -> f64 {
    2.0 / a * (a / tau).min(1.0).asin()
}

/// The coordinate `s(t)` of a constructed profile.
pub fn s_of_t(profile: &ProfileCurve, t: f64) -> Result<f64> {
    Ok(profile.state(t)?.s)
}

fn speed(a: f64, theta: f64) -> f64 {
    let c = a * theta.cosh();
    2.0 / (c * c + 4.0).sqrt()
}

/// Parameter span after which the remaining growth of `s`, at most
/// `4 e^{−θ}/a`, is below `1e-17`.
fn theta_span(a: f64) -> f64 {
    (4e17 / a).ln()
}

/// The potential `U` on `(−S(a), S(a))`.
#[derive(Debug, Clone)]
pub struct PotentialInS {
    a: f64,
    s_of_theta: Trajectory<1>,
    s_end: f64,
}

impl PotentialInS {
    pub fn new(params: CatenoidParams, tol: &Tolerances) -> Result<Self> {
        let a = params.a();
        let traj = numerics::integrate_ode(move |th, _| [speed(a, th)], [0.0], (0.0, theta_span(a)), tol)?;
        let s_end = traj.final_state()[0];
        Ok(Self {
            a,
            s_of_theta: traj,
            s_end,
        })
    }

    /// `S(a)` as reached by the integration.
    pub fn half_length(&self) -> f64 {
        self.s_end
    }

    /// `θ ≥ 0` with `s(θ) = |s|`, or `None` beyond the integrated range.
    fn theta_of(&self, s: f64) -> Option<f64> {
        let s = s.abs();
        if s >= self.s_end {
            return None;
        }
        if s == 0.0 {
            return Some(0.0);
        }
        let hi = self.s_of_theta.t_end();
        let g = |th: f64| self.s_of_theta.eval(th).map_or(f64::NAN, |y| y[0] - s);
        find_root(g, 0.0, hi, 1e-14).ok()
    }

    /// `U(s)`; continuous up to `±S(a)` where it takes the value `a² + 2`.
    pub fn eval(&self, s: f64) -> f64 {
        match self.theta_of(s) {
            Some(th) => gv_at(self.a, self.a * th.cosh()),
            None => gv_bounds(self.a).1,
        }
    }
}

/// Where the even shooting solution first vanishes, or how close it gets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    FirstZero { s: f64 },
    Minimum { s: f64, u: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SturmResult {
    pub k: u32,
    pub has_negative: bool,
    pub witness: Witness,
    /// The decision sits within `zero_eps` of the threshold: the zero is at
    /// the far end, or the solution only just stays positive.
    pub indeterminate: bool,
}

/// Sign-change bookkeeping over a shooting trajectory whose first state
/// component is `s` and second is `u`.
fn scan<const N: usize>(traj: &Trajectory<N>, s_end: f64, k: u32, zero_eps: f64) -> SturmResult {
    let mut prev: Option<(f64, [f64; N])> = None;
    let mut min = (0.0, f64::INFINITY);
    for (x, y) in traj.nodes() {
        if let Some((x0, y0)) = prev {
            if y0[1] > 0.0 && y[1] <= 0.0 {
                let xz = find_root(|x| traj.eval(x).map_or(f64::NAN, |y| y[1]), x0, x, 1e-14).unwrap_or(x);
                let sz = traj.eval(xz).map_or(y[0], |y| y[0]);
                return SturmResult {
                    k,
                    has_negative: true,
                    witness: Witness::FirstZero { s: sz },
                    indeterminate: s_end - sz < zero_eps,
                };
            }
        }
        if y[1] < min.1 {
            min = (y[0], y[1]);
        }
        prev = Some((x, y));
    }
    SturmResult {
        k,
        has_negative: false,
        witness: Witness::Minimum { s: min.0, u: min.1 },
        indeterminate: min.1 < zero_eps,
    }
}

/// Decides whether mode `k` carries a negative eigenvalue by shooting
/// `u_ss = (k² − U) u`, `u(0) = 1`, `u_s(0) = 0` across `(0, S(a))`.
pub fn mode_negative(params: CatenoidParams, k: u32, tol: &Tolerances) -> Result<SturmResult> {
    require(params.n() == 1, "n", params.n() as f64, "n = 1")?;
    let a = params.a();
    let k2 = (k as f64).powi(2);
    let rhs = move |th: f64, y: &[f64; 3]| {
        let sig = speed(a, th);
        let u_pot = gv_at(a, a * th.cosh());
        [sig, sig * y[2], sig * (k2 - u_pot) * y[1]]
    };
    let traj = numerics::integrate_ode(rhs, [0.0, 1.0, 0.0], (0.0, theta_span(a)), tol)?;
    let s_end = traj.final_state()[0];
    Ok(scan(&traj, s_end, k, tol.zero_eps))
}

/// The same decision made in the original height coordinate: integrates
/// `L̃ₖ u = 0` with `u(0) = 1`, `u_t(0) = 0` together with the profile up
/// to `t_max`, and looks for a zero in `(0, t_max)`.
pub fn mode_negative_in_t(params: CatenoidParams, k: u32, t_max: f64, tol: &Tolerances) -> Result<SturmResult> {
    require(params.n() == 1, "n", params.n() as f64, "n = 1")?;
    require(t_max > 0.0, "t_max", t_max, "t_max > 0")?;
    let a = params.a();
    let k2 = (k as f64).powi(2);
    // state (s, u, q = u_s, f, f_t)
    let rhs = move |_t: f64, y: &[f64; 5]| {
        let (f, p) = (y[3], y[4]);
        let q4 = 4.0 + f * f;
        let st = 4.0 / (a * q4);
        [
            st,
            st * y[2],
            st * (k2 - gv_at(a, f)) * y[1],
            p,
            4.0 * (1.0 + p * p) / (f * q4),
        ]
    };
    let traj = numerics::integrate_ode(rhs, [0.0, 1.0, 0.0, a, 0.0], (0.0, t_max), tol)?;
    let s_end = traj.final_state()[0];
    Ok(scan(&traj, s_end, k, tol.zero_eps))
}

/// Right-hand side `a√(a²+4) − (π/(2S(a)))²` of the trial-function test:
/// every `k ≥ 1` with `k²` below it has a negative eigenvalue.
pub fn trial_threshold(params: CatenoidParams, tol: &Tolerances) -> Result<f64> {
    let s = s_limit(params, tol)?;
    let (lo, _) = gv_bounds(params.a());
    Ok(lo - (std::f64::consts::PI / (2.0 * s)).powi(2))
}

/// `#{k ≥ 1 : k² < trial_threshold}`.
pub fn trial_mode_count(params: CatenoidParams, tol: &Tolerances) -> Result<u32> {
    let rhs = trial_threshold(params, tol)?;
    let mut k = 0u32;
    while (((k + 1) as f64).powi(2)) < rhs {
        k += 1;
    }
    Ok(k)
}

/// `1 + 2⌊√(a²+2)⌋`.
pub fn index_upper_bound(a: f64) -> u32 {
    1 + 2 * (a * a + 2.0).sqrt().floor() as u32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub a: f64,
    /// `1 + 2 · #{k ≥ 1 : has_negative}`, counting indeterminate modes as
    /// negative only in `computed_range`.
    pub computed: u32,
    pub computed_range: [u32; 2],
    pub indeterminate: bool,
    pub lower_bound: u32,
    pub upper_bound: u32,
    pub trial_bound_modes: u32,
    /// Modes `0 ≤ k < √(a²+2)`.
    pub per_mode: Vec<SturmResult>,
}

/// Assembles the index from the per-mode shooting results. Modes with
/// `k ≥ √(a²+2)` are positive because `GṼ ≤ a² + 2`.
pub fn morse_index(params: CatenoidParams, tol: &Tolerances) -> Result<IndexReport> {
    let a = params.a();
    let k_cap = a * a + 2.0;
    let per_mode = (0..)
        .take_while(|&k: &u32| ((k as f64).powi(2)) < k_cap)
        .map(|k| mode_negative(params, k, tol))
        .collect::<Result<Vec<_>>>()?;
    assemble(params, tol, per_mode)
}

/// Report assembly shared with callers that run the modes themselves.
pub fn assemble(params: CatenoidParams, tol: &Tolerances, per_mode: Vec<SturmResult>) -> Result<IndexReport> {
    let a = params.a();
    let trial = trial_mode_count(params, tol)?;
    let definite = per_mode
        .iter()
        .filter(|m| m.k >= 1 && m.has_negative && !m.indeterminate)
        .count() as u32;
    let doubtful = per_mode.iter().filter(|m| m.k >= 1 && m.indeterminate).count() as u32;
    let negative = per_mode.iter().filter(|m| m.k >= 1 && m.has_negative).count() as u32;
    if per_mode.iter().any(|m| m.k == 0 && !m.has_negative) {
        return Err(Error::Bracket {
            what: "ground state of the radial mode",
        });
    }
    Ok(IndexReport {
        a,
        computed: 1 + 2 * negative,
        computed_range: [1 + 2 * definite, 1 + 2 * (definite + doubtful)],
        indeterminate: doubtful > 0,
        lower_bound: (1 + 2 * trial).max(3),
        upper_bound: index_upper_bound(a),
        trial_bound_modes: trial,
        per_mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::solve_profile;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(a: f64) -> CatenoidParams {
        CatenoidParams::surface(a).unwrap()
    }

    #[test]
    fn s_limit_and_j_identity() {
        let tol = Tolerances::default();
        for a in [1.0, 2.0, 10.0] {
            let s = s_limit(p(a), &tol).unwrap();
            let j = j_of_a(p(a), &tol).unwrap();
            assert!(j > 0.0);
            assert!((s - (PI / a - 4.0 * j / a.powi(3))).abs() < 1e-8, "a={a}");
        }
        assert!((50.0 * s_limit(p(50.0), &tol).unwrap() - PI).abs() < 0.01);
        assert!((j_of_a(p(100.0), &tol).unwrap() - PI / 4.0).abs() < 1e-3);
    }

    #[test]
    fn co_integrated_s_approaches_limit() {
        let tol = Tolerances::default();
        for a in [0.5, 1.0, 2.0] {
            let prof = solve_profile(p(a), None, &tol).unwrap();
            let st = prof.state(prof.t_max()).unwrap();
            let s_lim = s_limit(p(a), &tol).unwrap();
            assert_eq!(s_of_t(&prof, 0.0).unwrap(), 0.0);
            assert_eq!(s_of_t(&prof, -1.0).unwrap(), -s_of_t(&prof, 1.0).unwrap());
            assert!(st.s < s_lim);
            assert!(s_lim - st.s < s_tail_bound(a, st.f));
        }
    }

    #[test]
    fn potential_in_s_properties() {
        let tol = Tolerances::default();
        for a in [0.5, 1.0, 3.0] {
            let u = PotentialInS::new(p(a), &tol).unwrap();
            let (lo, hi) = gv_bounds(a);
            let s_lim = s_limit(p(a), &tol).unwrap();
            assert!((u.half_length() - s_lim).abs() < 1e-9);
            assert!((u.eval(0.0) - hi).abs() < 1e-14);
            assert_eq!(u.eval(s_lim * 1.01), hi);
            let mut min = f64::INFINITY;
            for i in 0..=2000 {
                let s = s_lim * i as f64 / 2000.0;
                let v = u.eval(s);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                assert_eq!(v, u.eval(-s));
                min = min.min(v);
            }
            assert!((min - lo).abs() < 1e-5, "a={a}");
        }
    }

    #[test]
    fn potential_in_s_matches_profile() {
        let tol = Tolerances::default();
        let a = 1.2;
        let prof = solve_profile(p(a), None, &tol).unwrap();
        let u = PotentialInS::new(p(a), &tol).unwrap();
        for t in [0.3, 1.0, 5.0, 20.0] {
            let st = prof.state(t).unwrap();
            assert!((u.eval(st.s) - gv_at(a, st.f)).abs() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn low_modes() {
        let tol = Tolerances::default();
        for a in [0.5, 1.0, 2.0, 5.0] {
            assert!(mode_negative(p(a), 0, &tol).unwrap().has_negative);
            assert!(mode_negative(p(a), 1, &tol).unwrap().has_negative);
        }
        assert!(!mode_negative(p(1.0), 2, &tol).unwrap().has_negative);
    }

    #[test]
    fn k1_zero_matches_rotational_field() {
        // W₁ cos ω is the even k = 1 solution; it vanishes where ω = π/2
        let tol = Tolerances::default();
        for a in [0.5, 1.0, 2.0] {
            let prof = solve_profile(p(a), None, &tol).unwrap();
            let r = find_root(|t| prof.state(t).unwrap().omega - FRAC_PI_2, 0.0, prof.t_max(), 1e-13).unwrap();
            let s_r = prof.state(r).unwrap().s;
            let res = mode_negative(p(a), 1, &tol).unwrap();
            let Witness::FirstZero { s } = res.witness else {
                panic!("no zero for a={a}")
            };
            assert!(s <= s_r + tol.zero_eps);
            assert!((s - s_r).abs() < 1e-7, "a={a}: {s} vs {s_r}");
        }
    }

    #[test]
    fn k0_zero_matches_conjugate_value() {
        let tol = Tolerances::default();
        let a = 1.0;
        let z = crate::stability::conjugate_value(p(a), &tol).unwrap();
        let prof = solve_profile(p(a), Some(2.0 * z), &tol).unwrap();
        let Witness::FirstZero { s } = mode_negative(p(a), 0, &tol).unwrap().witness else {
            panic!()
        };
        assert!((s - prof.state(z).unwrap().s).abs() < 1e-7);
    }

    #[test]
    fn shooting_agrees_in_both_coordinates() {
        let tol = Tolerances::default();
        for a in [0.5, 1.0, 2.0, 5.0] {
            for k in 0..=(a * a + 2.0f64).sqrt().ceil() as u32 {
                let s = mode_negative(p(a), k, &tol).unwrap();
                let t = mode_negative_in_t(p(a), k, 400.0 / a, &tol).unwrap();
                if !s.indeterminate && !t.indeterminate {
                    assert_eq!(s.has_negative, t.has_negative, "a={a} k={k}");
                }
            }
        }
    }

    #[test]
    fn trial_counts() {
        let tol = Tolerances::default();
        let s1 = s_limit(p(1.0), &tol).unwrap();
        let rhs = 3.0 * (1.0f64 - 4.0 / 9.0).sqrt() - (PI / (2.0 * s1)).powi(2);
        let want = (1..10).filter(|&k| ((k * k) as f64) < rhs).count() as u32;
        assert_eq!(trial_mode_count(p(1.0), &tol).unwrap(), want);
        assert!(trial_mode_count(p(10.0), &tol).unwrap() >= 8);
        let big = trial_mode_count(p(200.0), &tol).unwrap() as f64 / 200.0;
        assert!((big - 3f64.sqrt() / 2.0).abs() < 0.05, "{big}");
    }

    #[test]
    fn trial_modes_shoot_negative() {
        let tol = Tolerances::default();
        for a in [2.0, 5.0, 10.0] {
            for k in 1..=trial_mode_count(p(a), &tol).unwrap() {
                assert!(mode_negative(p(a), k, &tol).unwrap().has_negative, "a={a} k={k}");
            }
        }
    }

    #[test]
    fn index_reports() {
        let tol = Tolerances::default();
        let r = morse_index(p(1.0), &tol).unwrap();
        assert_eq!((r.lower_bound, r.computed, r.upper_bound), (3, 3, 3));
        let r = morse_index(p(10.0), &tol).unwrap();
        assert!((17..=21).contains(&r.computed), "{}", r.computed);
        let mut prev = 0;
        for a in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let r = morse_index(p(a), &tol).unwrap();
            assert_eq!(r.computed % 2, 1);
            assert!(r.lower_bound <= r.computed && r.computed <= r.upper_bound);
            // once a mode is positive, all higher ones are
            let first_pos = r
                .per_mode
                .iter()
                .position(|m| !m.has_negative)
                .unwrap_or(r.per_mode.len());
            assert!(r.per_mode[first_pos..].iter().all(|m| !m.has_negative));
            assert!(r.computed >= prev, "index decreased at a={a}");
            prev = r.computed;
        }
    }
}
