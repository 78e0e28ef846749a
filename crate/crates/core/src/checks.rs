//! The invariant suite: twelve numerical properties of the catenoid family,
//! each evaluated at a fixed tolerance and reported with the measured
//! quantity that decided it.

use crate::error::Result;
use crate::highdim::{self, companion_nd, conjugate_value_nd, ell, lindelof_check, solve_profile_nd};
use crate::index::{index_upper_bound, mode_negative, morse_index, trial_mode_count};
use crate::jacobi::{
    gv, gv_bounds, jacobi_e, jacobi_residual, omega1, omega1_lower, omega_limit, AngularJacobi, JacobiCandidate,
    RadialScalar, RESIDUAL_STEP,
};
use crate::nilgeometry::{flux_circle, KillingField};
use crate::numerics::{minimize_scalar, Tolerances};
use crate::profile::{phi, solve_profile, CatenoidParams};
use crate::stability::{classify_domain, companion_boundary, conjugate_value, Classification};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Verdict = Result<(bool, String)>;

struct Check {
    id: u32,
    name: &'static str,
    run: fn(&Tolerances) -> Verdict,
}

const SUITE: [Check; 12] = [
    Check {
        id: 1,
        name: "conservation",
        run: conservation,
    },
    Check {
        id: 2,
        name: "round-trip",
        run: round_trip,
    },
    Check {
        id: 3,
        name: "flux",
        run: flux,
    },
    Check {
        id: 4,
        name: "jacobi-residuals",
        run: jacobi_residuals,
    },
    Check {
        id: 5,
        name: "omega-bounds",
        run: omega_bounds,
    },
    Check {
        id: 6,
        name: "potential-bounds",
        run: potential_bounds,
    },
    Check {
        id: 7,
        name: "index-small-a",
        run: index_small,
    },
    Check {
        id: 8,
        name: "index-bracket",
        run: index_bracket,
    },
    Check {
        id: 9,
        name: "index-growth",
        run: index_growth,
    },
    Check {
        id: 10,
        name: "stability-structure",
        run: stability_structure,
    },
    Check {
        id: 11,
        name: "higher-dimensions",
        run: higher_dimensions,
    },
    Check {
        id: 12,
        name: "asymptotic-slope",
        run: asymptotic_slope,
    },
];

/// Number of checks in the suite.
pub const SUITE_LEN: usize = SUITE.len();

/// Runs check `id` (1-based).
pub fn run_check(id: u32, tol: &Tolerances) -> Option<CheckOutcome> {
    let c = SUITE.iter().find(|c| c.id == id)?;
    let (passed, detail) = match (c.run)(tol) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CheckOutcome {
        id: c.id,
        name: c.name,
        passed,
        detail,
    })
}

/// Runs every check in order.
pub fn run_all(tol: &Tolerances) -> Vec<CheckOutcome> {
    SUITE.iter().filter_map(|c| run_check(c.id, tol)).collect()
}

const SURFACE_A: [f64; 3] = [0.5, 1.0, 2.0];
const T_SPAN: f64 = 20.0;

fn surface(a: f64) -> Result<CatenoidParams> {
    CatenoidParams::surface(a)
}

fn grid(half_width: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| -half_width + 2.0 * half_width * i as f64 / n as f64)
}

fn worst<I: IntoIterator<Item = Result<f64>>>(vals: I) -> Result<f64> {
    vals.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?.abs())))
}

fn conservation(tol: &Tolerances) -> Verdict {
    let mut surf = 0.0f64;
    for a in SURFACE_A {
        let prof = solve_profile(surface(a)?, Some(T_SPAN), tol)?;
        surf = surf.max(worst(grid(T_SPAN, 4000).map(|t| prof.first_integral_residual(t)))?);
    }
    let mut hd = 0.0f64;
    for n in [2, 3] {
        for a in SURFACE_A {
            let prof = solve_profile_nd(CatenoidParams::new(a, n)?, tol)?;
            let r = prof.t_reach();
            hd = hd.max(worst(grid(r, 4000).map(|t| prof.first_integral_residual(t)))?);
        }
    }
    Ok((
        surf < 1e-8 && hd < 1e-8,
        format!("n=1 max {surf:.2e}; n=2,3 max {hd:.2e} (bound 1e-8)"),
    ))
}

fn round_trip(tol: &Tolerances) -> Verdict {
    let mut err = 0.0f64;
    for a in SURFACE_A {
        let p = surface(a)?;
        let prof = solve_profile(p, Some(T_SPAN), tol)?;
        err = err.max(worst(grid(T_SPAN, 400).map(|t| {
            let (f, _) = prof.eval_f(t)?;
            Ok(phi(p, f.max(a), tol)? - t.abs())
        }))?);
    }
    Ok((err < 1e-8, format!("max |phi(f(t)) - |t|| = {err:.2e} (bound 1e-8)")))
}

fn flux(tol: &Tolerances) -> Verdict {
    let (mut vert, mut horiz) = (0.0f64, 0.0f64);
    for a in SURFACE_A {
        let prof = solve_profile(surface(a)?, Some(T_SPAN), tol)?;
        for t in [-15.0, -3.0, 0.0, 1.5, 10.0] {
            vert = vert.max((flux_circle(&prof, t, KillingField::Zeta)? - 2.0 * PI * a).abs());
            for k in [KillingField::Xi, KillingField::Eta] {
                horiz = horiz.max(flux_circle(&prof, t, k)?.abs());
            }
        }
    }
    Ok((
        vert < 1e-8 && horiz < 1e-10,
        format!("|flux(zeta) - 2 pi a| = {vert:.2e} (1e-8); |flux(xi,eta)| = {horiz:.2e} (1e-10)"),
    ))
}

/// Window on which the discrete residuals are measured.
pub const RESIDUAL_WINDOW: f64 = 5.0;

fn jacobi_residuals(tol: &Tolerances) -> Verdict {
    let cases = [
        ("v", JacobiCandidate::Radial(RadialScalar::V), 0),
        ("e", JacobiCandidate::Radial(RadialScalar::E), 0),
        (
            "W1 cos",
            JacobiCandidate::Angular(AngularJacobi::W1),
            AngularJacobi::MODE,
        ),
        (
            "W1 sin",
            JacobiCandidate::Angular(AngularJacobi::W3),
            AngularJacobi::MODE,
        ),
    ];
    let prof = solve_profile(surface(1.0)?, Some(RESIDUAL_WINDOW + 1.0), tol)?;
    let h = RESIDUAL_STEP;
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, u, k) in cases {
        let coarse = jacobi_residual(u, &prof, k, h, RESIDUAL_WINDOW)?;
        let fine = jacobi_residual(u, &prof, k, 0.5 * h, RESIDUAL_WINDOW)?;
        let ratio = coarse / fine;
        ok &= coarse < 1e-4 && (3.5..=4.5).contains(&ratio);
        parts.push(format!("{label}: {coarse:.2e} ratio {ratio:.2}"));
    }
    Ok((ok, parts.join("; ")))
}

fn omega_bounds(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for a in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let om = omega_limit(surface(a)?, tol)?;
        ok &= om > FRAC_PI_2 && om <= PI;
        lo = lo.min(om);
        hi = hi.max(om);
    }
    let small = omega_limit(surface(0.01)?, tol)?;
    let large = omega_limit(surface(100.0)?, tol)?;
    ok &= (small - FRAC_PI_2).abs() < 0.05 && (large - PI).abs() < 0.05;
    let mut chain = true;
    for b in [0.1, 1.0, 10.0, 100.0] {
        let (o1, i) = (omega1(b, tol)?, omega1_lower(b, tol)?);
        chain &= o1 > i && i > FRAC_PI_2;
    }
    Ok((
        ok && chain,
        format!("Omega in [{lo:.6}, {hi:.6}]; Omega(0.01) = {small:.6}; Omega(100) = {large:.6}; Omega1 > I > pi/2: {chain}"),
    ))
}

fn potential_bounds(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SURFACE_A {
        let prof = solve_profile(surface(a)?, Some(T_SPAN), tol)?;
        let (lo, hi) = gv_bounds(a);
        let slack = 1e-12 * hi;
        let ts: Vec<f64> = grid(T_SPAN, 4000).collect();
        let vals = ts.iter().map(|&t| gv(&prof, t)).collect::<Result<Vec<_>>>()?;
        ok &= vals.iter().all(|&g| g >= lo - slack && g <= hi + slack);
        let at_zero = (gv(&prof, 0.0)? - hi).abs();
        // refine the sampled minimum on the positive side
        let (i_min, _) = vals
            .iter()
            .enumerate()
            .filter(|(i, _)| ts[*i] >= 0.0)
            .fold((0, f64::INFINITY), |m, (i, &g)| if g < m.1 { (i, g) } else { m });
        let (l, r) = (ts[i_min.saturating_sub(1)], ts[(i_min + 1).min(ts.len() - 1)]);
        let (_, g_min) = minimize_scalar(|t| gv(&prof, t).unwrap_or(f64::INFINITY), l, r, 1e-10);
        let gap = g_min - lo;
        ok &= at_zero < 1e-10 && gap.abs() < 1e-6 && gap >= -slack;
        parts.push(format!(
            "a={a}: |GV(0)-(a^2+2)| {at_zero:.1e}, min - a sqrt(a^2+4) {gap:.1e}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn index_small(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 1.4] {
        let rep = morse_index(surface(a)?, tol)?;
        ok &= rep.computed == 3 && !rep.indeterminate;
        parts.push(format!("a={a}: {}", rep.computed));
    }
    Ok((ok, parts.join(", ")))
}

fn index_bracket(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [2.0, 5.0, 10.0] {
        let p = surface(a)?;
        let rep = morse_index(p, tol)?;
        let upper = index_upper_bound(a);
        let trial = trial_mode_count(p, tol)?;
        let mut sound = true;
        for k in 1..=trial {
            sound &= mode_negative(p, k, tol)?.has_negative;
        }
        ok &= (3..=upper).contains(&rep.computed) && sound;
        parts.push(format!(
            "a={a}: 3 <= {} <= {upper}, trial modes 1..={trial} negative: {sound}",
            rep.computed
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn index_growth(tol: &Tolerances) -> Verdict {
    let rep = morse_index(surface(10.0)?, tol)?;
    let a = 200.0;
    let ratio = trial_mode_count(surface(a)?, tol)? as f64 / a;
    let centre = 0.75f64.sqrt();
    let ok = (17..=21).contains(&rep.computed) && (ratio - centre).abs() <= 0.05;
    Ok((
        ok,
        format!("index(10) = {}; trial_mode_count(200)/200 = {ratio:.4}", rep.computed),
    ))
}

fn stability_structure(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SURFACE_A {
        let p = surface(a)?;
        let z = conjugate_value(p, tol)?;
        let prof = solve_profile(p, Some(3.0 * z + 1.0), tol)?;
        let e_z = jacobi_e(&prof, z)?.abs();
        let mut inv = 0.0f64;
        let mut sides = true;
        for t1 in [0.2 * z, 0.7 * z, 1.5 * z, 3.0 * z] {
            let t2 = companion_boundary(p, t1, tol)?;
            inv = inv.max((companion_boundary(p, t2, tol)? - t1).abs());
            sides &= (t1 < z) == (t2 > z);
        }
        let class = |s: f64| classify_domain(p, -s * z, s * z, tol).map(|d| d.classification);
        let order = class(0.9)? == Classification::Stable
            && class(1.0)? == Classification::StableUnstable
            && class(1.1)? == Classification::Unstable;
        ok &= e_z < 1e-7 && inv < 1e-7 && sides && order;
        parts.push(format!(
            "a={a}: z={z:.6} |e(z)| {e_z:.1e} involution {inv:.1e} sides {sides} order {order}"
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn higher_dimensions(tol: &Tolerances) -> Verdict {
    let p = CatenoidParams::new(1.0, 2)?;
    let prof = solve_profile_nd(p, tol)?;
    let big_t = highdim::height(p, tol)?;
    let gap = (prof.escape_time() - big_t).abs();
    let z = conjugate_value_nd(p, tol)?;
    let l = ell(p, tol)?;
    let with = companion_nd(p, 2.0 * l, tol)?;
    let without = companion_nd(p, 0.5 * l, tol)?;
    let mut lind = lindelof_check(surface(1.0)?, tol)?;
    for n in [2, 3] {
        lind &= !lindelof_check(CatenoidParams::new(1.0, n)?, tol)?;
    }
    let ok =
        big_t.is_finite() && gap < 1e-6 && 0.0 < l && l < z && z < big_t && with.is_some() && without.is_none() && lind;
    Ok((
        ok,
        format!(
            "T = {big_t:.9}, |T_ode - T| = {gap:.1e}, ell = {l:.6}, z = {z:.6}, companion(2 ell) = {with:?}, companion(ell/2) = {without:?}, lindelof iff n = 1: {lind}"
        ),
    ))
}

fn asymptotic_slope(tol: &Tolerances) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in SURFACE_A {
        let prof = solve_profile(surface(a)?, None, tol)?;
        let (_, ft) = prof.eval_f(prof.t_max())?;
        let rel = (ft - 2.0 / a).abs() / (2.0 / a);
        ok &= rel < 0.05;
        parts.push(format!("a={a}: rel {rel:.3}"));
    }
    Ok((ok, parts.join(", ")))
}
