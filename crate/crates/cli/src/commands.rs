//! One function per subcommand. Each evaluates a single `a` and returns a
//! serialisable document; sweeps are assembled in `main`.

use crate::format::csv_row;
use crate::svg::profile_figure;
use anyhow::Result;
use nilcat_core::checks::{self, CheckOutcome};
use nilcat_core::highdim;
use nilcat_core::index::{assemble, mode_negative, SturmResult, Witness};
use nilcat_core::jacobi::{gamma, gauss_strip_halfwidth, omega_limit};
use nilcat_core::numerics::Tolerances;
use nilcat_core::profile::{default_t_max, solve_profile, CatenoidParams};
use nilcat_core::stability::{classify_domain, companion_boundary, conjugate_value, Classification};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Invalid combination of flags, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub n: u32,
    pub t_max: Option<f64>,
    pub tol: Tolerances,
}

impl RunConfig {
    fn params(&self) -> Result<CatenoidParams> {
        Ok(CatenoidParams::new(self.a, self.n)?)
    }

    fn surface_only(&self, command: &str) -> Result<CatenoidParams> {
        if self.n != 1 {
            return usage(format!("`{command}` requires n = 1, got n = {}", self.n));
        }
        self.params()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub f: f64,
    pub f_t: f64,
    pub s: f64,
    pub gamma: f64,
}

impl ProfileRow {
    pub fn csv(&self) -> String {
        csv_row(&[self.t, self.f, self.f_t, self.s, self.gamma])
    }
}

pub const PROFILE_HEADER: &str = "t,f,f_t,s,gamma";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDoc {
    pub a: f64,
    pub rows: Vec<ProfileRow>,
}

/// Rows at the multiples of `step` inside `[−t_max, t_max]`.
pub fn profile(cfg: &RunConfig, step: f64) -> Result<ProfileDoc> {
    let p = cfg.surface_only("profile")?;
    if !(step.is_finite() && step > 0.0) {
        return usage(format!("--step must satisfy step > 0, got {step}"));
    }
    let t_max = cfg.t_max.unwrap_or_else(|| default_t_max(cfg.a));
    let curve = solve_profile(p, Some(t_max), &cfg.tol)?;
    let m = (t_max / step * (1.0 + 1e-12)).floor() as i64;
    let rows = (-m..=m)
        .map(|i| {
            let t = (i as f64 * step).clamp(-t_max, t_max);
            let st = curve.state(t)?;
            Ok(ProfileRow {
                t,
                f: st.f,
                f_t: st.f_t,
                s: st.s,
                gamma: gamma(&curve, t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileDoc { a: cfg.a, rows })
}

/// SVG of a profile document with `±z(a)` marked.
pub fn profile_svg(cfg: &RunConfig, doc: &ProfileDoc) -> Result<String> {
    let z = conjugate_value(cfg.params()?, &cfg.tol)?;
    let pts: Vec<(f64, f64)> = doc.rows.iter().map(|r| (r.t, r.f)).collect();
    let t_top = pts.last().map_or(0.0, |p| p.0);
    Ok(profile_figure(cfg.a, &pts, (z <= t_top).then_some(z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityDoc {
    pub z: f64,
    pub t1: f64,
    pub t2: f64,
    pub classification: Classification,
}

/// The domain `𝒟ₐ(−t₁, t₂)`; `t₁` defaults to `z(a)` and `t₂` to the
/// companion height of `t₁`.
pub fn stability(cfg: &RunConfig, t1: Option<f64>, t2: Option<f64>) -> Result<StabilityDoc> {
    let p = cfg.surface_only("stability")?;
    let z = conjugate_value(p, &cfg.tol)?;
    let t1 = t1.unwrap_or(z);
    if !(t1.is_finite() && t1 > 0.0) {
        return usage(format!("--t1 must satisfy t1 > 0, got {t1}"));
    }
    let t2 = match t2 {
        Some(t2) if t2.is_finite() && t2 > 0.0 => t2,
        Some(t2) => return usage(format!("--t2 must satisfy t2 > 0, got {t2}")),
        None => companion_boundary(p, t1, &cfg.tol)?,
    };
    let classification = classify_domain(p, -t1, t2, &cfg.tol)?.classification;
    Ok(StabilityDoc {
        z,
        t1,
        t2,
        classification,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexDoc {
    pub computed: u32,
    pub lower: u32,
    pub upper: u32,
    pub computed_range: [u32; 2],
    pub indeterminate: bool,
    pub trial_bound_modes: u32,
    pub a: f64,
    pub per_mode: Vec<ModeDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDoc {
    pub k: u32,
    pub has_negative: bool,
    pub indeterminate: bool,
    pub witness: Witness,
}

impl From<SturmResult> for ModeDoc {
    fn from(m: SturmResult) -> Self {
        Self {
            k: m.k,
            has_negative: m.has_negative,
            indeterminate: m.indeterminate,
            witness: m.witness,
        }
    }
}

/// Shoots the modes `k² < a² + 2` concurrently.
pub fn index(cfg: &RunConfig) -> Result<IndexDoc> {
    let p = cfg.surface_only("index")?;
    let cap = cfg.a * cfg.a + 2.0;
    let ks: Vec<u32> = (0..).take_while(|&k: &u32| (k as f64).powi(2) < cap).collect();
    let per_mode = ks
        .par_iter()
        .map(|&k| mode_negative(p, k, &cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let rep = assemble(p, &cfg.tol, per_mode)?;
    Ok(IndexDoc {
        computed: rep.computed,
        lower: rep.lower_bound,
        upper: rep.upper_bound,
        computed_range: rep.computed_range,
        indeterminate: rep.indeterminate,
        trial_bound_modes: rep.trial_bound_modes,
        a: rep.a,
        per_mode: rep.per_mode.into_iter().map(ModeDoc::from).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaDoc {
    pub omega_limit: f64,
    pub strip_halfwidth: f64,
}

pub fn omega(cfg: &RunConfig) -> Result<OmegaDoc> {
    let p = cfg.surface_only("omega")?;
    Ok(OmegaDoc {
        omega_limit: omega_limit(p, &cfg.tol)?,
        strip_halfwidth: gauss_strip_halfwidth(p),
    })
}

/// `T` and `ell` are `null` for `n = 1`, where the catenoid is entire and
/// `φ_a` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighDimDoc {
    #[serde(rename = "T")]
    pub big_t: Option<f64>,
    pub z: f64,
    pub ell: Option<f64>,
    pub lindelof: bool,
}

pub fn highdim(cfg: &RunConfig) -> Result<HighDimDoc> {
    let p = cfg.params()?;
    let lindelof = highdim::lindelof_check(p, &cfg.tol)?;
    if cfg.n == 1 {
        return Ok(HighDimDoc {
            big_t: None,
            z: conjugate_value(p, &cfg.tol)?,
            ell: None,
            lindelof,
        });
    }
    Ok(HighDimDoc {
        big_t: Some(highdim::height(p, &cfg.tol)?),
        z: highdim::conjugate_value_nd(p, &cfg.tol)?,
        ell: Some(highdim::ell(p, &cfg.tol)?),
        lindelof,
    })
}

/// The invariant suite, checks run concurrently and reported in order.
pub fn check(tol: &Tolerances) -> Vec<CheckOutcome> {
    (1..=checks::SUITE_LEN as u32)
        .into_par_iter()
        .filter_map(|id| checks::run_check(id, tol))
        .collect()
}

pub fn check_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{tag} {:>2} {:<20} {}\n", o.id, o.name, o.detail));
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    out.push_str(&format!("{} passed, {failed} failed\n", outcomes.len() - failed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: f64) -> RunConfig {
        RunConfig {
            a,
            n: 1,
            t_max: None,
            tol: Tolerances::default(),
        }
    }

    #[test]
    fn profile_starts_at_the_neck() {
        let doc = profile(
            &RunConfig {
                t_max: Some(1.0),
                ..cfg(1.0)
            },
            0.1,
        )
        .unwrap();
        assert_eq!(doc.rows.len(), 21);
        let mid = doc.rows[10];
        assert_eq!(mid.csv(), "0,1,0,0,0");
        assert_eq!(doc.rows[0].t, -1.0);
        assert_eq!(doc.rows[20].t, 1.0);
    }

    #[test]
    fn stability_default_is_the_fixed_point() {
        let d = stability(&cfg(1.0), None, None).unwrap();
        assert!((d.t2 - d.t1).abs() < 1e-8);
        assert_eq!(d.classification, Classification::StableUnstable);
        let wide = stability(&cfg(1.0), Some(d.z), Some(2.0 * d.z)).unwrap();
        assert_eq!(wide.classification, Classification::Unstable);
    }

    #[test]
    fn index_matches_the_sequential_report() {
        let d = index(&cfg(1.0)).unwrap();
        assert_eq!((d.computed, d.lower, d.upper), (3, 3, 3));
        let seq =
            nilcat_core::index::morse_index(CatenoidParams::surface(1.0).unwrap(), &Tolerances::default()).unwrap();
        assert_eq!(d.computed, seq.computed);
        assert_eq!(d.per_mode.len(), seq.per_mode.len());
    }

    #[test]
    fn surface_commands_reject_higher_n() {
        let c = RunConfig { n: 2, ..cfg(1.0) };
        assert!(index(&c).unwrap_err().downcast_ref::<UsageError>().is_some());
        assert!(!highdim(&c).unwrap().lindelof);
        assert!(highdim(&cfg(1.0)).unwrap().lindelof);
    }
}
