//! Explicit Dormand–Prince 5(4) integration with Hairer's quartic dense
//! output. States are fixed-size arrays so every system in the crate keeps
//! its dimension in the type.

use super::Tolerances;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (singularity reached?)")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t} (blow-up)")]
    NonFinite { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("invalid integration span [{t0}, {t1}]")]
    InvalidSpan { t0: f64, t1: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i]))))
    }
}

/// Dense solution of an initial value problem on `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    segments: Vec<Segment<N>>,
    t_start: f64,
    t_end: f64,
    y_end: [f64; N],
    stopped: bool,
}

impl<const N: usize> Trajectory<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn final_state(&self) -> [f64; N] {
        self.y_end
    }

    /// True when the stop predicate of [`integrate_ode_until`] fired.
    pub fn stopped_early(&self) -> bool {
        self.stopped
    }

    pub fn step_count(&self) -> usize {
        self.segments.len()
    }

    /// Dense-output state at `t`, or `None` outside the integrated span.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        if !(t >= self.t_start && t <= self.t_end) {
            return None;
        }
        if t == self.t_end {
            return Some(self.y_end);
        }
        let idx = self.segments.partition_point(|s| s.t0 <= t);
        let seg = &self.segments[idx.saturating_sub(1)];
        Some(seg.eval(t))
    }

    /// Accepted step boundaries with their states, including both ends.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, [f64; N])> + '_ {
        self.segments
            .iter()
            .map(|s| (s.t0, s.rcont[0]))
            .chain(std::iter::once((self.t_end, self.y_end)))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn is_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

struct Step<const N: usize> {
    y1: [f64; N],
    k7: [f64; N],
    err: [f64; N],
    k: [[f64; N]; 6],
}

fn dp_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Step<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = rhs(t + h, &y1);
    let err =
        std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
    Step {
        y1,
        k7,
        err,
        k: [*k1, k2, k3, k4, k5, k6],
    }
}

fn error_norm<const N: usize>(y0: &[f64; N], s: &Step<N>, tol: &Tolerances) -> f64 {
    (0..N)
        .map(|i| {
            let sc = tol.ode_abs + tol.ode_rel * y0[i].abs().max(s.y1[i].abs());
            (s.err[i] / sc).abs()
        })
        .fold(0.0, f64::max)
}

fn initial_step<const N: usize, F>(rhs: &F, t0: f64, y0: &[f64; N], f0: &[f64; N], span: f64, tol: &Tolerances) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let scale: [f64; N] = std::array::from_fn(|i| tol.ode_abs + tol.ode_rel * y0[i].abs());
    let norm = |v: &[f64; N]| ((0..N).map(|i| (v[i] / scale[i]).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = rhs(t, y)` forward over `t_span` with adaptive steps.
pub fn integrate_ode<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    tol: &Tolerances,
) -> Result<Trajectory<N>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    integrate_ode_until(rhs, y0, t_span, tol, |_, _| false)
}

/// Like [`integrate_ode`], but ends at the first accepted step after which
/// `stop(t, y)` holds.
pub fn integrate_ode_until<const N: usize, F, S>(
    rhs: F,
    y0: [f64; N],
    t_span: (f64, f64),
    tol: &Tolerances,
    stop: S,
) -> Result<Trajectory<N>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: Fn(f64, &[f64; N]) -> bool,
{
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(OdeError::InvalidSpan { t0, t1 });
    }
    if !is_finite(&y0) {
        return Err(OdeError::NonFinite { t: t0 });
    }
    let mut traj = Trajectory {
        segments: Vec::new(),
        t_start: t0,
        t_end: t0,
        y_end: y0,
        stopped: false,
    };
    if t1 == t0 {
        return Ok(traj);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if !is_finite(&k1) {
        return Err(OdeError::NonFinite { t });
    }
    let mut h = initial_step(&rhs, t0, &y0, &k1, t1 - t0, tol);
    let mut last_rejected = false;

    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(traj);
        }
        let last = t + h >= t1 || (t1 - (t + h)) < 1e-12 * h;
        if last {
            h = t1 - t;
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t });
        }
        let step = dp_step(&rhs, t, &y, &k1, h);
        let finite = is_finite(&step.y1) && is_finite(&step.k7);
        let err = if finite {
            error_norm(&y, &step, tol)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            let ydiff: [f64; N] = std::array::from_fn(|i| step.y1[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let k = &step.k;
            let rcont = [
                y,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - h * step.k7[i] - bspl[i]),
                std::array::from_fn(|i| {
                    h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * step.k7[i])
                }),
            ];
            traj.segments.push(Segment { t0: t, h, rcont });
            t = t_new;
            y = step.y1;
            k1 = step.k7;
            traj.t_end = t;
            traj.y_end = y;
            if stop(t, &y) {
                traj.stopped = true;
                return Ok(traj);
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            if !finite && h < 1e-8 * t.abs().max(1.0) {
                return Err(OdeError::NonFinite { t });
            }
            let fac = if finite { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.25 };
            h *= fac;
            last_rejected = true;
        }
    }
    Err(OdeError::TooManySteps { t })
}

/// Fixed-step integration sampled on the uniform grid `t0 + i*h`,
/// `i = 0..=n`, with `substeps` Dormand–Prince steps per grid cell.
///
/// The global error of a fixed-step scheme is a smooth function of `t`, which
/// is what finite-difference consumers of the samples need.
pub fn integrate_uniform<const N: usize, F>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    h: f64,
    n: usize,
    substeps: usize,
) -> Result<Vec<[f64; N]>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let substeps = substeps.max(1);
    let dh = h / substeps as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(y);
    for i in 0..n {
        let cell = t0 + i as f64 * h;
        for j in 0..substeps {
            let t = cell + j as f64 * dh;
            let k1 = rhs(t, &y);
            y = dp_step(&rhs, t, &y, &k1, dh).y1;
        }
        if !is_finite(&y) {
            return Err(OdeError::NonFinite { t: cell + h });
        }
        out.push(y);
    }
    Ok(out)
}
