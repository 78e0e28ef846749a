//! Bracketed scalar root finding (Brent) and golden-section minimisation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("iteration budget exhausted")]
    MaxIter,
}

const MAX_ITER: usize = 500;

/// Brent's method on a bracket `[lo, hi]` with `f(lo) f(hi) <= 0`; stops once
/// the bracket is narrower than `tol`.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() {
        return Err(RootError::NonFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NonFinite { x: b });
        }
    }
    Err(RootError::MaxIter)
}

/// Golden-section search for a minimiser of a unimodal `f` on `[lo, hi]`.
/// Returns `(x_min, f(x_min))`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_root() {
        let r = find_root(|x| x - 1.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cosine_root_is_half_pi() {
        let r = find_root(f64::cos, 1.0, 2.0, 1e-10).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_roots_returned_directly() {
        assert_eq!(find_root(|x| x, 0.0, 1.0, 1e-10).unwrap(), 0.0);
        assert_eq!(find_root(|x| x - 1.0, 0.0, 1.0, 1e-10).unwrap(), 1.0);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, RootError::NoSignChange { .. }));
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, fx) = minimize_scalar(|x| (x - 0.3).powi(2) + 2.0, -1.0, 4.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bracket_independence(lo1 in 0.5f64..1.5, hi1 in 1.7f64..3.0,
                                    lo2 in 0.5f64..1.5, hi2 in 1.7f64..3.0) {
                // the only root of cos on (0.5, 3) is π/2
                let tol = 1e-10;
                let r1 = find_root(f64::cos, lo1, hi1, tol).unwrap();
                let r2 = find_root(f64::cos, lo2, hi2, tol).unwrap();
                prop_assert!((r1 - r2).abs() <= tol);
            }
        }
    }
}
