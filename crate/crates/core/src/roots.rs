//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Stopping rule: bracket narrower than `width` and `|f| < residual`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub width: f64,
    pub residual: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            width: 1e-12,
            residual: 1e-12,
            max_iter: 200,
        }
    }
}

/// Root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Each iteration bisects, then tries a secant step inside the halved
/// bracket; the bracket at least halves per iteration, so the search cannot
/// leave it or stall near a pole of `f` outside it.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoConvergence { lo, hi });
    }

    for _ in 0..tol.max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }

        let s = b - fb * (b - a) / (fb - fa);
        if s > a && s < b {
            let fs = f(s);
            if fs == 0.0 {
                return Ok(s);
            }
            if fs.signum() == fa.signum() {
                a = s;
                fa = fs;
            } else {
                b = s;
                fb = fs;
            }
        }

        let (x, fx) = if fa.abs() < fb.abs() {
            (a, fa)
        } else {
            (b, fb)
        };
        if b - a < tol.width && fx.abs() < tol.residual {
            return Ok(x);
        }
        if b - a <= f64::EPSILON * x.abs() {
            // bracket exhausted at machine precision
            return if fx.abs() < tol.residual {
                Ok(x)
            } else {
                Err(Error::NoConvergence { lo, hi })
            };
        }
    }
    Err(Error::NoConvergence { lo, hi })
}
