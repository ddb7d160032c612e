//! Bracketed scalar root finding: bisection down to a coarse width, then
//! safeguarded Newton.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

const MAX_BISECTIONS: usize = 200;
const MAX_NEWTON: usize = 60;

/// Root of `f` in `(lo, hi)` where `f(lo)` and `f(hi)` have opposite signs.
/// Bisects until the bracket is narrower than `width`, then runs Newton with
/// `df`, falling back to bisection whenever a step leaves the bracket.
pub fn bisect_newton<F, D>(f: F, df: D, lo: f64, hi: f64, width: f64) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(RootResult {
            root: a,
            residual: 0.0,
            bracket: (lo, hi),
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            root: b,
            residual: 0.0,
            bracket: (lo, hi),
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoSignChange(format!(
            "f({lo:e}) = {fa:e}, f({hi:e}) = {fb:e}"
        )));
    }
    let neg_left = fa < 0.0;
    let mut iterations = 0;

    while b - a > width && iterations < MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(RootResult {
                root: m,
                residual: 0.0,
                bracket: (lo, hi),
                iterations,
            });
        }
        if (fm < 0.0) == neg_left {
            a = m;
        } else {
            b = m;
        }
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_NEWTON {
        let fx = f(x);
        iterations += 1;
        if fx == 0.0 {
            break;
        }
        if (fx < 0.0) == neg_left {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || b - a <= 4.0 * f64::EPSILON * x.abs()
        {
            x = next;
            break;
        }
        x = next;
    }
    Ok(RootResult {
        root: x,
        residual: f(x).abs(),
        bracket: (lo, hi),
        iterations,
    })
}
