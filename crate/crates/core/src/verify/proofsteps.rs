//! Pointwise checks of the elementary inequalities and identities used in
//! the proofs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyp::Params;
use crate::special::{coth, ln_sinh};

/// Below this `|η/ξ|` the convexity gap is summed as a binomial series.
const SERIES_CUTOFF: f64 = 0.5;
/// Above this `|η/ξ|` the unscaled formula is used.
const DIRECT_CUTOFF: f64 = 1e3;

/// `(1 - s)^q - 1 + q s`, free of cancellation for small `s`.
fn convexity_gap(q: f64, s: f64) -> f64 {
    if s.abs() < SERIES_CUTOFF {
        let mut term = 0.5 * q * (q - 1.0) * s * s;
        let mut sum = term;
        for k in 3..400 {
            term *= -(q - (k - 1) as f64) / k as f64 * s;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (1.0 - s).powf(q) - 1.0 + q * s
    }
}

/// `(ξ - η)^p + p ξ^(p-1) η - ξ^p` minus
/// `max((p-1) η^2 ξ^(p-2), |η|^p)` for `p >= 2`, or minus
/// `p(p-1) η^2 / (2 (ξ + |η|)^(2-p))` for `1 <= p <= 2`.
pub fn check_pconvexity(p: f64, xi: f64, eta: f64) -> Result<f64> {
    if !(p >= 1.0) || !(xi >= 0.0) || !(xi - eta >= 0.0) || !eta.is_finite() || !xi.is_finite() {
        return Err(Error::Precondition(format!(
            "need p >= 1, xi >= 0, xi - eta >= 0 (p = {p}, xi = {xi}, eta = {eta})"
        )));
    }
    let s = if xi > 0.0 { eta / xi } else { f64::INFINITY };
    if s.abs() > DIRECT_CUTOFF {
        let lhs = (xi - eta).powf(p) + p * xi.powf(p - 1.0) * eta - xi.powf(p);
        let rhs = if p >= 2.0 {
            let quad = if p == 2.0 {
                eta * eta
            } else {
                (p - 1.0) * eta * eta * xi.powf(p - 2.0)
            };
            quad.max(eta.abs().powf(p))
        } else {
            0.5 * p * (p - 1.0) * eta * eta / (xi + eta.abs()).powf(2.0 - p)
        };
        return Ok(lhs - rhs);
    }
    let scale = xi.powf(p);
    let gap = if p >= 2.0 {
        // g_p(s) - (p-1)s^2 = (1 - s) g_(p-1)(s).
        let d1 = (1.0 - s) * convexity_gap(p - 1.0, s);
        let d2 = convexity_gap(p, s) - s.abs().powf(p);
        d1.min(d2)
    } else {
        convexity_gap(p, s) - 0.5 * p * (p - 1.0) * s * s / (1.0 + s.abs()).powf(2.0 - p)
    };
    Ok(scale * gap)
}

/// `ln tanh r` without rounding `tanh r` to 1.
fn ln_tanh(r: f64) -> f64 {
    let e = (-2.0 * r).exp();
    (-2.0 * e / (1.0 + e)).ln_1p()
}

/// `F̃(r) = (N-1) cosh^p r - (N-1) sinh^p r - p(p-1) cosh^(p-2) r`, as
/// `cosh^(p-2) r [(N-1-p(p-1)) + (N-1) sinh^2 r (1 - tanh^(p-2) r)]`.
pub fn ftilde(params: &Params, r: f64) -> f64 {
    let (n1, p) = (params.nf() - 1.0, params.p);
    let head = n1 - p * (p - 1.0);
    if r == 0.0 {
        return head;
    }
    let tail = n1 * r.sinh().powi(2) * -((p - 2.0) * ln_tanh(r)).exp_m1();
    r.cosh().powf(p - 2.0) * (head + tail)
}

/// Radii in `(0, 50]`: 200 geometric points on `[1e-6, 1]`, then a
/// uniform grid of step 0.1.
pub fn ftilde_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..200)
        .map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / 199.0))
        .collect();
    g.extend((1..=490).map(|i| 1.0 + 0.1 * i as f64));
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMin {
    pub arg: f64,
    pub value: f64,
}

/// Minimum of `F̃` over `grid` and where it occurs.
pub fn check_ftilde(params: &Params, grid: &[f64]) -> Result<GridMin> {
    if grid.is_empty() || grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Precondition(
            "grid must be non-empty and inside (0, inf)".into(),
        ));
    }
    let mut best = GridMin {
        arg: grid[0],
        value: f64::INFINITY,
    };
    for &r in grid {
        let v = ftilde(params, r);
        if v < best.value {
            best = GridMin { arg: r, value: v };
        }
    }
    Ok(best)
}

/// `ln g̃(r)` for `g̃(r) = (r / sinh r)^((N-1)/p) r^((p-N)/p)`.
fn ln_g_tilde(params: &Params, r: f64) -> f64 {
    let (n, p) = (params.nf(), params.p);
    (n - 1.0) / p * (r.ln() - ln_sinh(r)) + (p - n) / p * r.ln()
}

pub fn g_tilde(params: &Params, r: f64) -> f64 {
    ln_g_tilde(params, r).exp()
}

/// `g̃'/g̃ = -((N-1) coth r - (p-1)/r)/p`.
fn g_log_derivative(params: &Params, r: f64) -> f64 {
    -((params.nf() - 1.0) * coth(r) - (params.p - 1.0) / r) / params.p
}

/// `L_p g̃ / g̃` for `L_p u = (p-1) u'' + (N-1) coth r u'`, in closed form.
fn lp_g_closed(params: &Params, r: f64) -> f64 {
    let (n1, p) = (params.nf() - 1.0, params.p);
    let p2 = p * p;
    -((n1 / p).powi(2)
        + (p - 1.0).powi(2) / (p2 * r * r)
        + (p - 1.0) * (p - 2.0) * n1 * coth(r) / (p2 * r)
        + n1 * (n1 - p * (p - 1.0)) / (p2 * r.sinh().powi(2)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupersolutionResidual {
    pub r: f64,
    /// Relative gap between `L_p g̃` by finite differences and its closed form.
    pub identity: f64,
    /// Relative gap between `g̃'` by finite differences and its closed form.
    pub derivative: f64,
    pub warning: Option<String>,
}

const RICHARDSON_TOL: f64 = 1e-6;

/// Compare finite-difference derivatives of `g̃` at `r` with the closed
/// forms. First derivatives use step `fd_step`, second derivatives use
/// `sqrt(fd_step) * min(r, 1)`; both are Richardson-extrapolated.
pub fn supersolution_residual(
    params: &Params,
    r: f64,
    fd_step: f64,
) -> Result<SupersolutionResidual> {
    if !(r > 0.0) || !(fd_step > 0.0) {
        return Err(Error::Precondition(format!(
            "need r > 0 and fd_step > 0 (r = {r}, step = {fd_step})"
        )));
    }
    let h1 = fd_step;
    let h2 = fd_step.sqrt() * r.min(1.0);
    if h1 >= r || h2 >= r {
        return Err(Error::Precondition(format!(
            "step {h1} or {h2} is not small against r = {r}"
        )));
    }
    // g̃ normalized by g̃(r).
    let base = ln_g_tilde(params, r);
    let g = |t: f64| (ln_g_tilde(params, t) - base).exp();
    let d1 = |h: f64| (g(r + h) - g(r - h)) / (2.0 * h);
    let d2 = |h: f64| (g(r + h) - 2.0 + g(r - h)) / (h * h);
    let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;

    let dg = rich(d1(h1), d1(0.5 * h1));
    let closed_dg = g_log_derivative(params, r);
    let derivative = (dg - closed_dg).abs() / closed_dg.abs().max(f64::MIN_POSITIVE);

    let (coarse, fine) = (d2(h2), d2(0.5 * h2));
    let ddg = rich(coarse, fine);
    let mut warning = None;
    if (ddg - fine).abs() > 10.0 * RICHARDSON_TOL * ddg.abs() {
        warning = Some(format!(
            "step {h2:e} too large at r = {r}: Richardson correction {:e} relative",
            (ddg - fine).abs() / ddg.abs()
        ));
    }
    let dg_fd = rich(d1(h2), d1(0.5 * h2));
    let lp_fd = (params.p - 1.0) * ddg + (params.nf() - 1.0) * coth(r) * dg_fd;
    let lp = lp_g_closed(params, r);
    let identity = (lp_fd - lp).abs() / lp.abs();
    Ok(SupersolutionResidual {
        r,
        identity,
        derivative,
        warning,
    })
}
