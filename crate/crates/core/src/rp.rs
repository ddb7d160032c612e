//! The sign-change radius `r0` of `h` and the critical radius `r_p` where
//! `H_p` crosses 1, with monotonicity scans in `N` and `p`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyp::{h_func, weight_hp, Params};
use crate::roots::{bisect_newton, RootResult};
use crate::special::coth_minus_inv;

const BRACKET_LO: f64 = 1e-8;
const BISECT_WIDTH: f64 = 1e-6;
const N_STEP: f64 = 1e-3;
const P_STEP: f64 = 1e-4;

/// `r_p`, or the `+inf` radius of the case `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rp {
    Finite(RootResult),
    Infinite,
}

impl Rp {
    pub fn radius(&self) -> f64 {
        match self {
            Rp::Finite(r) => r.root,
            Rp::Infinite => f64::INFINITY,
        }
    }
}

/// `coth r - 1 - (p-1)/((N-1) r)` with real `N`.
fn rp_residual(nf: f64, p: f64, r: f64) -> f64 {
    let k = (p - 1.0) / (nf - 1.0);
    coth_minus_inv(r) + (1.0 - k) / r - 1.0
}

/// Left side of the critical-radius equation at `r`.
pub fn rp_equation(params: &Params, r: f64) -> f64 {
    rp_residual(params.nf(), params.p, r)
}

fn r0_raw(nf: f64, p: f64) -> Result<RootResult> {
    if !(nf > p) {
        return Err(Error::NoSignChange(format!(
            "h < 0 has no positive sign change unless N > p (N = {nf}, p = {p})"
        )));
    }
    let target = ((nf - 1.0) / (p - 1.0)).sqrt();
    // sinh r / r - target, positive multiple of h(r) / r^2.
    let f = |r: f64| r.sinh() / r - target;
    let df = |r: f64| (r * r.cosh() - r.sinh()) / (r * r);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::NoSignChange(format!(
                "h stays negative up to r = {hi}"
            )));
        }
    }
    let mut res = bisect_newton(f, df, BRACKET_LO, hi, BISECT_WIDTH)?;
    let (n_eff, pm1) = (nf - 1.0, p - 1.0);
    res.residual = (-n_eff * res.root * res.root + pm1 * res.root.sinh().powi(2)).abs()
        / (res.root * res.root);
    Ok(res)
}

/// Positive zero of `h(r) = -(N-1) r^2 + (p-1) sinh^2 r`.
///
/// The reported residual is `|h(r0)| / r0^2`.
pub fn solve_r0(params: &Params) -> Result<RootResult> {
    r0_raw(params.nf(), params.p)
}

fn rp_raw(nf: f64, p: f64) -> Result<RootResult> {
    let r0 = r0_raw(nf, p)?;
    let k = (p - 1.0) / (nf - 1.0);
    let e = |r: f64| rp_residual(nf, p, r);
    let de = |r: f64| -1.0 / r.sinh().powi(2) + k / (r * r);
    let mut res = bisect_newton(e, de, BRACKET_LO, r0.root, BISECT_WIDTH)?;
    // Keep the root on the side where H_p >= 1.
    let mut guard = 0;
    while e(res.root) < 0.0 && guard < 64 {
        res.root = f64::from_bits(res.root.to_bits() - 1);
        guard += 1;
    }
    res.residual = e(res.root).abs();
    res.bracket = (BRACKET_LO, r0.root);
    Ok(res)
}

/// Root of `coth r - 1 - (p-1)/((N-1) r)`, inside `(0, r0)`.
pub fn solve_rp(params: &Params) -> Result<Rp> {
    if !params.hypo_thm25() {
        return Err(Error::hypothesis(
            "r_p",
            format!(
                "p >= 2 and N >= 1 + p(p-1) (N = {}, p = {})",
                params.n, params.p
            ),
        ));
    }
    if params.p == 2.0 {
        return Ok(Rp::Infinite);
    }
    rp_raw(params.nf(), params.p).map(Rp::Finite)
}

/// One row of an `r_p` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RpScanRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
    pub rp: f64,
    pub residual: f64,
    /// Central difference in the scanned variable (real-valued `N` or `p`).
    pub slope_fd: f64,
    /// Implicit-derivative formula in the form stated with the monotonicity
    /// result.
    pub slope_stated: f64,
    /// Implicit derivative of the critical-radius equation.
    pub slope_implicit: f64,
}

fn rp_value(nf: f64, p: f64) -> Result<f64> {
    rp_raw(nf, p).map(|r| r.root)
}

/// `dr_p/dN = -(p-1) r sinh^2 r / ((N-1) h(r))`.
pub fn slope_in_n(params: &Params, r: f64) -> f64 {
    -(params.p - 1.0) * r * r.sinh().powi(2) / ((params.nf() - 1.0) * h_func(params, r))
}

/// `r sinh^2 r / ((N-1) h(r))`, as stated for `dr_p/dp`.
pub fn slope_in_p_stated(params: &Params, r: f64) -> f64 {
    r * r.sinh().powi(2) / ((params.nf() - 1.0) * h_func(params, r))
}

/// `dr_p/dp = r sinh^2 r / h(r)`, from differentiating the equation.
pub fn slope_in_p(params: &Params, r: f64) -> f64 {
    r * r.sinh().powi(2) / h_func(params, r)
}

/// `r_p(N)` for each `N` in `ns` at fixed `p > 2`.
pub fn rp_scan_n(p: f64, ns: &[u32]) -> Result<Vec<RpScanRow>> {
    if !(p > 2.0) {
        return Err(Error::InvalidParams(format!(
            "the N-scan needs p > 2, got {p}"
        )));
    }
    ns.iter()
        .map(|&n| {
            let params = Params::new(n, p)?;
            let root = match solve_rp(&params)? {
                Rp::Finite(r) => r,
                Rp::Infinite => unreachable!(),
            };
            let nf = params.nf();
            let fd = (rp_value(nf + N_STEP, p)? - rp_value(nf - N_STEP, p)?) / (2.0 * N_STEP);
            let s = slope_in_n(&params, root.root);
            Ok(RpScanRow {
                n,
                p,
                rp: root.root,
                residual: root.residual,
                slope_fd: fd,
                slope_stated: s,
                slope_implicit: s,
            })
        })
        .collect()
}

/// `r_p(p)` for each `p` in `ps` at fixed `N`; every `p` must lie in
/// `(2, (1 + sqrt(4N - 3))/2]`.
pub fn rp_scan_p(n: u32, ps: &[f64]) -> Result<Vec<RpScanRow>> {
    let p_max = Params::p_max_for(n);
    ps.iter()
        .map(|&p| {
            if !(p > 2.0 && p <= p_max + crate::hyp::HYPOTHESIS_SLACK) {
                return Err(Error::hypothesis(
                    "rp-scan",
                    format!("2 < p <= (1 + sqrt(4N - 3))/2 = {p_max} (p = {p})"),
                ));
            }
            let params = Params::new(n, p)?;
            let root = match solve_rp(&params)? {
                Rp::Finite(r) => r,
                Rp::Infinite => unreachable!(),
            };
            let nf = params.nf();
            let fd = (rp_value(nf, p + P_STEP)? - rp_value(nf, p - P_STEP)?) / (2.0 * P_STEP);
            Ok(RpScanRow {
                n,
                p,
                rp: root.root,
                residual: root.residual,
                slope_fd: fd,
                slope_stated: slope_in_p_stated(&params, root.root),
                slope_implicit: slope_in_p(&params, root.root),
            })
        })
        .collect()
}

/// One sample of `H_p` on the Figure-1 style curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub r: f64,
    pub hp: f64,
    pub is_ge_one: bool,
}

/// `H_p` at `samples` equally spaced radii in `(0, r_max]`, plus `r_p`.
pub fn hp_curve(params: &Params, r_max: f64, samples: usize) -> Result<(Vec<CurvePoint>, Rp)> {
    if !(r_max > 0.0) || samples == 0 {
        return Err(Error::Precondition(format!(
            "need r_max > 0 and at least one sample (r_max = {r_max}, samples = {samples})"
        )));
    }
    let rp = solve_rp(params)?;
    let h = r_max / samples as f64;
    let points = (1..=samples)
        .map(|i| {
            let r = i as f64 * h;
            let hp = weight_hp(params, r)?;
            Ok(CurvePoint {
                r,
                hp,
                is_ge_one: hp >= 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((points, rp))
}
