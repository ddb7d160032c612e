//! Closed-form constants of the half-space remainder estimate and the
//! brute-force maximizations they come from.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyp::Params;
use crate::optim::{grid_golden_max, Maximum};

const GOLDEN_XTOL: f64 = 1e-12;

/// `q_b = 1` for `1 <= b <= 2`, `b/2` otherwise.
pub fn q_b(b: f64) -> f64 {
    if (1.0..=2.0).contains(&b) {
        1.0
    } else {
        0.5 * b
    }
}

/// Slack of `1 - (1-s)^b >= b s - q_b (b-1) s^2` on `s ∈ [0, 1]`.
pub fn check_ni(b: f64, s: f64) -> f64 {
    let lhs = -(b * (-s).ln_1p()).exp_m1();
    let rhs = b * s - q_b(b) * (b - 1.0) * s * s;
    lhs - rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CnpKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CnpCase {
    #[serde(rename = "p<=4/3")]
    UpToFourThirds,
    #[serde(rename = "4/3<p<=2")]
    UpToTwo,
    #[serde(rename = "2<p<=2(N-1)^2")]
    Moderate,
    #[serde(rename = "p>2(N-1)^2")]
    Large,
    #[serde(rename = "N=2-refined")]
    TwoDimRefined,
}

impl CnpCase {
    pub fn label(&self) -> &'static str {
        match self {
            CnpCase::UpToFourThirds => "p<=4/3",
            CnpCase::UpToTwo => "4/3<p<=2",
            CnpCase::Moderate => "2<p<=2(N-1)^2",
            CnpCase::Large => "p>2(N-1)^2",
            CnpCase::TwoDimRefined => "N=2-refined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CnpResult {
    pub value: f64,
    pub kind: CnpKind,
    pub case: CnpCase,
    /// Maximizing `a` (or `c`) where the case has one.
    pub optimizer_arg: Option<f64>,
    /// `M = max f` for the `N = 2` refinements.
    pub m: Option<f64>,
}

/// `f(c) = c(1 - c(N-1)/2) - c^2 (2-c)^2 q_{p'/2} (2-p)(N-1)/(2p)`.
pub fn f_c(params: &Params, c: f64) -> f64 {
    let (nm1, p) = (params.nf() - 1.0, params.p);
    let q = q_b(params.p_prime() / 2.0);
    c * (1.0 - c * nm1 / 2.0) - c * c * (2.0 - c).powi(2) * q * (2.0 - p) * nm1 / (2.0 * p)
}

/// `μ1(a) = a / (1 + (a/M)(1 + (N-1)a/(2(p-1))))`.
pub fn mu1(params: &Params, m: f64, a: f64) -> f64 {
    let nm1 = params.nf() - 1.0;
    a / (1.0 + (a / m) * (1.0 + nm1 * a / (2.0 * (params.p - 1.0))))
}

/// `μ2(a) = a / (1 + 2(N-1) a (1 + (N-1)a/p))`.
pub fn mu2(params: &Params, a: f64) -> f64 {
    let nm1 = params.nf() - 1.0;
    a / (1.0 + 2.0 * nm1 * a * (1.0 + nm1 * a / params.p))
}

/// `γ(M) = ((N-1)/p) M / (1 + sqrt(2(N-1)M/(p-1)))`, the value of
/// `((N-1)/p) max μ1` when the maximizer lies in `[0, 1]`.
pub fn gamma_m(params: &Params, m: f64) -> f64 {
    let nm1 = params.nf() - 1.0;
    nm1 / params.p * m / (1.0 + (2.0 * nm1 * m / (params.p - 1.0)).sqrt())
}

/// `δ = q_{p'/2} (2-p)/p`.
pub fn delta(params: &Params) -> f64 {
    q_b(params.p_prime() / 2.0) * (2.0 - params.p) / params.p
}

/// Explicit lower bound `γ(1/(2β(1+4δ)))` with `β = N - 1`.
pub fn cnp_lower_bound(params: &Params) -> f64 {
    let d = delta(params);
    let p = params.p;
    1.0 / (2.0 * p * (1.0 + 4.0 * d)) / (1.0 + ((p - 1.0) * (1.0 + 4.0 * d)).powf(-0.5))
}

/// The case value of `C(N, p)`.
pub fn c_np(params: &Params) -> CnpResult {
    let (nm1, p) = (params.nf() - 1.0, params.p);
    if p <= 4.0 / 3.0 {
        CnpResult {
            value: 1.0 / (4.0 * params.p_prime()),
            kind: CnpKind::LowerBound,
            case: CnpCase::UpToFourThirds,
            optimizer_arg: None,
            m: None,
        }
    } else if p <= 2.0 {
        let t = 8.0 - 3.0 * p;
        CnpResult {
            value: 1.0 / (2.0 * t + 2.0 * (params.p_prime() * t).sqrt()),
            kind: CnpKind::LowerBound,
            case: CnpCase::UpToTwo,
            optimizer_arg: None,
            m: None,
        }
    } else {
        let a0 = (p / 2.0).sqrt() / nm1;
        if p <= 2.0 * nm1 * nm1 {
            CnpResult {
                value: 1.0 / (2.0 * p + 2.0 * (2.0 * p).sqrt()),
                kind: CnpKind::Exact,
                case: CnpCase::Moderate,
                optimizer_arg: Some(a0),
                m: None,
            }
        } else {
            CnpResult {
                value: 1.0 / (p / nm1 + 2.0 * p + 2.0 * nm1),
                kind: CnpKind::Exact,
                case: CnpCase::Large,
                optimizer_arg: Some(1.0),
                m: None,
            }
        }
    }
}

fn check_two_dim_range(p: f64) -> Result<Params> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParams(format!(
            "C(2,p) needs 1 < p < 2, got {p}"
        )));
    }
    Params::new(2, p)
}

/// The two printed closed forms for `C(2, p)`.
pub fn c_2p(p: f64) -> Result<CnpResult> {
    let params = check_two_dim_range(p)?;
    let pp = params.p_prime();
    let d = delta(&params);
    let (value, m, arg) = if p >= 4.0 / 3.0 {
        let v = (1.0 / pp) * 2f64.sqrt() / (2f64.sqrt() * p + p.sqrt());
        (v, (1.0 - d) / 2.0, 1.0)
    } else {
        let v = (1.0 / pp) / (2.0 * (2.0 - p) + (2.0 - p).sqrt());
        (v, 1.0 / (8.0 * d), 1.0 - (1.0 - 1.0 / (2.0 * d)).sqrt())
    };
    Ok(CnpResult {
        value,
        kind: CnpKind::Exact,
        case: CnpCase::TwoDimRefined,
        optimizer_arg: Some(arg),
        m: Some(m),
    })
}

/// `γ(M)` at the same `M` as [`c_2p`], i.e. `C(2,p)` recomputed from the
/// definition: `(1/p') / (p + sqrt(2p))` for `4/3 <= p < 2` and
/// `(1/p') / (2(2-p) + 2 sqrt(2-p))` for `1 < p < 4/3`.
pub fn c_2p_from_gamma(p: f64) -> Result<CnpResult> {
    let params = check_two_dim_range(p)?;
    let printed = c_2p(p)?;
    let m = printed.m.unwrap_or(0.0);
    Ok(CnpResult {
        value: gamma_m(&params, m),
        ..printed
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForce {
    /// `((N-1)/p) max μ`.
    pub value: f64,
    pub a_max: f64,
    /// `M = max f` (only for `p <= 2`).
    pub m: Option<f64>,
    pub c_max: Option<f64>,
}

/// `C(N,p)` from its definition: grid search plus golden-section polish of
/// `f` (for `p <= 2`) and then of `μ1` or `μ2` over `[0, 1]`.
pub fn brute_force_cnp(params: &Params, grid_size: usize) -> Result<BruteForce> {
    if grid_size < 1000 {
        return Err(Error::InvalidParams(format!(
            "grid size must be at least 1000, got {grid_size}"
        )));
    }
    let scale = (params.nf() - 1.0) / params.p;
    if params.p <= 2.0 {
        let fm: Maximum = grid_golden_max(|c| f_c(params, c), 0.0, 1.0, grid_size, GOLDEN_XTOL);
        let m = fm.value;
        let best = grid_golden_max(|a| mu1(params, m, a), 0.0, 1.0, grid_size, GOLDEN_XTOL);
        Ok(BruteForce {
            value: scale * best.value,
            a_max: best.arg,
            m: Some(m),
            c_max: Some(fm.arg),
        })
    } else {
        let best = grid_golden_max(|a| mu2(params, a), 0.0, 1.0, grid_size, GOLDEN_XTOL);
        Ok(BruteForce {
            value: scale * best.value,
            a_max: best.arg,
            m: None,
            c_max: None,
        })
    }
}
