//! Radial Green's function `G_p(r) = ∫_r^∞ (sinh s)^(-α) ds`, `α = (N-1)/(p-1)`,
//! and the weight `W = ((p-1)/p)^p |G'/G|^p - Λ_p`.
//!
//! Everything is computed through the scaled integrals
//!
//! ```text
//! Gs(r) = ∫_r^∞ (sinh r / sinh s)^α ds            = (sinh r)^α G_p(r)
//! Es(r) = ∫_r^∞ (sinh r / sinh s)^α e^{-s}/sinh s ds
//! ```
//!
//! which satisfy `α Gs + α Es = 1` (integrate `α coth s (sinh r/sinh s)^α`).
//! Then `W = Λ_p ((α Gs)^(-p) - 1) = Λ_p ((1 - α Es)^(-p) - 1)`; the second form
//! is used when `α Es` is small so that `W` keeps full relative accuracy at
//! large `r`, where `W ~ e^{-2r}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::Params;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_interval, integrate_semi_infinite, Endpoint, Endpoints, Envelope, QuadResult,
    Tolerance,
};
use crate::special::{ln_sinh, pow1m_minus_one};

/// Scaled Green integrals at one radius.
#[derive(Debug, Clone, Copy)]
pub struct GreenParts {
    pub gs: QuadResult,
    pub es: QuadResult,
}

#[derive(Clone, Copy)]
struct Kernel {
    alpha: f64,
    ln_sinh_r: f64,
}

impl Kernel {
    fn new(params: &Params, r: f64) -> Self {
        Kernel {
            alpha: params.alpha(),
            ln_sinh_r: ln_sinh(r),
        }
    }

    fn ratio(&self, s: f64) -> f64 {
        (self.alpha * (self.ln_sinh_r - ln_sinh(s))).exp()
    }

    fn g(&self, s: f64) -> f64 {
        self.ratio(s)
    }

    fn e(&self, s: f64) -> f64 {
        // e^{-s}/sinh s = 2/(e^{2s} - 1)
        self.ratio(s) * 2.0 / (2.0 * s).exp_m1()
    }

    /// Tail envelopes for `s >= r0 = max(r, 1)`, from
    /// `sinh s >= e^s (1 - e^{-2 r0}) / 2`.
    fn envelopes(&self, r: f64) -> (Envelope, Envelope) {
        let r0 = r.max(1.0);
        let c0 = (-(-2.0 * r0).exp()).ln_1p();
        let log_g = self.alpha * (std::f64::consts::LN_2 + self.ln_sinh_r - c0);
        let g = Envelope {
            log_constant: log_g,
            rate: self.alpha,
            valid_from: r0,
        };
        let e = Envelope {
            log_constant: log_g + std::f64::consts::LN_2 - c0,
            rate: self.alpha + 2.0,
            valid_from: r0,
        };
        (g, e)
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "Green's function needs finite r > 0, got {r}"
        )));
    }
    Ok(())
}

fn left_end(r: f64) -> Endpoint {
    if r < 1.0 {
        Endpoint::Singular
    } else {
        Endpoint::Regular
    }
}

fn chunk(r: f64) -> f64 {
    r.clamp(1e-3, 1.0)
}

fn scaled_g_tail(params: &Params, r: f64, tol: Tolerance) -> Result<QuadResult> {
    let k = Kernel::new(params, r);
    let (env, _) = k.envelopes(r);
    integrate_semi_infinite(|s| k.g(s), r, env, tol, left_end(r), chunk(r))
}

fn scaled_e_tail(params: &Params, r: f64, tol: Tolerance) -> Result<QuadResult> {
    let k = Kernel::new(params, r);
    let (_, env) = k.envelopes(r);
    integrate_semi_infinite(|s| k.e(s), r, env, tol, left_end(r), chunk(r))
}

/// `Gs(r)` and `Es(r)` to relative accuracy `tol`.
pub fn green_parts(params: &Params, r: f64, tol: f64) -> Result<GreenParts> {
    check_r(r)?;
    let t = Tolerance::relative(tol);
    Ok(GreenParts {
        gs: scaled_g_tail(params, r, t)?,
        es: scaled_e_tail(params, r, t)?,
    })
}

/// `G_p(r)` with the multiplicative constant fixed to 1. `tol` is relative.
pub fn green_gp(params: &Params, r: f64, tol: f64) -> Result<QuadResult> {
    check_r(r)?;
    let gs = scaled_g_tail(params, r, Tolerance::relative(tol))?;
    let factor = (-params.alpha() * ln_sinh(r)).exp();
    Ok(gs.scale(factor))
}

/// `W(r)` from either scaled integral, with first-order error propagation.
fn w_from_e(params: &Params, es: QuadResult) -> (f64, f64) {
    let a = params.alpha();
    let lam = params.lambda_p();
    let x = a * es.value;
    let w = lam * pow1m_minus_one(x, -params.p);
    let dw = lam * params.p * (1.0 - x).powf(-params.p - 1.0) * a;
    (w, dw * es.error_estimate)
}

fn w_from_g(params: &Params, gs: QuadResult) -> (f64, f64) {
    let a = params.alpha();
    let lam = params.lambda_p();
    let y = a * gs.value;
    let w = lam * (y.powf(-params.p) - 1.0);
    let dw = lam * params.p * y.powf(-params.p - 1.0) * a;
    (w, dw * gs.error_estimate)
}

/// Threshold on `α Es` below which the `Es` route is used.
const E_ROUTE_MAX: f64 = 0.5;

/// `W(r)` with an error estimate. `tol` is the relative tolerance of the
/// underlying integrals.
pub fn weight_w_estimate(params: &Params, r: f64, tol: f64) -> Result<(f64, f64)> {
    check_r(r)?;
    let t = Tolerance::relative(tol);
    let es = scaled_e_tail(params, r, t)?;
    if params.alpha() * es.value <= E_ROUTE_MAX {
        return Ok(w_from_e(params, es));
    }
    let gs = scaled_g_tail(params, r, t)?;
    Ok(w_from_g(params, gs))
}

pub fn weight_w(params: &Params, r: f64, tol: f64) -> Result<f64> {
    weight_w_estimate(params, r, tol).map(|(w, _)| w)
}

/// Tabulated `Gs`, `Es` on a fixed radial grid, built once per `(N, p)` by a
/// backward recursion so that `W` at an arbitrary radius costs one short
/// integral instead of a semi-infinite one.
#[derive(Debug)]
pub struct GreenTable {
    params: Params,
    tol: f64,
    nodes: Vec<f64>,
    gs: Vec<QuadResult>,
    es: Vec<QuadResult>,
}

const TABLE_LO: f64 = 1e-3;
const TABLE_HI: f64 = 50.0;
const TABLE_GEOMETRIC: usize = 40;
const TABLE_STEP: f64 = 0.25;

fn table_nodes() -> Vec<f64> {
    let mut nodes = Vec::new();
    let ratio = (1.0 / TABLE_LO).powf(1.0 / TABLE_GEOMETRIC as f64);
    for i in 0..TABLE_GEOMETRIC {
        nodes.push(TABLE_LO * ratio.powi(i as i32));
    }
    let steps = ((TABLE_HI - 1.0) / TABLE_STEP).round() as usize;
    for i in 0..=steps {
        nodes.push(1.0 + i as f64 * TABLE_STEP);
    }
    nodes
}

type TableKey = (u32, u64, u64);

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<GreenTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<GreenTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl GreenTable {
    pub fn build(params: &Params, tol: f64) -> Result<Self> {
        let nodes = table_nodes();
        let n = nodes.len();
        let t = Tolerance::relative(tol);
        let mut gs = vec![QuadResult::zero(); n];
        let mut es = vec![QuadResult::zero(); n];
        gs[n - 1] = scaled_g_tail(params, nodes[n - 1], t)?;
        es[n - 1] = scaled_e_tail(params, nodes[n - 1], t)?;
        for k in (0..n - 1).rev() {
            let (a, b) = (nodes[k], nodes[k + 1]);
            let ker = Kernel::new(params, a);
            let ends = Endpoints {
                left: left_end(a),
                right: Endpoint::Regular,
            };
            let carry = ker.ratio(b);
            let pg = integrate_interval(|s| ker.g(s), a, b, t, ends)?;
            let pe = integrate_interval(|s| ker.e(s), a, b, t, ends)?;
            gs[k] = pg.combine(gs[k + 1].scale(carry));
            es[k] = pe.combine(es[k + 1].scale(carry));
        }
        Ok(GreenTable {
            params: *params,
            tol,
            nodes,
            gs,
            es,
        })
    }

    /// Shared table for `(N, p, tol)`; built on first use.
    pub fn shared(params: &Params, tol: f64) -> Result<Arc<Self>> {
        let key = (params.n, params.p.to_bits(), tol.to_bits());
        if let Some(t) = table_cache().lock().unwrap().get(&key) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(GreenTable::build(params, tol)?);
        let mut cache = table_cache().lock().unwrap();
        Ok(Arc::clone(cache.entry(key).or_insert(table)))
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn parts(&self, r: f64) -> Result<GreenParts> {
        check_r(r)?;
        let n = self.nodes.len();
        if r < self.nodes[0] || r >= self.nodes[n - 1] {
            return green_parts(&self.params, r, self.tol);
        }
        let k = self.nodes.partition_point(|&x| x <= r) - 1;
        if r == self.nodes[k] {
            return Ok(GreenParts {
                gs: self.gs[k],
                es: self.es[k],
            });
        }
        let b = self.nodes[k + 1];
        let ker = Kernel::new(&self.params, r);
        let carry = ker.ratio(b);
        let t = Tolerance::relative(self.tol);
        let ends = Endpoints {
            left: left_end(r),
            right: Endpoint::Regular,
        };
        let pg = integrate_interval(|s| ker.g(s), r, b, t, ends)?;
        let pe = integrate_interval(|s| ker.e(s), r, b, t, ends)?;
        Ok(GreenParts {
            gs: pg.combine(self.gs[k + 1].scale(carry)),
            es: pe.combine(self.es[k + 1].scale(carry)),
        })
    }

    /// `W(r)` and its propagated error.
    pub fn weight(&self, r: f64) -> Result<(f64, f64)> {
        let parts = self.parts(r)?;
        if self.params.alpha() * parts.es.value <= E_ROUTE_MAX {
            Ok(w_from_e(&self.params, parts.es))
        } else {
            Ok(w_from_g(&self.params, parts.gs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(n: u32, p: f64) -> Params {
        Params::new(n, p).unwrap()
    }

    #[test]
    fn closed_form_two_dimensions() {
        // N = p = 2: antiderivative -log coth(s/2).
        let g = green_gp(&pr(2, 2.0), 1.0, 1e-12).unwrap();
        let exact = (1.0 / 0.5f64.tanh()).ln();
        assert!((g.value - exact).abs() < 1e-11);
        assert!((g.value - 0.771_936).abs() < 1e-6);
        assert!(g.error_estimate <= 1e-12 * g.value);
    }

    #[test]
    fn closed_form_three_dimensions() {
        // N = 3, p = 2: ∫ sinh^-2 = coth r - 1.
        for &r in &[1e-3, 0.2, 1.0, 7.0, 30.0] {
            let g = green_gp(&pr(3, 2.0), r, 1e-12).unwrap();
            let exact = 2.0 / (2.0f64 * r).exp_m1();
            assert!(((g.value - exact) / exact).abs() < 1e-10, "r = {r}");
        }
    }

    #[test]
    fn scaled_parts_sum_to_one() {
        for &(n, p) in &[(2u32, 2.0), (5, 2.0), (13, 4.0), (2, 3.0), (4, 1.5)] {
            let params = pr(n, p);
            for &r in &[1e-3, 0.5, 3.0, 25.0] {
                let parts = green_parts(&params, r, 1e-12).unwrap();
                let a = params.alpha();
                let s = a * parts.gs.value + a * parts.es.value;
                assert!((s - 1.0).abs() < 1e-10, "N={n} p={p} r={r}: {s}");
            }
        }
    }

    #[test]
    fn decreasing_and_vanishing() {
        let params = pr(3, 2.0);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let r = 0.1 + i as f64 * 0.7;
            let g = green_gp(&params, r, 1e-10).unwrap().value;
            assert!(g < prev);
            prev = g;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn below_paper_upper_bound() {
        for &(n, p) in &[(2u32, 2.0), (5, 3.0), (13, 4.0), (3, 1.5)] {
            let params = pr(n, p);
            let a = params.alpha();
            for &r in &[0.05, 1.0, 4.0] {
                let g = green_gp(&params, r, 1e-10).unwrap().value;
                let bound = r.sinh().powf(-a) / a;
                assert!(g < bound);
            }
        }
    }

    #[test]
    fn weight_positive_and_table_agrees() {
        let params = pr(13, 4.0);
        let table = GreenTable::build(&params, 1e-12).unwrap();
        for &r in &[5e-4, 1e-3, 0.0123, 0.7, 1.0, 3.3, 49.9, 50.0, 60.0] {
            let (w, _) = weight_w_estimate(&params, r, 1e-12).unwrap();
            let (wt, _) = table.weight(r).unwrap();
            assert!(w > 0.0);
            assert!(((w - wt) / w).abs() < 1e-9, "r = {r}: {w} vs {wt}");
        }
    }

    #[test]
    fn weight_invariant_under_normalization() {
        // W only sees G'/G, so rescaling G and G' together changes nothing.
        let params = pr(5, 2.0);
        let r = 0.8;
        let g = green_gp(&params, r, 1e-12).unwrap().value;
        let gp = r.sinh().powf(-params.alpha());
        let w_direct = ((params.p - 1.0) / params.p).powf(params.p) * (gp / g).powf(params.p)
            - params.lambda_p();
        let c = 37.5;
        let w_scaled = ((params.p - 1.0) / params.p).powf(params.p)
            * ((c * gp) / (c * g)).powf(params.p)
            - params.lambda_p();
        let w = weight_w(&params, r, 1e-12).unwrap();
        assert!((w - w_direct).abs() < 1e-9 * w);
        assert!((w_scaled - w_direct).abs() < 1e-12 * w);
    }
}
