//! Test-function families: compactly supported radial bumps, the
//! one-dimensional Hardy extremals `V_ε^δ`, the half-space family `U_ε`
//! with its radial profile, separable half-space bumps, and seeded random
//! draws of each.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{HalfSpacePoint, Params};
use crate::quadrature::{Envelope, HalfSpaceBox, RadialTestFunction, Smoothness};
use crate::special::ln_two_cosh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpShape {
    /// `exp(-1/(1-t^2))` in the normalized coordinate `t ∈ (-1, 1)`.
    Mollifier,
    /// `1 - |t|`.
    Tent,
}

/// Mollifier `exp(-1/(1-t^2))` and its `t`-derivative.
fn mollifier(t: f64) -> (f64, f64) {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    let v = (-1.0 / s).exp();
    (v, v * (-2.0 * t / (s * s)))
}

/// Bump supported on `[lo, hi]`.
pub fn make_bump(lo: f64, hi: f64, shape: BumpShape) -> Result<RadialTestFunction> {
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Precondition(format!(
            "bump support must satisfy 0 <= lo < hi < inf, got [{lo}, {hi}]"
        )));
    }
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let id = format!(
        "{}[{lo},{hi}]",
        match shape {
            BumpShape::Mollifier => "mollifier",
            BumpShape::Tent => "tent",
        }
    );
    match shape {
        BumpShape::Mollifier => {
            let u = RadialTestFunction::new(
                id,
                Arc::new(move |r| mollifier((r - c) / h).0),
                Arc::new(move |r| mollifier((r - c) / h).1 / h),
                (lo, hi),
                Smoothness::Smooth,
            )?
            .with_ln_abs_value(Arc::new(move |r| {
                let t = (r - c) / h;
                let s = 1.0 - t * t;
                if s <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / s
                }
            }));
            Ok(u)
        }
        BumpShape::Tent => Ok(RadialTestFunction::new(
            id,
            Arc::new(move |r| (1.0 - ((r - c) / h).abs()).max(0.0)),
            Arc::new(move |r| if r < c { 1.0 / h } else { -1.0 / h }),
            (lo, hi),
            Smoothness::PiecewiseC1,
        )?
        .with_breakpoints(vec![c])),
    }
}

/// `V_ε^δ`: `r^γ` on `(0, ε)`, `ε^γ` on `[ε, 1)`, `ε^γ (2 - r)` on `[1, 2)`,
/// zero afterwards, with `γ = (p - 1 + δ)/p`.
pub fn make_veps(p: f64, eps: f64, delta: f64) -> Result<RadialTestFunction> {
    if !(p > 1.0) {
        return Err(Error::InvalidParams(format!("p must exceed 1, got {p}")));
    }
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < eps < 1 and delta > 0, got eps = {eps}, delta = {delta}"
        )));
    }
    let g = (p - 1.0 + delta) / p;
    let top = eps.powf(g);
    let value = move |r: f64| {
        if r < eps {
            r.powf(g)
        } else if r < 1.0 {
            top
        } else if r < 2.0 {
            top * (2.0 - r)
        } else {
            0.0
        }
    };
    let derivative = move |r: f64| {
        if r < eps {
            g * r.powf(g - 1.0)
        } else if r < 1.0 {
            0.0
        } else if r < 2.0 {
            -top
        } else {
            0.0
        }
    };
    Ok(RadialTestFunction::new(
        format!("veps[p={p},eps={eps},delta={delta}]"),
        Arc::new(value),
        Arc::new(derivative),
        (0.0, 2.0),
        Smoothness::PiecewiseC1,
    )?
    .with_breakpoints(vec![eps, 1.0])
    .with_origin_exponent(g))
}

/// Exponent `(N - 1 + ε)/p` of the family `U_ε`.
fn ueps_exponent(params: &Params, eps: f64) -> f64 {
    (params.nf() - 1.0 + eps) / params.p
}

/// `U_ε` as a function of the distance `r` from `(0, 1)`:
/// `y/((1+y)^2 + |x|^2) = 1/(4 cosh^2(r/2))`, so
/// `U_ε = (2 cosh(r/2))^(-2λ)`, `λ = (N-1+ε)/p`, and
/// `|∇_H U_ε| = |U_ε'| = λ tanh(r/2) U_ε`.
pub fn ueps_radial(params: &Params, eps: f64) -> Result<RadialTestFunction> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let lam = ueps_exponent(params, eps);
    let ln_u = move |r: f64| -2.0 * lam * ln_two_cosh(0.5 * r);
    Ok(RadialTestFunction::new(
        format!("ueps-radial[eps={eps}]"),
        Arc::new(move |r| ln_u(r).exp()),
        Arc::new(move |r| -lam * (0.5 * r).tanh() * ln_u(r).exp()),
        (0.0, f64::INFINITY),
        Smoothness::Smooth,
    )?
    .with_ln_abs_value(Arc::new(ln_u))
    .with_ln_abs_derivative(Arc::new(move |r| {
        lam.ln() + (0.5 * r).tanh().ln() + ln_u(r)
    }))
    .with_decay(Envelope {
        log_constant: lam.ln().max(0.0),
        rate: lam,
        valid_from: 0.0,
    }))
}

pub type PointFn = Arc<dyn Fn(&HalfSpacePoint) -> f64 + Send + Sync>;

/// Function on the half-space depending only on `(x1, rho, y)`, with the
/// Euclidean norm of its gradient.
#[derive(Clone)]
pub struct HalfSpaceFunction {
    id: String,
    value: PointFn,
    gradient_norm: PointFn,
    region: HalfSpaceBox,
    /// `(rate, log constant)` of an exponential bound in the distance from
    /// `(0, 1)`, when the support is unbounded.
    decay: Option<(f64, f64)>,
}

impl fmt::Debug for HalfSpaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfSpaceFunction")
            .field("id", &self.id)
            .field("region", &self.region)
            .finish_non_exhaustive()
    }
}

impl HalfSpaceFunction {
    pub fn new(
        id: impl Into<String>,
        value: PointFn,
        gradient_norm: PointFn,
        region: HalfSpaceBox,
    ) -> Self {
        HalfSpaceFunction {
            id: id.into(),
            value,
            gradient_norm,
            region,
            decay: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn value(&self, pt: &HalfSpacePoint) -> f64 {
        (self.value)(pt)
    }

    pub fn gradient_norm(&self, pt: &HalfSpacePoint) -> f64 {
        (self.gradient_norm)(pt)
    }

    /// Box containing the support (the whole half-space for `U_ε`).
    pub fn region(&self) -> &HalfSpaceBox {
        &self.region
    }

    pub fn decay(&self) -> Option<(f64, f64)> {
        self.decay
    }

    /// Largest relative discrepancy between the gradient norm and central
    /// differences in `x1`, `rho` (for `N >= 3`) and `y`, at `points` random
    /// points where the function is not negligible.
    pub fn gradient_consistency(&self, n: u32, points: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = &self.region;
        let clip = |lo: f64, hi: f64, d: f64| (lo.max(-d), hi.min(d));
        let (x0, x1) = clip(b.x1.0, b.x1.1, 5.0);
        let rmax = b.rho_max.min(5.0);
        let (y0, y1) = (b.y.0.max(0.05), b.y.1.min(10.0));
        let h = 1e-4;
        let mut worst = 0.0f64;
        let mut taken = 0;
        let mut guard = 0;
        while taken < points && guard < 1000 * points {
            guard += 1;
            let pt = HalfSpacePoint {
                x1: rng.random_range(x0..x1),
                rho: if n >= 3 {
                    rng.random_range(0.05 * rmax..0.95 * rmax)
                } else {
                    0.0
                },
                y: rng.random_range(y0..y1),
            };
            let g = self.gradient_norm(&pt);
            if g < 1e-6 * self.value(&pt).abs().max(1e-12) || g < 1e-12 {
                continue;
            }
            let step = h * pt.y.min(1.0);
            let d = |f: &dyn Fn(f64) -> HalfSpacePoint| {
                let a = |s: f64| (self.value(&f(s)) - self.value(&f(-s))) / (2.0 * s);
                (4.0 * a(0.5 * step) - a(step)) / 3.0
            };
            let dx = d(&|s| HalfSpacePoint {
                x1: pt.x1 + s,
                ..pt
            });
            let dy = d(&|s| HalfSpacePoint { y: pt.y + s, ..pt });
            let dr = if n >= 3 {
                d(&|s| HalfSpacePoint {
                    rho: pt.rho + s,
                    ..pt
                })
            } else {
                0.0
            };
            let fd = (dx * dx + dy * dy + dr * dr).sqrt();
            worst = worst.max((fd - g).abs() / g);
            taken += 1;
        }
        worst
    }
}

/// `U_ε(x, y) = (y / ((1+y)^2 + |x|^2))^λ`, `λ = (N-1+ε)/p`, with
/// `|∇U_ε| = λ U_ε sqrt((1 - y^2 + |x|^2)^2 + 4|x|^2 y^2) / (y ((1+y)^2 + |x|^2))`.
pub fn make_ueps(params: &Params, eps: f64) -> Result<HalfSpaceFunction> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let lam = ueps_exponent(params, eps);
    let value = move |pt: &HalfSpacePoint| {
        let d = (1.0 + pt.y).powi(2) + pt.x_norm_sq();
        (pt.y / d).powf(lam)
    };
    let grad = move |pt: &HalfSpacePoint| {
        let x2 = pt.x_norm_sq();
        let d = (1.0 + pt.y).powi(2) + x2;
        let u = (pt.y / d).powf(lam);
        let num = ((1.0 - pt.y * pt.y + x2).powi(2) + 4.0 * x2 * pt.y * pt.y).sqrt();
        lam * u * num / (pt.y * d)
    };
    let mut f = HalfSpaceFunction::new(
        format!("ueps[eps={eps}]"),
        Arc::new(value),
        Arc::new(grad),
        HalfSpaceBox::whole(),
    );
    f.decay = Some((lam, 0.0));
    Ok(f)
}

/// One-dimensional bump used as a factor of separable functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub center: f64,
    pub half_width: f64,
}

impl Factor {
    fn eval(&self, x: f64) -> (f64, f64) {
        let (v, d) = mollifier((x - self.center) / self.half_width);
        (v, d / self.half_width)
    }
}

/// `u = a(x1) b(rho) c(y)` with mollifier factors; `b` is centered at 0 so
/// that `u` is smooth across `rho = 0`, and is dropped for `N = 2`.
pub fn make_separable(
    n: u32,
    amplitude: f64,
    a: Factor,
    rho_max: f64,
    c: Factor,
) -> Result<HalfSpaceFunction> {
    if c.center - c.half_width <= 0.0 {
        return Err(Error::Precondition(
            "y-factor support must stay in y > 0".into(),
        ));
    }
    if !(a.half_width > 0.0 && c.half_width > 0.0 && rho_max > 0.0) {
        return Err(Error::Precondition("factor widths must be positive".into()));
    }
    let b = Factor {
        center: 0.0,
        half_width: rho_max,
    };
    let with_rho = n >= 3;
    let parts = move |pt: &HalfSpacePoint| {
        let (av, ad) = a.eval(pt.x1);
        let (bv, bd) = if with_rho { b.eval(pt.rho) } else { (1.0, 0.0) };
        let (cv, cd) = c.eval(pt.y);
        (av, ad, bv, bd, cv, cd)
    };
    let value = move |pt: &HalfSpacePoint| {
        let (av, _, bv, _, cv, _) = parts(pt);
        amplitude * av * bv * cv
    };
    let grad = move |pt: &HalfSpacePoint| {
        let (av, ad, bv, bd, cv, cd) = parts(pt);
        amplitude.abs()
            * ((ad * bv * cv).powi(2) + (av * bd * cv).powi(2) + (av * bv * cd).powi(2)).sqrt()
    };
    let region = HalfSpaceBox {
        x1: (a.center - a.half_width, a.center + a.half_width),
        rho_max: if with_rho { rho_max } else { 1.0 },
        y: (c.center - c.half_width, c.center + c.half_width),
    };
    Ok(HalfSpaceFunction::new(
        format!(
            "separable[x1={}+-{},rho<{},y={}+-{}]",
            a.center, a.half_width, rho_max, c.center, c.half_width
        ),
        Arc::new(value),
        Arc::new(grad),
        region,
    ))
}

/// Generator for trial `index` of a batch seeded with `seed`: the same
/// seed on a separate stream per trial, so results do not depend on the
/// order in which trials run.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Mollifier bump with support endpoints drawn log-uniformly from
/// `[lo, hi]` (at least 5% apart), or `[0, r]` when `at_origin`.
pub fn random_bump<R: Rng>(
    rng: &mut R,
    lo: f64,
    hi: f64,
    at_origin: bool,
) -> Result<RadialTestFunction> {
    let (a, b) = loop {
        let s = log_uniform(rng, lo, hi);
        let t = log_uniform(rng, lo, hi);
        let (a, b) = if s < t { (s, t) } else { (t, s) };
        if b > 1.05 * a {
            break (a, b);
        }
    };
    let amp = rng.random_range(0.2..5.0);
    let base = if at_origin {
        make_bump(0.0, b, BumpShape::Mollifier)?
    } else {
        make_bump(a, b, BumpShape::Mollifier)?
    };
    Ok(base.scaled(amp))
}

/// Separable half-space bump with random factors.
pub fn random_separable<R: Rng>(rng: &mut R, n: u32) -> Result<HalfSpaceFunction> {
    let a = Factor {
        center: rng.random_range(-2.0..2.0),
        half_width: rng.random_range(0.3..2.0),
    };
    let y_lo = log_uniform(rng, 0.05, 1.0);
    let y_hi = y_lo * rng.random_range(1.5..20.0);
    let c = Factor {
        center: 0.5 * (y_lo + y_hi),
        half_width: 0.5 * (y_hi - y_lo),
    };
    let rho_max = rng.random_range(0.3..2.0);
    let amp = rng.random_range(0.2..5.0);
    make_separable(n, amp, a, rho_max, c)
}
