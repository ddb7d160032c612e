//! Integrals over the upper half-space `R^{N-1} x (0, ∞)` of functions that
//! depend only on `(x1, rho, y)`, with `rho = |(x2, ..., x_{N-1})|`.
//!
//! For `N >= 3` the `N - 2` trailing coordinates are integrated in polar
//! form, contributing `ω_{N-3} rho^(N-3) d rho` with `ω_k` the area of the
//! unit `k`-sphere (`ω_0 = 2`: for `N = 3`, `rho` covers both half-lines).
//! For `N = 2` there is no `rho`. Low dimensions use nested adaptive
//! quadrature; from `N = 8` on a seeded Monte Carlo estimate is used.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{integrate_interval, Endpoint, Endpoints, QuadResult, Tolerance};
use crate::error::{Error, Result};
use crate::hyp::{HalfSpacePoint, Params};

/// From this dimension on, [`halfspace_integral`] samples instead of nesting.
pub const MONTE_CARLO_MIN_DIM: u32 = 8;
const MONTE_CARLO_SAMPLES: usize = 400_000;
const MONTE_CARLO_SEED: u64 = 0x5eed;

/// Integration region. Infinite limits are allowed for adaptive
/// quadrature and are mapped to finite ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceBox {
    pub x1: (f64, f64),
    pub rho_max: f64,
    pub y: (f64, f64),
}

impl HalfSpaceBox {
    pub fn whole() -> Self {
        HalfSpaceBox {
            x1: (f64::NEG_INFINITY, f64::INFINITY),
            rho_max: f64::INFINITY,
            y: (0.0, f64::INFINITY),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok =
            self.x1.0 < self.x1.1 && self.y.0 >= 0.0 && self.y.0 < self.y.1 && self.rho_max > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "empty or invalid half-space box {self:?}"
            )))
        }
    }

    fn is_finite(&self) -> bool {
        self.x1.0.is_finite()
            && self.x1.1.is_finite()
            && self.rho_max.is_finite()
            && self.y.1.is_finite()
    }
}

/// Integrand on the reduced coordinates.
pub trait HalfSpaceIntegrand: Sync {
    fn eval(&self, pt: &HalfSpacePoint) -> f64;

    /// Name of a coordinate outside `(x1, rho, y)` that the integrand
    /// depends on, if any; such integrands cannot be reduced.
    fn unreduced_dependence(&self) -> Option<String> {
        None
    }
}

impl<F: Fn(&HalfSpacePoint) -> f64 + Sync> HalfSpaceIntegrand for F {
    fn eval(&self, pt: &HalfSpacePoint) -> f64 {
        self(pt)
    }
}

/// Area of the unit `k`-sphere in `R^{k+1}`.
pub fn sphere_area(k: u32) -> f64 {
    let mut area = if k.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut j = if k.is_multiple_of(2) { 0 } else { 1 };
    while j < k {
        j += 2;
        area *= 2.0 * PI / (j as f64 - 1.0);
    }
    area
}

/// A coordinate range mapped to a finite parameter interval.
#[derive(Clone, Copy)]
enum Axis {
    Finite(f64, f64),
    /// `(-∞, ∞)` via `x = t / (1 - t^2)`, `t ∈ (-1, 1)`.
    Line,
    /// `(a, ∞)` via `x = a + t / (1 - t)`, `t ∈ [0, 1)`.
    HalfLine(f64),
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Result<Self> {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => Ok(Axis::Finite(lo, hi)),
            (false, false) => Ok(Axis::Line),
            (true, false) => Ok(Axis::HalfLine(lo)),
            (false, true) => Err(Error::Precondition(
                "ranges unbounded below only are not supported".into(),
            )),
        }
    }

    fn param_range(&self) -> (f64, f64) {
        match *self {
            Axis::Finite(a, b) => (a, b),
            Axis::Line => (-1.0, 1.0),
            Axis::HalfLine(_) => (0.0, 1.0),
        }
    }

    fn ends(&self) -> Endpoints {
        match self {
            Axis::Finite(..) => Endpoints::regular(),
            Axis::Line => Endpoints {
                left: Endpoint::Singular,
                right: Endpoint::Singular,
            },
            Axis::HalfLine(_) => Endpoints::singular_right(),
        }
    }

    /// Coordinate and Jacobian at parameter `t`.
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Axis::Finite(..) => (t, 1.0),
            Axis::Line => {
                let d = 1.0 - t * t;
                (t / d, (1.0 + t * t) / (d * d))
            }
            Axis::HalfLine(a) => {
                let d = 1.0 - t;
                (a + t / d, 1.0 / (d * d))
            }
        }
    }

    fn length(&self) -> f64 {
        let (a, b) = self.param_range();
        b - a
    }
}

fn guarded(v: f64, jac: f64) -> f64 {
    if jac.is_finite() && v != 0.0 {
        v * jac
    } else {
        0.0
    }
}

/// `∫∫∫ f(x1, rho, y) ω_{N-3} rho^(N-3) dx1 drho dy` (or the double
/// integral for `N = 2`) over `region`.
pub fn halfspace_integral<F: HalfSpaceIntegrand + ?Sized>(
    params: &Params,
    f: &F,
    region: &HalfSpaceBox,
    tol: Tolerance,
) -> Result<QuadResult> {
    if let Some(coord) = f.unreduced_dependence() {
        return Err(Error::DimensionReduction(format!(
            "integrand depends on {coord}, not only on (x1, rho, y)"
        )));
    }
    region.validate()?;
    if params.n >= MONTE_CARLO_MIN_DIM {
        return halfspace_monte_carlo(params, f, region, MONTE_CARLO_SAMPLES, MONTE_CARLO_SEED);
    }
    // Coarse pass to fix the absolute scale of the nested tolerances; redo
    // once if the scale was too optimistic.
    let coarse = nested(params, f, region, Tolerance::relative(1e-2), 1e-2)?;
    let target = tol.target(coarse.value).max(tol.abs);
    if coarse.value == 0.0 && target == 0.0 {
        return Ok(coarse);
    }
    let res = nested_abs(params, f, region, target)?;
    let wanted = tol.target(res.value);
    if res.error_estimate <= wanted || !(wanted > 0.0) {
        return Ok(res);
    }
    nested_abs(params, f, region, wanted)
}

fn nested<F: HalfSpaceIntegrand + ?Sized>(
    params: &Params,
    f: &F,
    region: &HalfSpaceBox,
    tol: Tolerance,
    inner_rel: f64,
) -> Result<QuadResult> {
    let xa = Axis::new(region.x1.0, region.x1.1)?;
    let ya = Axis::new(region.y.0, region.y.1)?;
    let ra = Axis::new(0.0, region.rho_max)?;
    let inner = Tolerance::relative(inner_rel);
    evaluate(params, f, xa, ya, ra, tol, inner, inner)
}

fn nested_abs<F: HalfSpaceIntegrand + ?Sized>(
    params: &Params,
    f: &F,
    region: &HalfSpaceBox,
    target: f64,
) -> Result<QuadResult> {
    let xa = Axis::new(region.x1.0, region.x1.1)?;
    let ya = Axis::new(region.y.0, region.y.1)?;
    let ra = Axis::new(0.0, region.rho_max)?;
    let (lx, ly) = (xa.length(), ya.length());
    // Each level gets a third: t_outer + ly t_mid + ly lx t_inner = target.
    let t_outer = target / 3.0;
    let t_mid = target / (3.0 * ly);
    let t_inner = target / (3.0 * ly * lx);
    let mut res = evaluate(
        params,
        f,
        xa,
        ya,
        ra,
        Tolerance::absolute(t_outer),
        Tolerance::absolute(t_mid),
        Tolerance::absolute(t_inner),
    )?;
    let inner_part = if params.n >= 3 { t_inner * lx } else { 0.0 };
    res.error_estimate += ly * (t_mid + inner_part);
    Ok(res)
}

#[allow(clippy::too_many_arguments)]
fn evaluate<F: HalfSpaceIntegrand + ?Sized>(
    params: &Params,
    f: &F,
    xa: Axis,
    ya: Axis,
    ra: Axis,
    outer: Tolerance,
    mid: Tolerance,
    inner: Tolerance,
) -> Result<QuadResult> {
    let n = params.n;
    let omega = if n >= 3 { sphere_area(n - 3) } else { 0.0 };
    let rho_power = n.saturating_sub(3) as i32;
    let failure = std::cell::RefCell::new(None::<Error>);

    let at = |x1: f64, y: f64| -> f64 {
        if n == 2 {
            return f.eval(&HalfSpacePoint { x1, rho: 0.0, y });
        }
        let (ra0, rb0) = ra.param_range();
        let g = |t: f64| {
            let (rho, j) = ra.map(t);
            guarded(
                f.eval(&HalfSpacePoint { x1, rho, y }) * omega * rho.powi(rho_power),
                j,
            )
        };
        match integrate_interval(g, ra0, rb0, inner, ra.ends()) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let over_x = |y: f64| -> f64 {
        let (a, b) = xa.param_range();
        let g = |t: f64| {
            let (x1, j) = xa.map(t);
            guarded(at(x1, y), j)
        };
        match integrate_interval(g, a, b, mid, xa.ends()) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let (a, b) = ya.param_range();
    let outer_res = integrate_interval(
        |t| {
            let (y, j) = ya.map(t);
            if y <= 0.0 {
                return 0.0;
            }
            guarded(over_x(y), j)
        },
        a,
        b,
        outer,
        ya.ends(),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer_res
}

/// Monte Carlo estimate over a bounded box, sampling `rho` with density
/// proportional to `rho^(N-3)`. The error estimate is three standard errors.
pub fn halfspace_monte_carlo<F: HalfSpaceIntegrand + ?Sized>(
    params: &Params,
    f: &F,
    region: &HalfSpaceBox,
    samples: usize,
    seed: u64,
) -> Result<QuadResult> {
    region.validate()?;
    if !region.is_finite() {
        return Err(Error::Precondition(
            "Monte Carlo needs a bounded box".into(),
        ));
    }
    if samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x0, x1) = region.x1;
    let (y0, y1) = region.y;
    let big_r = region.rho_max;
    let volume = (x1 - x0) * (y1 - y0);
    // ∫_0^R ω ρ^{N-3} dρ, the normalizer of the ρ density.
    let rho_mass = if n >= 3 {
        sphere_area(n - 3) * big_r.powi(n as i32 - 2) / (n as f64 - 2.0)
    } else {
        1.0
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let x = rng.random_range(x0..x1);
        let y = rng.random_range(y0..y1);
        let rho = if n >= 3 {
            big_r * rng.random::<f64>().powf(1.0 / (n as f64 - 2.0))
        } else {
            0.0
        };
        if y <= 0.0 {
            continue;
        }
        let v = f.eval(&HalfSpacePoint { x1: x, rho, y }) * volume * rho_mass;
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "integrand not finite at ({x}, {rho}, {y})"
            )));
        }
        sum += v;
        sum_sq += v * v;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq / m - mean * mean) * m / (m - 1.0)).max(0.0);
    Ok(QuadResult {
        value: mean,
        error_estimate: 3.0 * (var / m).sqrt(),
        subdivisions: samples,
        truncation_point: None,
    })
}
