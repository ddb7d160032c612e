//! Radial test functions and integrals against the hyperbolic volume
//! element `(sinh r)^(N-1) dr` (the sphere area cancels from every
//! inequality and is left out).

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    integrate_power_weighted, integrate_semi_infinite, integrate_with_breakpoints, Endpoint,
    Endpoints, Envelope, QuadResult, Tolerance, DEFAULT_MAX_SUBDIVISIONS,
};
use crate::error::{Error, Result};
use crate::hyp::{weight_hp, GreenTable, Params};
use crate::special::ln_sinh;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Smoothness {
    /// Continuous with finitely many kinks, listed as breakpoints.
    PiecewiseC1,
    Smooth,
}

/// Radial profile `u(r)` with its derivative, vanishing outside `support`.
#[derive(Clone)]
pub struct RadialTestFunction {
    id: String,
    value: RealFn,
    derivative: RealFn,
    ln_abs_value: Option<RealFn>,
    ln_abs_derivative: Option<RealFn>,
    support: (f64, f64),
    breakpoints: Vec<f64>,
    smoothness: Smoothness,
    origin_exponent: Option<f64>,
    decay: Option<Envelope>,
}

impl fmt::Debug for RadialTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialTestFunction")
            .field("id", &self.id)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

impl RadialTestFunction {
    pub fn new(
        id: impl Into<String>,
        value: RealFn,
        derivative: RealFn,
        support: (f64, f64),
        smoothness: Smoothness,
    ) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo >= 0.0 && hi > lo) || lo.is_infinite() {
            return Err(Error::Precondition(format!(
                "support must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(RadialTestFunction {
            id: id.into(),
            value,
            derivative,
            ln_abs_value: None,
            ln_abs_derivative: None,
            support,
            breakpoints: Vec::new(),
            smoothness,
            origin_exponent: None,
            decay: None,
        })
    }

    /// Interior kinks; the integration mesh is split there exactly.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|&x| x > self.support.0 && x < self.support.1);
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    /// `ln |u|`, used instead of `u` when forming integrands so that very
    /// small profiles times very large volume elements do not under/overflow.
    pub fn with_ln_abs_value(mut self, f: RealFn) -> Self {
        self.ln_abs_value = Some(f);
        self
    }

    /// `ln |u'|`, the derivative counterpart of [`Self::with_ln_abs_value`].
    pub fn with_ln_abs_derivative(mut self, f: RealFn) -> Self {
        self.ln_abs_derivative = Some(f);
        self
    }

    /// `u(r) ~ c r^gamma` as `r -> 0` (only meaningful when the support
    /// starts at 0).
    pub fn with_origin_exponent(mut self, gamma: f64) -> Self {
        self.origin_exponent = Some(gamma);
        self
    }

    /// Bound `|u|, |u'| <= exp(log_constant - rate r)` for `r >= valid_from`,
    /// required when the support is unbounded.
    pub fn with_decay(mut self, env: Envelope) -> Self {
        self.decay = Some(env);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn origin_exponent(&self) -> Option<f64> {
        self.origin_exponent
    }

    pub fn decay(&self) -> Option<Envelope> {
        self.decay
    }

    fn inside(&self, r: f64) -> bool {
        r >= self.support.0 && r <= self.support.1
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.inside(r) {
            (self.value)(r)
        } else {
            0.0
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if self.inside(r) {
            (self.derivative)(r)
        } else {
            0.0
        }
    }

    /// `ln |u(r)|`, from the supplied log form when there is one.
    pub fn ln_abs_value(&self, r: f64) -> f64 {
        if !self.inside(r) {
            return f64::NEG_INFINITY;
        }
        match &self.ln_abs_value {
            Some(f) => f(r),
            None => (self.value)(r).abs().ln(),
        }
    }

    /// `ln |u'(r)|`, from the supplied log form when there is one.
    pub fn ln_abs_derivative(&self, r: f64) -> f64 {
        if !self.inside(r) {
            return f64::NEG_INFINITY;
        }
        match &self.ln_abs_derivative {
            Some(f) => f(r),
            None => (self.derivative)(r).abs().ln(),
        }
    }

    /// `c u`.
    pub fn scaled(&self, c: f64) -> Self {
        let v = Arc::clone(&self.value);
        let d = Arc::clone(&self.derivative);
        let mut out = self.clone();
        out.id = format!("{}*{c}", self.id);
        out.value = Arc::new(move |r| c * v(r));
        out.derivative = Arc::new(move |r| c * d(r));
        if let Some(lnv) = &self.ln_abs_value {
            let lnv = Arc::clone(lnv);
            let lnc = c.abs().ln();
            out.ln_abs_value = Some(Arc::new(move |r| lnc + lnv(r)));
        }
        if let Some(lnd) = &self.ln_abs_derivative {
            let lnd = Arc::clone(lnd);
            let lnc = c.abs().ln();
            out.ln_abs_derivative = Some(Arc::new(move |r| lnc + lnd(r)));
        }
        if let Some(env) = &mut out.decay {
            env.log_constant += c.abs().ln();
        }
        out
    }

    /// Largest relative discrepancy between the supplied derivative and a
    /// Richardson-extrapolated central difference at `points` random interior
    /// points that stay clear of the support ends and of kinks. Relative
    /// errors are taken against `max(|u'(r)|, 1e-2 max |u'|)` so that zeros
    /// of `u'` do not blow the ratio up.
    pub fn derivative_consistency(&self, points: usize, seed: u64) -> f64 {
        let (lo, hi) = self.support;
        let hi = if hi.is_finite() { hi } else { lo + 40.0 };
        let width = hi - lo;
        let h = 1e-3 * width.min(1.0);
        let margin = 0.05 * width;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(points);
        let mut guard = 0;
        while samples.len() < points && guard < 100 * points {
            guard += 1;
            let r = rng.random_range(lo + margin..hi - margin);
            if self.breakpoints.iter().any(|&b| (r - b).abs() < 4.0 * h) {
                continue;
            }
            samples.push(r);
        }
        let fd = |r: f64, h: f64| (self.value(r + h) - self.value(r - h)) / (2.0 * h);
        let pairs: Vec<(f64, f64)> = samples
            .iter()
            .map(|&r| {
                let rich = (4.0 * fd(r, 0.5 * h) - fd(r, h)) / 3.0;
                (rich, self.derivative(r))
            })
            .collect();
        let dmax = pairs.iter().fold(0.0f64, |m, &(_, d)| m.max(d.abs()));
        if dmax == 0.0 {
            return pairs.iter().fold(0.0f64, |m, &(f, _)| m.max(f.abs()));
        }
        pairs
            .iter()
            .map(|&(f, d)| (f - d).abs() / d.abs().max(1e-2 * dmax))
            .fold(0.0, f64::max)
    }
}

/// Radial density of the volume element, divided by `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialMeasure {
    /// `(sinh r)^(N-1) / exp(log_scale)`.
    Hyperbolic { n: u32, log_scale: f64 },
    /// `dr`, for one-dimensional profiles.
    Lebesgue,
}

/// Above this, `(N-1) ln sinh(r_max)` is subtracted from every exponent.
const LOG_SCALE_THRESHOLD: f64 = 500.0;

impl RadialMeasure {
    /// Hyperbolic measure with the scale chosen from the support of `u`.
    /// Every inequality is homogeneous of the same degree in the volume
    /// element, so dividing all integrals by one constant keeps signs.
    pub fn hyperbolic(params: &Params, u: &RadialTestFunction) -> Self {
        let hi = u.support().1;
        let top = if hi.is_finite() {
            (params.nf() - 1.0) * ln_sinh(hi)
        } else {
            0.0
        };
        RadialMeasure::Hyperbolic {
            n: params.n,
            log_scale: if top > LOG_SCALE_THRESHOLD { top } else { 0.0 },
        }
    }

    pub fn log_scale(&self) -> f64 {
        match *self {
            RadialMeasure::Hyperbolic { log_scale, .. } => log_scale,
            RadialMeasure::Lebesgue => 0.0,
        }
    }

    pub fn ln_density(&self, r: f64) -> f64 {
        match *self {
            RadialMeasure::Hyperbolic { n, log_scale } => {
                if n == 1 {
                    -log_scale
                } else {
                    (n as f64 - 1.0) * ln_sinh(r) - log_scale
                }
            }
            RadialMeasure::Lebesgue => 0.0,
        }
    }

    /// Power of `r` in the density near the origin.
    fn origin_exponent(&self) -> f64 {
        match *self {
            RadialMeasure::Hyperbolic { n, .. } => n as f64 - 1.0,
            RadialMeasure::Lebesgue => 0.0,
        }
    }

    /// Exponential growth rate of the density at infinity, and the log of
    /// its constant: `(sinh r)^(N-1) <= 2^(1-N) e^{(N-1) r}`.
    fn growth(&self) -> (f64, f64) {
        match *self {
            RadialMeasure::Hyperbolic { n, log_scale } => {
                let k = n as f64 - 1.0;
                (k, -k * std::f64::consts::LN_2 - log_scale)
            }
            RadialMeasure::Lebesgue => (0.0, 0.0),
        }
    }
}

/// Weights multiplying `|u|^p` in the mass-type integrals.
#[derive(Clone)]
pub enum RadialWeight {
    One,
    /// `r^-p`
    InversePowerR,
    /// `(sinh r)^-p`
    InverseSinhPower,
    /// The Green's function weight `W`, through the shared table.
    GreenW(Arc<GreenTable>),
    /// `H_p(r)`
    Hp,
    /// `r^(p')`
    PowerPPrime,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl RadialWeight {
    pub fn name(&self) -> &'static str {
        match self {
            RadialWeight::One => "one",
            RadialWeight::InversePowerR => "r^-p",
            RadialWeight::InverseSinhPower => "sinh^-p",
            RadialWeight::GreenW(_) => "W",
            RadialWeight::Hp => "H_p",
            RadialWeight::PowerPPrime => "r^p'",
        }
    }

    /// `W` through the shared table for `params`.
    pub fn green(params: &Params, tol: f64) -> Result<Self> {
        Ok(RadialWeight::GreenW(GreenTable::shared(params, tol)?))
    }

    /// Weight value and relative error (only `W` carries one).
    fn eval(&self, params: &Params, r: f64) -> (f64, f64) {
        let p = params.p;
        match self {
            RadialWeight::One => (1.0, 0.0),
            RadialWeight::InversePowerR => (r.powf(-p), 0.0),
            RadialWeight::InverseSinhPower => ((-p * ln_sinh(r)).exp(), 0.0),
            RadialWeight::GreenW(table) => match table.weight(r) {
                Ok((w, e)) => (w, if w != 0.0 { e / w.abs() } else { 0.0 }),
                Err(_) => (f64::NAN, 0.0),
            },
            RadialWeight::Hp => (weight_hp(params, r).unwrap_or(f64::NAN), 0.0),
            RadialWeight::PowerPPrime => (r.powf(params.p_prime()), 0.0),
        }
    }

    /// Power of `r` in the weight near the origin.
    fn origin_exponent(&self, params: &Params) -> f64 {
        let (n, p) = (params.nf(), params.p);
        match self {
            RadialWeight::One => 0.0,
            RadialWeight::InversePowerR | RadialWeight::InverseSinhPower => -p,
            RadialWeight::GreenW(_) => {
                if n > p {
                    -p
                } else if n < p {
                    -p * params.alpha()
                } else {
                    -p
                }
            }
            RadialWeight::Hp => -(p - 2.0),
            RadialWeight::PowerPPrime => params.p_prime(),
        }
    }

    /// `sup_{r >= r1} weight(r)` for the weights admitted on unbounded
    /// supports.
    fn tail_sup(&self, params: &Params, r1: f64) -> Option<f64> {
        let p = params.p;
        match self {
            RadialWeight::One => Some(1.0),
            RadialWeight::InversePowerR => Some(r1.powf(-p)),
            RadialWeight::InverseSinhPower => Some((-p * ln_sinh(r1)).exp()),
            RadialWeight::Hp if p >= 2.0 => Some((1.0 / r1.tanh()).powf(p - 2.0)),
            _ => None,
        }
    }
}

/// Energy `∫ |u'|^p dμ` and mass `∫ |u|^p dμ`.
#[derive(Debug, Clone, Copy)]
pub struct RadialEnergy {
    pub energy: QuadResult,
    pub mass: QuadResult,
    pub log_scale: f64,
}

/// `∫ f` over the support of `u`, split at its breakpoints.
///
/// `origin_power` is the exponent `e` with `f(r) ~ r^e` as `r -> 0`; when
/// the support starts at 0 and it is given, the first piece is integrated
/// with the substitution for endpoint powers. `tail` bounds `|f|` when the
/// support is unbounded.
pub(crate) fn integrate_profile<F: Fn(f64) -> f64>(
    u: &RadialTestFunction,
    f: F,
    origin_power: Option<f64>,
    tail: Option<Envelope>,
    tol: Tolerance,
) -> Result<QuadResult> {
    let (lo, hi) = u.support();
    let mut points = vec![lo];
    points.extend_from_slice(u.breakpoints());
    let mut total = QuadResult::zero();
    let pieces_tol = |count: usize| Tolerance {
        abs: tol.abs / count as f64,
        rel: tol.rel,
    };

    if hi.is_finite() {
        points.push(hi);
    }
    let pieces = points.len() - 1 + usize::from(!hi.is_finite());
    let ptol = pieces_tol(pieces.max(1));

    let mut start = 0;
    if lo == 0.0 {
        if let Some(e) = origin_power {
            if !(e > -1.0) {
                return Err(Error::NonIntegrable(format!(
                    "integrand behaves like r^{e} at the origin"
                )));
            }
            let b = if points.len() > 1 {
                points[1]
            } else {
                return Err(Error::Precondition(
                    "unbounded support starting at 0 needs a breakpoint".into(),
                ));
            };
            let g = |r: f64| f(r) * r.powf(-e);
            total = total.combine(integrate_power_weighted(g, 0.0, b, e + 1.0, ptol)?);
            start = 1;
        }
    }

    if points.len() - start >= 2 {
        let ends = Endpoints {
            left: if lo == 0.0 && start == 0 {
                Endpoint::Singular
            } else {
                Endpoint::Regular
            },
            right: Endpoint::Regular,
        };
        // Tolerance per piece is enforced inside the breakpoint routine
        // collectively; scale the absolute part by the piece count.
        let finite = &points[start..];
        let sub_tol = Tolerance {
            abs: ptol.abs * (finite.len() - 1) as f64,
            rel: tol.rel,
        };
        total = total.combine(integrate_with_breakpoints(
            &f,
            finite,
            sub_tol,
            ends,
            DEFAULT_MAX_SUBDIVISIONS * finite.len(),
        )?);
    }

    if !hi.is_finite() {
        let env = tail.ok_or_else(|| {
            Error::Precondition(format!(
                "unbounded support of {} needs a decay envelope",
                u.id()
            ))
        })?;
        let a = *points.last().unwrap();
        let scale = if a > 0.0 { a.min(1.0) } else { 1.0 };
        total = total.combine(integrate_semi_infinite(
            &f,
            a,
            env,
            ptol,
            Endpoint::Regular,
            scale,
        )?);
    }
    Ok(total)
}

/// Envelope of `|u or u'|^p * weight * density` on the unbounded tail.
fn tail_envelope(
    u: &RadialTestFunction,
    measure: &RadialMeasure,
    p: f64,
    weight_sup: f64,
    extra_log: f64,
) -> Result<Option<Envelope>> {
    if u.support().1.is_finite() {
        return Ok(None);
    }
    let dec = u.decay().ok_or_else(|| {
        Error::Precondition(format!(
            "unbounded support of {} needs a decay envelope",
            u.id()
        ))
    })?;
    let (grow, log_c) = measure.growth();
    let rate = p * dec.rate - grow;
    if !(rate > 0.0) {
        return Err(Error::NonIntegrable(format!(
            "profile decays at rate {} which does not beat volume growth {grow}",
            p * dec.rate
        )));
    }
    Ok(Some(Envelope {
        log_constant: p * dec.log_constant + log_c + weight_sup.ln() + extra_log,
        rate,
        valid_from: dec.valid_from,
    }))
}

/// `|u(r)|^p * density(r)` in log form when available.
fn mass_density(u: &RadialTestFunction, measure: &RadialMeasure, p: f64, r: f64) -> f64 {
    let ld = measure.ln_density(r);
    let lv = u.ln_abs_value(r);
    if lv == f64::NEG_INFINITY {
        0.0
    } else {
        (p * lv + ld).exp()
    }
}

/// Energy and mass against `measure`.
pub fn radial_energy_with(
    params: &Params,
    u: &RadialTestFunction,
    measure: &RadialMeasure,
    tol: Tolerance,
) -> Result<RadialEnergy> {
    let p = params.p;
    let e_origin = u
        .origin_exponent()
        .map(|g| p * (g - 1.0) + measure.origin_exponent());
    let m_origin = u
        .origin_exponent()
        .map(|g| p * g + measure.origin_exponent());
    let e_tail = tail_envelope(u, measure, p, 1.0, 0.0)?;
    let m_tail = tail_envelope(u, measure, p, 1.0, 0.0)?;
    let energy = integrate_profile(
        u,
        |r| {
            let ld = u.ln_abs_derivative(r);
            if ld == f64::NEG_INFINITY {
                0.0
            } else {
                (p * ld + measure.ln_density(r)).exp()
            }
        },
        e_origin,
        e_tail,
        tol,
    )?;
    let mass = integrate_profile(u, |r| mass_density(u, measure, p, r), m_origin, m_tail, tol)?;
    Ok(RadialEnergy {
        energy,
        mass,
        log_scale: measure.log_scale(),
    })
}

/// `Ep = ∫|u'|^p (sinh r)^(N-1) dr` and `Mp = ∫|u|^p (sinh r)^(N-1) dr`, both
/// divided by `exp(log_scale)` (zero unless the support reaches far out).
pub fn radial_energy(
    params: &Params,
    u: &RadialTestFunction,
    tol: Tolerance,
) -> Result<RadialEnergy> {
    radial_energy_with(params, u, &RadialMeasure::hyperbolic(params, u), tol)
}

/// `∫ |u|^p weight (sinh r)^(N-1) dr`, divided by the same `exp(log_scale)`
/// as [`radial_energy`].
pub fn radial_weighted_mass(
    params: &Params,
    u: &RadialTestFunction,
    weight: &RadialWeight,
    tol: Tolerance,
) -> Result<QuadResult> {
    radial_weighted_mass_with(
        params,
        u,
        weight,
        &RadialMeasure::hyperbolic(params, u),
        tol,
    )
}

pub fn radial_weighted_mass_with(
    params: &Params,
    u: &RadialTestFunction,
    weight: &RadialWeight,
    measure: &RadialMeasure,
    tol: Tolerance,
) -> Result<QuadResult> {
    let p = params.p;
    let (lo, hi) = u.support();
    if lo == 0.0 && matches!(weight, RadialWeight::InversePowerR) && p >= params.nf() {
        return Err(Error::NonIntegrable(format!(
            "r^-p against (sinh r)^(N-1) at the origin with p = {p} >= N = {}",
            params.n
        )));
    }
    let tail = if hi.is_finite() {
        None
    } else {
        let r1 = u.decay().map(|d| d.valid_from).unwrap_or(1.0).max(1e-3);
        let sup = weight.tail_sup(params, r1).ok_or_else(|| {
            Error::Precondition(format!(
                "weight {} is not supported on unbounded profiles",
                weight.name()
            ))
        })?;
        tail_envelope(u, measure, p, sup, 0.0)?
    };
    let origin = u
        .origin_exponent()
        .map(|g| p * g + weight.origin_exponent(params) + measure.origin_exponent());
    let worst_rel = Cell::new(0.0f64);
    let mut res = integrate_profile(
        u,
        |r| {
            let m = mass_density(u, measure, p, r);
            if m == 0.0 {
                return 0.0;
            }
            let (w, rel) = weight.eval(params, r);
            if rel > worst_rel.get() {
                worst_rel.set(rel);
            }
            m * w
        },
        origin,
        tail,
        tol,
    )?;
    res.error_estimate += worst_rel.get() * res.value.abs();
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent(lo: f64, mid: f64, hi: f64) -> RadialTestFunction {
        let v: RealFn = Arc::new(move |r| {
            if r <= mid {
                (r - lo) / (mid - lo)
            } else {
                (hi - r) / (hi - mid)
            }
        });
        let d: RealFn = Arc::new(move |r| {
            if r < mid {
                1.0 / (mid - lo)
            } else {
                -1.0 / (hi - mid)
            }
        });
        RadialTestFunction::new("tent", v, d, (lo, hi), Smoothness::PiecewiseC1)
            .unwrap()
            .with_breakpoints(vec![mid])
    }

    fn pr(n: u32, p: f64) -> Params {
        Params::new(n, p).unwrap()
    }

    #[test]
    fn tent_mass_closed_form() {
        // ∫_1^3 (1 - |r-2|)^2 sinh r dr by parts.
        let u = tent(1.0, 2.0, 3.0);
        let res = radial_energy(&pr(2, 2.0), &u, Tolerance::relative(1e-12)).unwrap();
        // Antiderivative of (r-1)^2 sinh r is (r-1)^2 cosh r - 2(r-1) sinh r + 2 cosh r.
        let left =
            |r: f64| (r - 1.0).powi(2) * r.cosh() - 2.0 * (r - 1.0) * r.sinh() + 2.0 * r.cosh();
        let right =
            |r: f64| (3.0 - r).powi(2) * r.cosh() + 2.0 * (3.0 - r) * r.sinh() + 2.0 * r.cosh();
        let exact = (left(2.0) - left(1.0)) + (right(3.0) - right(2.0));
        assert!(((res.mass.value - exact) / exact).abs() < 1e-11);
        let e_exact = 3f64.cosh() - 1f64.cosh();
        assert!(((res.energy.value - e_exact) / e_exact).abs() < 1e-11);
    }

    #[test]
    fn zero_function() {
        let z: RealFn = Arc::new(|_| 0.0);
        let u =
            RadialTestFunction::new("zero", z.clone(), z, (1.0, 2.0), Smoothness::Smooth).unwrap();
        let res = radial_energy(&pr(3, 2.5), &u, Tolerance::absolute(1e-12)).unwrap();
        assert_eq!(res.energy.value, 0.0);
        assert_eq!(res.mass.value, 0.0);
    }

    #[test]
    fn weight_bounds_and_ordering() {
        let u = tent(1.0, 1.4, 2.0);
        let params = pr(4, 2.5);
        let tol = Tolerance::relative(1e-12);
        let m = radial_energy(&params, &u, tol).unwrap().mass.value;
        let hr = radial_weighted_mass(&params, &u, &RadialWeight::InversePowerR, tol)
            .unwrap()
            .value;
        let sh = radial_weighted_mass(&params, &u, &RadialWeight::InverseSinhPower, tol)
            .unwrap()
            .value;
        assert!(hr >= 2f64.powf(-2.5) * m && hr <= m);
        assert!(sh <= hr);
        let h2 = radial_weighted_mass(&pr(4, 2.0), &u, &RadialWeight::Hp, tol)
            .unwrap()
            .value;
        let m2 = radial_energy(&pr(4, 2.0), &u, tol).unwrap().mass.value;
        assert_eq!(h2, m2);
    }

    #[test]
    fn origin_rule() {
        let u = tent(0.0, 0.5, 1.0);
        let err = radial_weighted_mass(
            &pr(2, 3.0),
            &u,
            &RadialWeight::InversePowerR,
            Tolerance::relative(1e-8),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonIntegrable(_)));
        assert!(radial_weighted_mass(
            &pr(5, 3.0),
            &u,
            &RadialWeight::InversePowerR,
            Tolerance::relative(1e-8)
        )
        .is_ok());
    }

    #[test]
    fn homogeneity() {
        let u = tent(0.5, 1.5, 4.0);
        let params = pr(3, 3.0);
        let tol = Tolerance::relative(1e-12);
        let a = radial_energy(&params, &u, tol).unwrap();
        let b = radial_energy(&params, &u.scaled(-2.0), tol).unwrap();
        assert!((b.energy.value / a.energy.value - 8.0).abs() < 1e-10);
        assert!((b.mass.value / a.mass.value - 8.0).abs() < 1e-10);
    }

    #[test]
    fn small_radius_monomial() {
        // u = 1 on [0, 1e-3] is not a test function, but the mass integral
        // is still ∫_0^R sinh^4 r dr, checked against the series.
        let one: RealFn = Arc::new(|_| 1.0);
        let zero: RealFn = Arc::new(|_| 0.0);
        let u = RadialTestFunction::new("one", one, zero, (0.0, 1e-3), Smoothness::Smooth).unwrap();
        let res = radial_energy(&pr(5, 2.0), &u, Tolerance::relative(1e-13)).unwrap();
        let r: f64 = 1e-3;
        let exact = r.powi(5) / 5.0 + 2.0 * r.powi(7) / 21.0;
        assert!(((res.mass.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn large_support_is_rescaled() {
        let u = tent(60.0, 70.0, 80.0);
        let params = pr(13, 4.0);
        let m = RadialMeasure::hyperbolic(&params, &u);
        assert!(m.log_scale() > 500.0);
        let res = radial_energy(&params, &u, Tolerance::relative(1e-10)).unwrap();
        assert!(res.mass.value.is_finite() && res.mass.value > 0.0);
        assert!(res.energy.value.is_finite() && res.energy.value > 0.0);
    }

    #[test]
    fn fd_consistency_of_tent() {
        assert!(tent(1.0, 2.0, 3.0).derivative_consistency(32, 1) < 1e-6);
    }
}
