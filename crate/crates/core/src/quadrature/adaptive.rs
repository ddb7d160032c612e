use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gauss_kronrod::gk15;
use super::{QuadResult, Tolerance};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

/// Graded panels toward a singular endpoint stop at this fraction of the
/// interval length.
const GRADED_FLOOR: f64 = 1e-12;

/// Largest number of chunks used to locate a truncation point.
const MAX_TAIL_CHUNKS: usize = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Endpoint {
    #[default]
    Regular,
    /// Integrable singularity of power or log type: the initial mesh is
    /// graded geometrically (ratio 1/2) toward this endpoint.
    Singular,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Endpoints {
    pub left: Endpoint,
    pub right: Endpoint,
}

impl Endpoints {
    pub fn regular() -> Self {
        Self::default()
    }

    pub fn singular_left() -> Self {
        Endpoints {
            left: Endpoint::Singular,
            right: Endpoint::Regular,
        }
    }

    pub fn singular_right() -> Self {
        Endpoints {
            left: Endpoint::Regular,
            right: Endpoint::Singular,
        }
    }
}

/// Exponential bound `|f(s)| <= exp(log_constant - rate * s)` for
/// `s >= valid_from`, used to bound the tail of a semi-infinite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub log_constant: f64,
    pub rate: f64,
    pub valid_from: f64,
}

impl Envelope {
    /// `∫_R^∞ exp(log_constant - rate s) ds`, or infinity before `valid_from`.
    pub fn tail_bound(&self, cut: f64) -> f64 {
        if cut < self.valid_from {
            return f64::INFINITY;
        }
        (self.log_constant - self.rate * cut).exp() / self.rate
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn make_panel<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let est = gk15(f, a, b);
    if !est.value.is_finite() || !est.error.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value: est.value,
        error: est.error,
        abs_value: est.abs_value,
    })
}

/// Core refinement loop over an initial mesh.
fn refine<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    mesh: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::with_capacity(mesh.len() * 2);
    // Panels too narrow to split further; their error is still counted.
    let mut frozen: Vec<Panel> = Vec::new();
    for w in mesh.windows(2) {
        if w[1] > w[0] {
            heap.push(make_panel(f, w[0], w[1])?);
        }
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        let mut value = 0.0;
        let mut error = 0.0;
        let mut abs_value = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            value += p.value;
            error += p.error;
            abs_value += p.abs_value;
        }
        (value, error, abs_value)
    };

    let (mut value, mut error, mut abs_value) = totals(&heap, &frozen);
    let mut iterations = 0usize;
    loop {
        // Floor at the rounding level of the panel sums.
        let target = tol.target(value).max(50.0 * f64::EPSILON * abs_value);
        if error <= target {
            break;
        }
        if heap.len() + frozen.len() >= max_subdivisions {
            let (value, error, _) = totals(&heap, &frozen);
            return Err(Error::BudgetExhausted {
                value,
                error_estimate: error,
                subdivisions: heap.len() + frozen.len(),
            });
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        let left = make_panel(f, worst.a, mid)?;
        let right = make_panel(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);

        iterations += 1;
        if iterations.is_multiple_of(64) {
            (value, error, abs_value) = totals(&heap, &frozen);
        }
    }

    let (value, error, _) = totals(&heap, &frozen);
    Ok(QuadResult {
        value,
        error_estimate: error,
        subdivisions: heap.len() + frozen.len(),
        truncation_point: None,
    })
}

fn graded_mesh(a: f64, b: f64, ends: Endpoints) -> Vec<f64> {
    let len = b - a;
    let mut left_pts = Vec::new();
    let mut right_pts = Vec::new();
    let levels = (-GRADED_FLOOR.log2()).ceil() as i32;
    if ends.left == Endpoint::Singular {
        let span = if ends.right == Endpoint::Singular {
            0.5 * len
        } else {
            len
        };
        for k in (1..=levels).rev() {
            left_pts.push(a + span * 0.5f64.powi(k));
        }
    }
    if ends.right == Endpoint::Singular {
        let span = if ends.left == Endpoint::Singular {
            0.5 * len
        } else {
            len
        };
        for k in 1..=levels {
            right_pts.push(b - span * 0.5f64.powi(k));
        }
    }
    let mut mesh = Vec::with_capacity(left_pts.len() + right_pts.len() + 3);
    mesh.push(a);
    mesh.extend(left_pts);
    if ends.left == Endpoint::Singular && ends.right == Endpoint::Singular {
        mesh.push(a + 0.5 * len);
    }
    mesh.extend(right_pts);
    mesh.push(b);
    mesh.dedup_by(|x, y| *x <= *y);
    mesh
}

/// Integrate `f` over `[a, b]` to the requested tolerance.
///
/// Flagged singular endpoints get a geometrically graded initial mesh.
/// On budget exhaustion the error carries the best value and estimate.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    ends: Endpoints,
) -> Result<QuadResult> {
    integrate_with_breakpoints(f, &[a, b], tol, ends, DEFAULT_MAX_SUBDIVISIONS)
}

/// Like [`integrate_interval`], with the mesh split exactly at `points`
/// (which must be sorted; the first and last entries are the limits).
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
    ends: Endpoints,
    max_subdivisions: usize,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two mesh points".into()));
    }
    let a = points[0];
    let b = points[points.len() - 1];
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Precondition(format!(
            "integration limits must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("breakpoints must be sorted".into()));
    }

    let mut mesh = Vec::new();
    let n = points.len();
    for (i, w) in points.windows(2).enumerate() {
        if w[1] <= w[0] {
            continue;
        }
        let piece_ends = Endpoints {
            left: if i == 0 { ends.left } else { Endpoint::Regular },
            right: if i == n - 2 {
                ends.right
            } else {
                Endpoint::Regular
            },
        };
        let sub = graded_mesh(w[0], w[1], piece_ends);
        if mesh.is_empty() {
            mesh.extend(sub);
        } else {
            mesh.extend(sub.into_iter().skip(1));
        }
    }
    refine(&f, &mesh, tol, max_subdivisions)
}

/// `∫_a^b (x - a)^(beta - 1) g(x) dx` for `beta > 0` with `g` bounded near
/// `a`, via `x = a + L t^(1/beta)`, which turns the integral into
/// `(L^beta / beta) ∫_0^1 g(a + L t^(1/beta)) dt`.
///
/// Arguments closer to `a` than `1e-60 L` are clamped; `g` must be
/// continuous at `a` for this to be harmless.
pub fn integrate_power_weighted<G: Fn(f64) -> f64>(
    g: G,
    a: f64,
    b: f64,
    beta: f64,
    tol: Tolerance,
) -> Result<QuadResult> {
    if !(beta > 0.0) {
        return Err(Error::NonIntegrable(format!(
            "endpoint exponent beta = {beta} must be positive"
        )));
    }
    let len = b - a;
    let floor = 1e-60 * len;
    let inv_beta = 1.0 / beta;
    let prefactor = len.powf(beta) / beta;
    let mapped = |t: f64| {
        let offset = (len * t.powf(inv_beta)).max(floor);
        g(a + offset)
    };
    let ends = if beta < 1.0 {
        Endpoints::singular_right()
    } else {
        Endpoints::singular_left()
    };
    let res = integrate_with_breakpoints(
        mapped,
        &[0.0, 1.0],
        tol.scaled(1.0 / prefactor),
        ends,
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(res.scale(prefactor))
}

/// `∫_a^∞ f`, truncated at the first chunk boundary where the envelope's
/// tail bound drops below a quarter of the target; the bound is added to
/// the error estimate. `scale` is the width of the first chunk; chunk
/// widths double from there.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    envelope: Envelope,
    tol: Tolerance,
    left: Endpoint,
    scale: f64,
) -> Result<QuadResult> {
    if !(envelope.rate > 0.0) {
        return Err(Error::Precondition(
            "tail envelope needs a positive decay rate".into(),
        ));
    }
    let mut mesh = vec![a];
    let mut width = scale;
    let mut estimate = 0.0;
    let mut abs_estimate = 0.0;
    let mut tail;
    loop {
        let lo = *mesh.last().unwrap();
        let hi = lo + width;
        let est = gk15(&f, lo, hi);
        estimate += est.value;
        abs_estimate += est.abs_value;
        mesh.push(hi);
        width *= 2.0;

        tail = envelope.tail_bound(hi);
        let floor = f64::EPSILON * abs_estimate;
        if tail <= 0.25 * tol.target(estimate).max(floor) || tail == 0.0 {
            break;
        }
        if mesh.len() > MAX_TAIL_CHUNKS {
            return Err(Error::BudgetExhausted {
                value: estimate,
                error_estimate: tail,
                subdivisions: mesh.len() - 1,
            });
        }
    }

    let cut = *mesh.last().unwrap();
    let ends = Endpoints {
        left,
        right: Endpoint::Regular,
    };
    let inner_tol = Tolerance {
        abs: 0.75 * tol.abs,
        rel: 0.75 * tol.rel,
    };
    let mut res = integrate_with_breakpoints(&f, &mesh, inner_tol, ends, DEFAULT_MAX_SUBDIVISIONS)?;
    res.error_estimate += tail;
    res.truncation_point = Some(cut);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_interval(
            |_| 1.0,
            0.0,
            1.0,
            Tolerance::absolute(1e-14),
            Endpoints::regular(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.error_estimate <= 1e-14);
    }

    #[test]
    fn inverse_sinh_squared() {
        // ∫_1^2 sinh^-2 = coth 1 - coth 2.
        let exact = 1.0 / 1f64.tanh() - 1.0 / 2f64.tanh();
        let r = integrate_interval(
            |s: f64| s.sinh().powi(-2),
            1.0,
            2.0,
            Tolerance::absolute(1e-12),
            Endpoints::regular(),
        )
        .unwrap();
        assert!((r.value - exact).abs() < 1e-12);
        assert!((r.value - 0.275_720).abs() < 1e-6);
    }

    #[test]
    fn sinh_volume_element() {
        let r = integrate_interval(
            |s: f64| s.sinh(),
            0.0,
            1.0,
            Tolerance::absolute(1e-13),
            Endpoints::regular(),
        )
        .unwrap();
        assert!((r.value - (1f64.cosh() - 1.0)).abs() < 1e-13);
        assert!((r.value - 0.543_081).abs() < 1e-6);
    }

    #[test]
    fn inverse_sqrt_singularity_with_grading() {
        let r = integrate_interval(
            |x: f64| 1.0 / x.sqrt(),
            0.0,
            1.0,
            Tolerance::absolute(1e-10),
            Endpoints::singular_left(),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
        assert!((r.value - 2.0).abs() <= r.error_estimate + 2e-6);
    }

    #[test]
    fn log_singularity_at_right_end() {
        // ∫_0^1 ln(1 - x) dx = -1
        let r = integrate_interval(
            |x: f64| (1.0 - x).ln(),
            0.0,
            1.0,
            Tolerance::absolute(1e-10),
            Endpoints::singular_right(),
        )
        .unwrap();
        assert!((r.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn power_weighted_small_exponent() {
        // ∫_0^1 x^(delta - 1) (1 + x) dx = 1/delta + 1/(1 + delta)
        let delta = 1e-3;
        let r = integrate_power_weighted(|x| 1.0 + x, 0.0, 1.0, delta, Tolerance::relative(1e-12))
            .unwrap();
        let exact = 1.0 / delta + 1.0 / (1.0 + delta);
        assert!(
            ((r.value - exact) / exact).abs() < 1e-11,
            "{} vs {}",
            r.value,
            exact
        );
    }

    #[test]
    fn semi_infinite_exponential() {
        let env = Envelope {
            log_constant: 0.0,
            rate: 1.0,
            valid_from: 0.0,
        };
        let r = integrate_semi_infinite(
            |x: f64| (-x).exp(),
            0.0,
            env,
            Tolerance::relative(1e-12),
            Endpoint::Regular,
            1.0,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        assert!(r.truncation_point.unwrap() > 25.0);
    }

    #[test]
    fn budget_exhaustion_reports_best_value() {
        let err = integrate_with_breakpoints(
            |x: f64| (50.0 * x).sin().abs(),
            &[0.0, 10.0],
            Tolerance::absolute(1e-15),
            Endpoints::regular(),
            8,
        )
        .unwrap_err();
        match err {
            Error::BudgetExhausted {
                value,
                error_estimate,
                ..
            } => {
                assert!(value.is_finite());
                assert!(error_estimate > 0.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_reversed_limits() {
        assert!(integrate_interval(
            |x| x,
            1.0,
            0.0,
            Tolerance::absolute(1e-8),
            Endpoints::regular()
        )
        .is_err());
    }
}
