//! One-dimensional maximization: dense grid localization followed by
//! golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `xtol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Maximum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let mut best = if fc >= fd {
        Maximum { arg: c, value: fc }
    } else {
        Maximum { arg: d, value: fd }
    };
    for x in [a, b] {
        let fx = f(x);
        if fx > best.value {
            best = Maximum { arg: x, value: fx };
        }
    }
    best
}

/// Maximum of `f` on `[a, b]`: evaluate on `grid + 1` equally spaced points,
/// then polish around the best grid point by golden section.
pub fn grid_golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, grid: usize, xtol: f64) -> Maximum {
    let grid = grid.max(2);
    let h = (b - a) / grid as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=grid {
        let v = f(a + i as f64 * h);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = (a + (best_i as f64 - 1.0) * h).max(a);
    let hi = (a + (best_i as f64 + 1.0) * h).min(b);
    let polished = golden_section_max(&f, lo, hi, xtol);
    if polished.value >= best_v {
        polished
    } else {
        Maximum {
            arg: a + best_i as f64 * h,
            value: best_v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parabola() {
        let m = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((m.arg - 0.3).abs() < 1e-9);
    }

    #[test]
    fn boundary_maximum() {
        let m = grid_golden_max(|x| x, 0.0, 1.0, 1000, 1e-12);
        assert_eq!(m.arg, 1.0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn multimodal_grid_picks_global() {
        let f = |x: f64| (10.0 * x).sin() + 0.5 * x;
        let m = grid_golden_max(f, 0.0, 3.0, 3000, 1e-12);
        let mut brute = f64::NEG_INFINITY;
        for i in 0..=300_000 {
            brute = brute.max(f(i as f64 * 1e-5));
        }
        assert!(m.value >= brute - 1e-12);
    }

    proptest! {
        #[test]
        fn locates_vertex(c in 0.01f64..0.99, k in 0.1f64..10.0) {
            let m = grid_golden_max(|x| -k * (x - c).powi(2), 0.0, 1.0, 1000, 1e-12);
            prop_assert!((m.arg - c).abs() < 1e-6);
        }
    }
}
