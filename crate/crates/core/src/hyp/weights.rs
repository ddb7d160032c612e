use super::{HalfSpacePoint, Params};
use crate::error::{Error, Result};
use crate::special::coth_minus_inv;

/// `coth r - ((p-1)/(N-1))/r`, written as `(coth r - 1/r) + (1 - k)/r` so
/// the two `1/r` singularities never cancel numerically.
pub fn hp_base(params: &Params, r: f64) -> f64 {
    let k = (params.p - 1.0) / (params.nf() - 1.0);
    coth_minus_inv(r) + (1.0 - k) / r
}

/// `H_p(r) = (coth r - ((p-1)/(N-1))/r)^(p-2)`.
pub fn weight_hp(params: &Params, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("H_p needs r > 0, got {r}")));
    }
    if params.p < 2.0 {
        return Err(Error::Domain(format!("H_p needs p >= 2, got {}", params.p)));
    }
    if params.p == 2.0 {
        return Ok(1.0);
    }
    let base = hp_base(params, r);
    if !(base > 0.0) {
        return Err(Error::Domain(format!(
            "H_p base {base:e} is not positive at r = {r} (N = {}, p = {})",
            params.n, params.p
        )));
    }
    Ok(base.powf(params.p - 2.0))
}

/// `y / sqrt(y^2 + x1^2)`.
pub fn weight_v(pt: &HalfSpacePoint) -> f64 {
    pt.y / pt.y.hypot(pt.x1)
}

/// Distance from `(0, 1)`, as `2 asinh(d / (2 sqrt y))` with `d` the
/// Euclidean distance; this equals `arcosh(1 + d^2/(2y))` without the loss
/// of accuracy near the base point.
pub fn geodesic_distance(pt: &HalfSpacePoint) -> f64 {
    let d2 = (pt.y - 1.0).powi(2) + pt.x_norm_sq();
    2.0 * (d2.sqrt() / (2.0 * pt.y.sqrt())).asinh()
}

/// `h(r) = -(N-1) r^2 + (p-1) sinh^2 r`.
pub fn h_func(params: &Params, r: f64) -> f64 {
    -(params.nf() - 1.0) * r * r + (params.p - 1.0) * r.sinh().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pr(n: u32, p: f64) -> Params {
        Params::new(n, p).unwrap()
    }

    #[test]
    fn hp_at_p_two_is_one() {
        for n in 2..20 {
            for &r in &[1e-9, 0.3, 5.0, 400.0] {
                assert_eq!(weight_hp(&pr(n, 2.0), r).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn hp_limits() {
        let params = pr(13, 4.0);
        let big = weight_hp(&params, 200.0).unwrap();
        assert!(big < 1.0 && big > 0.99);
        let r = 1e-6;
        let scaled = weight_hp(&params, r).unwrap() * r.powf(2.0);
        let expected = (9.0f64 / 12.0).powi(2);
        assert!((scaled - expected).abs() < 1e-9);
    }

    #[test]
    fn hp_domain_error_outside_hypotheses() {
        // (p-1)/(N-1) > 1 makes the base negative near 0.
        assert!(weight_hp(&pr(3, 4.0), 1e-3).is_err());
    }

    #[test]
    fn v_values() {
        let on_axis = HalfSpacePoint::new(0.0, 0.3, 1.0).unwrap();
        assert_eq!(weight_v(&on_axis), 1.0);
        let diag = HalfSpacePoint::new(2.0, 0.0, 2.0).unwrap();
        assert!((weight_v(&diag) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let alpha: f64 = 0.3;
        let k = ((1.0 - alpha * alpha) / (alpha * alpha)).sqrt();
        for &y in &[0.1, 1.0, 50.0] {
            let pt = HalfSpacePoint::new(k * y, 0.0, y).unwrap();
            assert!((weight_v(&pt) - alpha).abs() < 1e-14);
        }
    }

    #[test]
    fn distance_values() {
        let base = HalfSpacePoint::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(geodesic_distance(&base), 0.0);
        let up = HalfSpacePoint::new(0.0, 0.0, std::f64::consts::E).unwrap();
        assert!((geodesic_distance(&up) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn v_decay_along_horizontal_line() {
        // V e^{r/2} -> sqrt(beta) as x1 grows with y = beta fixed.
        let beta: f64 = 3.0;
        let pt = HalfSpacePoint::new(1e6, 0.0, beta).unwrap();
        let r = geodesic_distance(&pt);
        let v = weight_v(&pt) * (0.5 * r).exp();
        assert!((v - beta.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn h_values() {
        let params = pr(13, 4.0);
        assert!((h_func(&params, 1.0) + 7.856_706).abs() < 1e-6);
        let r = 1e-4;
        assert!((h_func(&params, r) / (r * r) + 9.0).abs() < 1e-6);
        assert!(h_func(&params, 10.0) > 0.0);
    }

    #[test]
    fn h_single_sign_change() {
        for &(n, p) in &[(13u32, 4.0), (7, 3.0), (5, 2.5), (40, 4.5)] {
            let params = pr(n, p);
            let mut changes = 0;
            let mut prev = h_func(&params, 1e-3);
            assert!(prev < 0.0);
            for i in 1..20_000 {
                let r = 1e-3 + i as f64 * 1e-3;
                let cur = h_func(&params, r);
                if (cur > 0.0) != (prev > 0.0) {
                    changes += 1;
                }
                prev = cur;
            }
            assert_eq!(changes, 1, "N = {n}, p = {p}");
        }
    }

    proptest! {
        #[test]
        fn v_in_unit_interval(x1 in -1e3f64..1e3, y in 1e-3f64..1e3) {
            let v = weight_v(&HalfSpacePoint::new(x1, 0.0, y).unwrap());
            prop_assert!(v > 0.0 && v <= 1.0);
        }

        #[test]
        fn distance_matches_arcosh(x1 in -5f64..5.0, rho in 0f64..5.0, y in 0.05f64..20.0) {
            let pt = HalfSpacePoint::new(x1, rho, y).unwrap();
            let direct = (1.0 + ((y - 1.0).powi(2) + x1 * x1 + rho * rho) / (2.0 * y)).acosh();
            let r = geodesic_distance(&pt);
            prop_assert!((r - direct).abs() <= 1e-9 * (1.0 + direct));
        }

        #[test]
        fn coth_exceeds_inverse(r in 1e-8f64..50.0) {
            prop_assert!(coth_minus_inv(r) > 0.0);
        }
    }
}
