//! Inequality verifiers, proof-step checks and sharpness scans.
//!
//! Every inequality instance is reduced to `lhs >= rhs` with all integrals
//! computed to a relative tolerance; an instance passes when
//! `lhs - rhs >= -quad_error`, where `quad_error` collects the propagated
//! error estimates of every integral on both sides.

mod battery;
mod proofsteps;
mod sharpness;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

pub use battery::{origin_admissible, run_battery, BatteryConfig, BatterySummary};
pub use proofsteps::{
    check_ftilde, check_pconvexity, ftilde, ftilde_grid, g_tilde, supersolution_residual, GridMin,
    SupersolutionResidual,
};
pub use sharpness::{hardy_tail_constant, sharpness_scan, SharpnessKind, SharpnessPoint};

use crate::constants::{brute_force_cnp, c_np};
use crate::error::{Error, Result};
use crate::hyp::{weight_v, HalfSpacePoint, Params};
use crate::quadrature::radial::integrate_profile;
use crate::quadrature::{
    halfspace_integral, radial_energy, radial_weighted_mass, QuadResult, RadialTestFunction,
    RadialWeight, Tolerance,
};
use crate::rp::{solve_rp, Rp};
use crate::testfun::HalfSpaceFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityKind {
    Pgap,
    Prop11,
    Thm23,
    Thm25,
    Cor27,
    Thm29,
    Thm32,
    Thm72,
    Hardy1d,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 9] = [
        InequalityKind::Pgap,
        InequalityKind::Prop11,
        InequalityKind::Thm23,
        InequalityKind::Thm25,
        InequalityKind::Cor27,
        InequalityKind::Thm29,
        InequalityKind::Thm32,
        InequalityKind::Thm72,
        InequalityKind::Hardy1d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::Pgap => "PGAP",
            InequalityKind::Prop11 => "PROP11",
            InequalityKind::Thm23 => "THM23",
            InequalityKind::Thm25 => "THM25",
            InequalityKind::Cor27 => "COR27",
            InequalityKind::Thm29 => "THM29",
            InequalityKind::Thm32 => "THM32",
            InequalityKind::Thm72 => "THM72",
            InequalityKind::Hardy1d => "HARDY1D",
        }
    }

    pub fn input(&self) -> InputClass {
        match self {
            InequalityKind::Thm23 | InequalityKind::Thm32 => InputClass::HalfSpace,
            InequalityKind::Hardy1d => InputClass::Profile,
            _ => InputClass::Radial,
        }
    }

    /// Check the hypotheses on `(N, p)`; the error names the failed predicate.
    pub fn check_hypotheses(&self, params: &Params) -> Result<()> {
        match self {
            InequalityKind::Thm25
            | InequalityKind::Cor27
            | InequalityKind::Thm29
            | InequalityKind::Thm72 => {
                if params.p < 2.0 {
                    return Err(Error::hypothesis(
                        self.name(),
                        format!("p >= 2 (p = {})", params.p),
                    ));
                }
                if !params.hypo_thm25() {
                    return Err(Error::hypothesis(
                        self.name(),
                        format!(
                            "N >= 1 + p(p-1) (N = {}, 1 + p(p-1) = {})",
                            params.n,
                            1.0 + params.p * (params.p - 1.0)
                        ),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown inequality kind {s:?}")))
    }
}

impl Serialize for InequalityKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputClass {
    Radial,
    HalfSpace,
    Profile,
}

/// Outcome of one inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub params: Params,
    pub test_function_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub quad_error: f64,
    pub pass: bool,
    /// Both sides are divided by `exp(log_scale)` (see the radial measure).
    pub log_scale: f64,
}

impl InequalityReport {
    fn new(
        kind: InequalityKind,
        params: &Params,
        id: &str,
        lhs: f64,
        rhs: f64,
        quad_error: f64,
        log_scale: f64,
    ) -> Result<Self> {
        let slack = lhs - rhs;
        if !(lhs.is_finite() && rhs.is_finite() && quad_error.is_finite()) {
            return Err(Error::Domain(format!(
                "{kind} report for {id} is not finite: lhs {lhs}, rhs {rhs}, error {quad_error}"
            )));
        }
        Ok(InequalityReport {
            kind,
            params: *params,
            test_function_id: id.to_string(),
            lhs,
            rhs,
            slack,
            quad_error,
            pass: slack >= -quad_error,
            log_scale,
        })
    }
}

/// Test input of the class a kind expects.
#[derive(Debug, Clone, Copy)]
pub enum TestInput<'a> {
    Radial(&'a RadialTestFunction),
    HalfSpace(&'a HalfSpaceFunction),
    /// One-dimensional profile with the mixed exponent `l`.
    Profile {
        v: &'a RadialTestFunction,
        l: f64,
    },
}

/// Verify `kind` for `(params, input)` with relative quadrature tolerance `tol`.
pub fn verify(
    kind: InequalityKind,
    params: &Params,
    input: TestInput<'_>,
    tol: f64,
) -> Result<InequalityReport> {
    match (kind.input(), input) {
        (InputClass::Radial, TestInput::Radial(u)) => verify_radial(kind, params, u, tol),
        (InputClass::HalfSpace, TestInput::HalfSpace(f)) => verify_halfspace(kind, params, f, tol),
        (InputClass::Profile, TestInput::Profile { v, l }) => verify_hardy1d(params, v, l, tol),
        _ => Err(Error::Precondition(format!(
            "{kind} does not take this kind of test function"
        ))),
    }
}

/// `(p-1) ((N-1)/p)^(p-2) ((p-1)/p)^2`.
pub fn poincare_hardy_constant(params: &Params) -> f64 {
    let p = params.p;
    let base = (params.nf() - 1.0) / p;
    let pow = if p == 2.0 { 1.0 } else { base.powf(p - 2.0) };
    (p - 1.0) * pow * ((p - 1.0) / p).powi(2)
}

/// Coefficients of `r^-p` and `sinh^-p` in the `H_p` inequality.
pub fn superphardy_constants(params: &Params) -> (f64, f64) {
    let (n, p) = (params.nf(), params.p);
    let pp = p.powf(p);
    let a = (p - 1.0).powf(p - 1.0) * (n * (p - 2.0) + 1.0) / pp;
    let b = (n - 1.0) * (n - 1.0 - p * (p - 1.0)) * (p - 1.0).powf(p - 2.0) / pp;
    (a, b)
}

/// Constant of the half-space remainder: the closed form when it is exact
/// (`p > 2`), the brute-force value of the defining maximization otherwise.
pub fn remainder_constant(params: &Params) -> Result<f64> {
    if params.p > 2.0 {
        Ok(c_np(params).value)
    } else {
        Ok(brute_force_cnp(params, 20_000)?.value)
    }
}

fn rel(q: &QuadResult) -> f64 {
    q.relative_error()
}

pub fn verify_radial(
    kind: InequalityKind,
    params: &Params,
    u: &RadialTestFunction,
    tol: f64,
) -> Result<InequalityReport> {
    if kind.input() != InputClass::Radial {
        return Err(Error::Precondition(format!(
            "{kind} is not a radial inequality"
        )));
    }
    kind.check_hypotheses(params)?;
    if kind == InequalityKind::Thm72 {
        if let Rp::Finite(root) = solve_rp(params)? {
            let (lo, hi) = u.support();
            if !(hi < root.root) {
                return Err(Error::Support {
                    lo,
                    hi,
                    limit: root.root,
                });
            }
        }
    }
    if kind == InequalityKind::Cor27 && !u.support().1.is_finite() {
        return Err(Error::Precondition(
            "COR27 needs a compactly supported function".into(),
        ));
    }
    let t = Tolerance::relative(tol);
    let en = radial_energy(params, u, t)?;
    let (e, m) = (en.energy, en.mass);
    let lam = params.lambda_p();
    let id = u.id();
    let gap = e.value - lam * m.value;
    let gap_err = e.error_estimate + lam * m.error_estimate;
    let mass = |w: RadialWeight| radial_weighted_mass(params, u, &w, t);

    let (lhs, rhs, err) = match kind {
        InequalityKind::Pgap => (e.value, lam * m.value, gap_err),
        InequalityKind::Prop11 => {
            let w = mass(RadialWeight::green(params, tol.min(1e-12))?)?;
            (gap, w.value, gap_err + w.error_estimate)
        }
        InequalityKind::Thm25 => {
            let c = poincare_hardy_constant(params);
            let hr = mass(RadialWeight::InversePowerR)?;
            (gap, c * hr.value, gap_err + c * hr.error_estimate)
        }
        InequalityKind::Cor27 => {
            // Both sides divided by M^p: ((E - ΛM)/M) (R/M)^(p-1) >= c.
            let c = poincare_hardy_constant(params);
            let r = mass(RadialWeight::PowerPPrime)?;
            let x = gap / m.value;
            let y = r.value / m.value;
            let lhs = x * y.powf(params.p - 1.0);
            let dx = gap_err / gap.abs() + rel(&m);
            let dy = rel(&r) + rel(&m);
            (lhs, c, lhs.abs() * (dx + (params.p - 1.0) * dy))
        }
        InequalityKind::Thm29 | InequalityKind::Thm72 => {
            let (a, b) = superphardy_constants(params);
            let hr = mass(RadialWeight::InversePowerR)?;
            let sh = mass(RadialWeight::InverseSinhPower)?;
            let (lhs, lhs_err) = if kind == InequalityKind::Thm29 {
                let hm = mass(RadialWeight::Hp)?;
                (
                    e.value - lam * hm.value,
                    e.error_estimate + lam * hm.error_estimate,
                )
            } else {
                (gap, gap_err)
            };
            let rhs = a * hr.value + b * sh.value;
            (
                lhs,
                rhs,
                lhs_err + a.abs() * hr.error_estimate + b.abs() * sh.error_estimate,
            )
        }
        _ => unreachable!(),
    };
    InequalityReport::new(kind, params, id, lhs, rhs, err, en.log_scale)
}

/// Which formulation of the half-space integrals to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HalfSpaceForm {
    /// `∫|∇u|^p y^(p-N) - Λ ∫|u|^p y^-N` against `∫|u|^p / (y^(N-1) sqrt(y^2 + x1^2))`.
    Euclidean,
    /// `∫|∇_H u|^p dv - Λ ∫|u|^p dv` against `∫ V |u|^p dv`, with
    /// `|∇_H u| = y |∇u|` and `dv = y^-N dx dy`.
    Hyperbolic,
}

fn halfspace_sides(
    params: &Params,
    f: &HalfSpaceFunction,
    tol: f64,
    form: HalfSpaceForm,
) -> Result<(f64, f64, f64)> {
    let (n, p) = (params.nf(), params.p);
    let t = Tolerance::relative(tol);
    let region = f.region();
    let (e, m, v) = match form {
        HalfSpaceForm::Euclidean => {
            let e = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| f.gradient_norm(pt).powf(p) * pt.y.powf(p - n),
                region,
                t,
            )?;
            let m = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| f.value(pt).abs().powf(p) * pt.y.powf(-n),
                region,
                t,
            )?;
            let v = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| {
                    f.value(pt).abs().powf(p) / (pt.y.powf(n - 1.0) * pt.y.hypot(pt.x1))
                },
                region,
                t,
            )?;
            (e, m, v)
        }
        HalfSpaceForm::Hyperbolic => {
            let dv = |pt: &HalfSpacePoint| pt.y.powf(-n);
            let e = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| (pt.y * f.gradient_norm(pt)).powf(p) * dv(pt),
                region,
                t,
            )?;
            let m = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| f.value(pt).abs().powf(p) * dv(pt),
                region,
                t,
            )?;
            let v = halfspace_integral(
                params,
                &|pt: &HalfSpacePoint| weight_v(pt) * f.value(pt).abs().powf(p) * dv(pt),
                region,
                t,
            )?;
            (e, m, v)
        }
    };
    let lam = params.lambda_p();
    let c = ((n - 1.0) / p).powf(p - 2.0) * remainder_constant(params)?;
    let lhs = e.value - lam * m.value;
    let rhs = c * v.value;
    let err = e.error_estimate + lam * m.error_estimate + c * v.error_estimate;
    Ok((lhs, rhs, err))
}

pub fn verify_halfspace(
    kind: InequalityKind,
    params: &Params,
    f: &HalfSpaceFunction,
    tol: f64,
) -> Result<InequalityReport> {
    let form = match kind {
        InequalityKind::Thm32 => HalfSpaceForm::Euclidean,
        InequalityKind::Thm23 => HalfSpaceForm::Hyperbolic,
        _ => {
            return Err(Error::Precondition(format!(
                "{kind} is not a half-space inequality"
            )))
        }
    };
    kind.check_hypotheses(params)?;
    let (lhs, rhs, err) = halfspace_sides(params, f, tol, form)?;
    InequalityReport::new(kind, params, f.id(), lhs, rhs, err, 0.0)
}

/// `∫|v|^(p-l) coth^(p-l) |v'|^l dr >= ((p-1)/p)^l ∫ |v|^p r^-p dr`.
pub fn verify_hardy1d(
    params: &Params,
    v: &RadialTestFunction,
    l: f64,
    tol: f64,
) -> Result<InequalityReport> {
    let p = params.p;
    if !(l > 1.0 && l <= p) {
        return Err(Error::hypothesis(
            "HARDY1D",
            format!("1 < l <= p (l = {l}, p = {p})"),
        ));
    }
    let (num, den) = hardy_quotient_parts(p, v, l, tol)?;
    let c = ((p - 1.0) / p).powf(l);
    InequalityReport::new(
        InequalityKind::Hardy1d,
        params,
        v.id(),
        num.value,
        c * den.value,
        num.error_estimate + c * den.error_estimate,
        0.0,
    )
}

/// Numerator and denominator of the one-dimensional Hardy quotient.
pub(crate) fn hardy_quotient_parts(
    p: f64,
    v: &RadialTestFunction,
    l: f64,
    tol: f64,
) -> Result<(QuadResult, QuadResult)> {
    let t = Tolerance::relative(tol);
    let k = p - l;
    let num_origin = v.origin_exponent().map(|g| g * k + (g - 1.0) * l - k);
    let den_origin = v.origin_exponent().map(|g| g * p - p);
    let num = integrate_profile(
        v,
        |r| {
            let ld = v.ln_abs_derivative(r);
            if ld == f64::NEG_INFINITY {
                return 0.0;
            }
            if k == 0.0 {
                return (l * ld).exp();
            }
            let lv = v.ln_abs_value(r);
            if lv == f64::NEG_INFINITY {
                return 0.0;
            }
            let ln_coth = -(r.tanh().ln());
            (k * (lv + ln_coth) + l * ld).exp()
        },
        num_origin,
        None,
        t,
    )?;
    let den = integrate_profile(
        v,
        |r| {
            let lv = v.ln_abs_value(r);
            if lv == f64::NEG_INFINITY {
                0.0
            } else {
                (p * (lv - r.ln())).exp()
            }
        },
        den_origin,
        None,
        t,
    )?;
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfun::{make_bump, make_veps, BumpShape};

    fn pr(n: u32, p: f64) -> Params {
        Params::new(n, p).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in InequalityKind::ALL {
            assert_eq!(k.name().parse::<InequalityKind>().unwrap(), k);
            assert_eq!(
                k.name().to_lowercase().parse::<InequalityKind>().unwrap(),
                k
            );
        }
        assert!("THM99".parse::<InequalityKind>().is_err());
    }

    #[test]
    fn pgap_mollifier_passes_strictly() {
        let u = make_bump(1.0, 3.0, BumpShape::Mollifier).unwrap();
        let r = verify_radial(InequalityKind::Pgap, &pr(3, 2.0), &u, 1e-10).unwrap();
        assert!(r.pass);
        assert!(r.slack > 0.0);
    }

    #[test]
    fn thm25_constant_at_p_two() {
        assert!((poincare_hardy_constant(&pr(4, 2.0)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let u = make_bump(1.0, 2.0, BumpShape::Mollifier).unwrap();
        let e = verify_radial(InequalityKind::Thm25, &pr(6, 3.0), &u, 1e-8).unwrap_err();
        assert!(e.is_hypothesis_violation());
        assert!(e.to_string().contains("N >= 1 + p(p-1)"));
        let e = verify_radial(InequalityKind::Thm25, &pr(6, 1.5), &u, 1e-8).unwrap_err();
        assert!(e.to_string().contains("p >= 2"));
    }

    #[test]
    fn thm72_support_check() {
        let u = make_bump(0.5, 1.5, BumpShape::Mollifier).unwrap();
        let e = verify_radial(InequalityKind::Thm72, &pr(13, 4.0), &u, 1e-8).unwrap_err();
        assert!(matches!(e, Error::Support { .. }));
        let inside = make_bump(0.2, 1.0, BumpShape::Mollifier).unwrap();
        assert!(
            verify_radial(InequalityKind::Thm72, &pr(13, 4.0), &inside, 1e-10)
                .unwrap()
                .pass
        );
        // p = 2: the ball is the whole space.
        assert!(
            verify_radial(InequalityKind::Thm72, &pr(3, 2.0), &u, 1e-10)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn thm29_and_thm25_agree_at_p_two() {
        let u = make_bump(0.4, 2.5, BumpShape::Mollifier).unwrap();
        let params = pr(5, 2.0);
        let a = verify_radial(InequalityKind::Thm25, &params, &u, 1e-12).unwrap();
        let b = verify_radial(InequalityKind::Thm29, &params, &u, 1e-12).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-12 * a.lhs.abs());
        let (ca, cb) = superphardy_constants(&params);
        assert!((ca - poincare_hardy_constant(&params)).abs() < 1e-15);
        let hr = radial_weighted_mass(
            &params,
            &u,
            &RadialWeight::InversePowerR,
            Tolerance::relative(1e-12),
        )
        .unwrap();
        let sh = radial_weighted_mass(
            &params,
            &u,
            &RadialWeight::InverseSinhPower,
            Tolerance::relative(1e-12),
        )
        .unwrap();
        assert!((b.rhs - a.rhs - cb * sh.value).abs() < 1e-10 * b.rhs);
        assert!((a.rhs - ca * hr.value).abs() < 1e-12 * a.rhs);
    }

    #[test]
    fn pgap_quotient_scale_invariant() {
        let u = make_bump(0.7, 4.0, BumpShape::Mollifier).unwrap();
        let params = pr(4, 3.0);
        let a = verify_radial(InequalityKind::Pgap, &params, &u, 1e-12).unwrap();
        let b = verify_radial(InequalityKind::Pgap, &params, &u.scaled(13.0), 1e-12).unwrap();
        assert!((a.lhs / a.rhs - b.lhs / b.rhs).abs() < 1e-12 * (a.lhs / a.rhs));
    }

    #[test]
    fn hardy1d_l_equals_p_is_classical() {
        let v = make_bump(0.3, 2.0, BumpShape::Mollifier).unwrap();
        let p = 3.0;
        let r = verify_hardy1d(&pr(2, p), &v, p, 1e-12).unwrap();
        let (num, den) = hardy_quotient_parts(p, &v, p, 1e-12).unwrap();
        let t = Tolerance::relative(1e-12);
        let plain =
            integrate_profile(&v, |x| v.derivative(x).abs().powf(p), None, None, t).unwrap();
        assert!((num.value - plain.value).abs() < 1e-11 * plain.value);
        assert!((r.rhs - (2.0f64 / 3.0).powi(3) * den.value).abs() < 1e-14 * r.rhs);
        assert!(r.pass);
    }

    #[test]
    fn hardy1d_finite_on_veps() {
        let v = make_veps(3.0, 1e-2, 1e-2).unwrap();
        for &l in &[1.5, 2.0, 3.0] {
            let (num, den) = hardy_quotient_parts(3.0, &v, l, 1e-10).unwrap();
            assert!(num.value.is_finite() && den.value.is_finite());
        }
    }

    #[test]
    fn wrong_input_class() {
        let u = make_bump(1.0, 2.0, BumpShape::Mollifier).unwrap();
        assert!(verify(
            InequalityKind::Thm32,
            &pr(2, 2.0),
            TestInput::Radial(&u),
            1e-8
        )
        .is_err());
    }
}
