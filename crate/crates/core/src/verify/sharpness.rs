//! Rayleigh quotients along the families that saturate the sharp constants.

use serde::Serialize;

use super::hardy_quotient_parts;
use crate::error::{Error, Result};
use crate::hyp::Params;
use crate::quadrature::{integrate_interval, radial_energy, Endpoints, Tolerance};
use crate::testfun::{make_veps, ueps_radial};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SharpnessKind {
    /// `E/M` of `U_ε`, sharp constant `Λ_p`.
    Pgap,
    /// One-dimensional mixed Hardy quotient of `V_ε^δ` with exponent `l`,
    /// sharp constant `((p-1)/p)^l`.
    Hardy1d { l: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessPoint {
    pub eps: f64,
    pub delta: Option<f64>,
    pub quotient: f64,
    pub quad_error: f64,
    /// The sharp constant.
    pub lower: f64,
    /// Bound on the quotient of this member of the family.
    pub upper: f64,
    pub within_bounds: bool,
}

/// `∫_1^2 (2 - r)^(p-l) coth^(p-l) r dr`.
pub fn hardy_tail_constant(p: f64, l: f64) -> Result<f64> {
    let k = p - l;
    if k == 0.0 {
        return Ok(1.0);
    }
    let q = integrate_interval(
        |r: f64| ((2.0 - r) / r.tanh()).powf(k),
        1.0,
        2.0,
        Tolerance::relative(1e-13),
        Endpoints::singular_right(),
    )?;
    Ok(q.value)
}

/// Quotients along `schedule`, whose `ε` must strictly decrease. For the
/// Hardy quotient each entry needs a `δ`.
pub fn sharpness_scan(
    kind: SharpnessKind,
    params: &Params,
    schedule: &[(f64, Option<f64>)],
    tol: f64,
) -> Result<Vec<SharpnessPoint>> {
    if schedule.is_empty() {
        return Err(Error::Precondition("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::Precondition(
            "schedule must be strictly decreasing in eps".into(),
        ));
    }
    let p = params.p;
    let t = Tolerance::relative(tol);
    match kind {
        SharpnessKind::Pgap => schedule
            .iter()
            .map(|&(eps, _)| {
                let u = ueps_radial(params, eps)?;
                let en = radial_energy(params, &u, t)?;
                let q = en.energy.value / en.mass.value;
                let qe = q * (en.energy.relative_error() + en.mass.relative_error());
                let lower = params.lambda_p();
                let upper = ((params.nf() - 1.0 + eps) / p).powf(p);
                Ok(SharpnessPoint {
                    eps,
                    delta: None,
                    quotient: q,
                    quad_error: qe,
                    lower,
                    upper,
                    within_bounds: q >= lower - qe && q <= upper + qe,
                })
            })
            .collect(),
        SharpnessKind::Hardy1d { l } => {
            if !(l > 1.0 && l <= p) {
                return Err(Error::hypothesis(
                    "HARDY1D",
                    format!("1 < l <= p (l = {l}, p = {p})"),
                ));
            }
            let c = hardy_tail_constant(p, l)?;
            schedule
                .iter()
                .map(|&(eps, delta)| {
                    let delta = delta.ok_or_else(|| {
                        Error::Precondition("the Hardy schedule needs (eps, delta) pairs".into())
                    })?;
                    let v = make_veps(p, eps, delta)?;
                    let (num, den) = hardy_quotient_parts(p, &v, l, tol)?;
                    let q = num.value / den.value;
                    let qe = q * (num.relative_error() + den.relative_error());
                    let lower = ((p - 1.0) / p).powf(l);
                    let upper = ((p - 1.0 + delta) / p).powf(l) * eps.cosh().powf(p - l)
                        + c * delta * eps.powf(p - 1.0);
                    Ok(SharpnessPoint {
                        eps,
                        delta: Some(delta),
                        quotient: q,
                        quad_error: qe,
                        lower,
                        upper,
                        within_bounds: q >= lower - qe && q <= upper + qe,
                    })
                })
                .collect()
        }
    }
}
