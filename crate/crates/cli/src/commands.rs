use hyperpoincare::constants::{brute_force_cnp, c_2p, c_2p_from_gamma, c_np, check_ni, CnpKind};
use hyperpoincare::hyp::{weight_hp, weight_v, GreenTable};
use hyperpoincare::report::{PayloadKind, ReportEnvelope, Table};
use hyperpoincare::rp::{hp_curve, rp_scan_n, rp_scan_p, solve_r0, solve_rp, Rp, RpScanRow};
use hyperpoincare::testfun::trial_rng;
use hyperpoincare::verify::{
    check_ftilde, check_pconvexity, ftilde_grid, run_battery, sharpness_scan,
    supersolution_residual, BatteryConfig, SharpnessKind,
};
use hyperpoincare::{Error, HalfSpacePoint, InequalityKind, Params, Result};
use rand::Rng;

use crate::{Cli, Command, KindArg, Outcome, ParamArgs};

type Failure = (Option<Params>, Error);

const CROSS_CHECK_TOL: f64 = 1e-8;
const SLACK_FLOOR: f64 = -1e-14;
const RESIDUAL_TOL: f64 = 1e-6;
const SUPERSOLUTION_RADII: usize = 16;
const FD_STEP: f64 = 1e-5;

pub fn run(cli: &Cli) -> std::result::Result<Outcome, Failure> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err((
            None,
            Error::InvalidParams(format!("--tol must lie in (0, 1), got {tol}")),
        ));
    }
    match &cli.command {
        Command::Constants { params, grid } => with_params(params, |pr| constants(pr, *grid)),
        Command::Weights {
            params,
            r_max,
            samples,
        } => with_params(params, |pr| weights(pr, *r_max, *samples, tol)),
        Command::Rp { params } => with_params(params, rp),
        Command::RpScan {
            n,
            p,
            n_values,
            p_values,
        } => rp_scan(*n, *p, n_values, p_values).map_err(|e| (None, e)),
        Command::Verify {
            params,
            kind,
            trials,
            seed,
            allow_origin,
            l,
        } => with_params(params, |pr| {
            let kind = InequalityKind::from(*kind);
            if l.is_some() && kind != InequalityKind::Hardy1d {
                return Err(Error::InvalidParams("--l only applies to HARDY1D".into()));
            }
            verify(BatteryConfig {
                kind,
                params: *pr,
                trials: *trials,
                seed: *seed,
                tol,
                allow_origin: *allow_origin,
                l: *l,
            })
        }),
        Command::Sharpness {
            params,
            kind,
            schedule,
            l,
        } => with_params(params, |pr| sharpness(pr, *kind, schedule, *l, tol)),
        Command::Figure1 {
            params,
            r_max,
            samples,
        } => with_params(params, |pr| figure1(pr, *r_max, *samples)),
        Command::Proofcheck {
            params,
            trials,
            seed,
        } => with_params(params, |pr| proofcheck(pr, *trials, *seed)),
    }
}

fn with_params(
    args: &ParamArgs,
    f: impl FnOnce(&Params) -> Result<Outcome>,
) -> std::result::Result<Outcome, Failure> {
    let params = args.params().map_err(|e| (None, e))?;
    f(&params).map_err(|e| (Some(params), e))
}

fn constants(params: &Params, grid: usize) -> Result<Outcome> {
    let mut table = Table::new(["name", "value", "kind", "note", "pass"]);
    let mut pass = true;
    table.push(vec![
        "LambdaP".into(),
        params.lambda_p().into(),
        "exact".into(),
        "((N-1)/p)^p".into(),
        true.into(),
    ])?;
    let c = c_np(params);
    let kind = match c.kind {
        CnpKind::Exact => "exact",
        CnpKind::LowerBound => "lowerBound",
    };
    table.push(vec![
        "C".into(),
        c.value.into(),
        kind.into(),
        c.case.label().into(),
        true.into(),
    ])?;
    let brute = brute_force_cnp(params, grid)?;
    let ok = match c.kind {
        CnpKind::Exact => (brute.value - c.value).abs() <= CROSS_CHECK_TOL * c.value.abs().max(1.0),
        CnpKind::LowerBound => brute.value >= c.value - CROSS_CHECK_TOL,
    };
    pass &= ok;
    table.push(vec![
        "C_brute_force".into(),
        brute.value.into(),
        "numeric".into(),
        format!("grid {grid} plus golden section").into(),
        ok.into(),
    ])?;
    if params.n == 2 && params.p > 1.0 && params.p < 2.0 {
        for (name, res) in [
            ("c_2p", c_2p(params.p)?),
            ("c_2p_from_gamma", c_2p_from_gamma(params.p)?),
        ] {
            let ok =
                (res.value - brute.value).abs() <= CROSS_CHECK_TOL * brute.value.abs().max(1.0);
            pass &= ok;
            table.push(vec![
                name.into(),
                res.value.into(),
                "exact".into(),
                "compared with C_brute_force".into(),
                ok.into(),
            ])?;
        }
    }
    let env = ReportEnvelope::new("constants", Some(*params), PayloadKind::Constants, table);
    Ok(Outcome {
        envelope: env,
        pass,
    })
}

fn grid(r_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(r_max > 0.0) || samples == 0 {
        return Err(Error::Precondition(format!(
            "need --r-max > 0 and --samples >= 1 (got {r_max}, {samples})"
        )));
    }
    Ok((1..=samples)
        .map(|i| i as f64 * r_max / samples as f64)
        .collect())
}

fn weights(params: &Params, r_max: f64, samples: usize, tol: f64) -> Result<Outcome> {
    let radii = grid(r_max, samples)?;
    let table_w = GreenTable::build(params, tol)?;
    let mut table = Table::new(["r", "W", "W_err", "Hp", "V"]);
    let mut env_diag = Vec::new();
    for r in radii {
        let (w, w_err) = table_w.weight(r)?;
        let hp = match weight_hp(params, r) {
            Ok(v) => v,
            Err(e) => {
                if env_diag.is_empty() {
                    env_diag.push(format!("Hp undefined from r = {r}: {e}"));
                }
                f64::NAN
            }
        };
        // Point at distance r from (0, 1) on the unit semicircle.
        let pt = HalfSpacePoint::new(r.tanh(), 0.0, 1.0 / r.cosh())?;
        table.push(vec![
            r.into(),
            w.into(),
            w_err.into(),
            hp.into(),
            weight_v(&pt).into(),
        ])?;
    }
    let mut env = ReportEnvelope::new("weights", Some(*params), PayloadKind::Curve, table);
    env.diagnostics
        .push("V sampled along the unit semicircle through (0, 1)".into());
    env.diagnostics.extend(env_diag);
    Ok(Outcome {
        envelope: env,
        pass: true,
    })
}

fn rp(params: &Params) -> Result<Outcome> {
    let mut table = Table::new(["name", "value", "residual", "iterations"]);
    let rp = solve_rp(params)?;
    if params.p > 2.0 {
        let r0 = solve_r0(params)?;
        table.push(vec![
            "r0".into(),
            r0.root.into(),
            r0.residual.into(),
            r0.iterations.into(),
        ])?;
    }
    match rp {
        Rp::Finite(r) => table.push(vec![
            "rp".into(),
            r.root.into(),
            r.residual.into(),
            r.iterations.into(),
        ])?,
        Rp::Infinite => table.push(vec![
            "rp".into(),
            f64::INFINITY.into(),
            0.0.into(),
            0usize.into(),
        ])?,
    }
    let env = ReportEnvelope::new("rp", Some(*params), PayloadKind::Scan, table);
    Ok(Outcome {
        envelope: env,
        pass: true,
    })
}

fn rp_scan(n: Option<u32>, p: Option<f64>, n_values: &[u32], p_values: &[f64]) -> Result<Outcome> {
    let (rows, params) = match (n, p) {
        (None, Some(p)) if !n_values.is_empty() => (rp_scan_n(p, n_values)?, None),
        (Some(n), None) if !p_values.is_empty() => (rp_scan_p(n, p_values)?, None),
        _ => {
            return Err(Error::InvalidParams(
                "rp-scan needs either --p with --n-values or --N with --p-values".into(),
            ))
        }
    };
    let mut table = Table::new([
        "N",
        "p",
        "rp",
        "residual",
        "slope_fd",
        "slope_stated",
        "slope_implicit",
    ]);
    for RpScanRow {
        n,
        p,
        rp,
        residual,
        slope_fd,
        slope_stated,
        slope_implicit,
    } in rows
    {
        table.push(vec![
            n.into(),
            p.into(),
            rp.into(),
            residual.into(),
            slope_fd.into(),
            slope_stated.into(),
            slope_implicit.into(),
        ])?;
    }
    let env = ReportEnvelope::new("rp-scan", params, PayloadKind::Scan, table);
    Ok(Outcome {
        envelope: env,
        pass: true,
    })
}

fn verify(cfg: BatteryConfig) -> Result<Outcome> {
    let summary = run_battery(&cfg)?;
    let table = Table::from_reports(&summary.reports);
    let mut env = ReportEnvelope::new("verify", Some(cfg.params), PayloadKind::Reports, table)
        .with_seed(cfg.seed);
    env.diagnostics.push(format!(
        "{}: {} of {} reports pass",
        cfg.kind,
        summary.passed,
        summary.reports.len()
    ));
    Ok(Outcome {
        pass: summary.all_pass(),
        envelope: env,
    })
}

fn parse_schedule(entries: &[String]) -> Result<Vec<(f64, Option<f64>)>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad schedule entry {s:?}")))
    };
    entries
        .iter()
        .map(|e| match e.split_once(':') {
            Some((a, b)) => Ok((num(a)?, Some(num(b)?))),
            None => Ok((num(e)?, None)),
        })
        .collect()
}

fn sharpness(
    params: &Params,
    kind: KindArg,
    schedule: &[String],
    l: Option<f64>,
    tol: f64,
) -> Result<Outcome> {
    let mut sched = parse_schedule(schedule)?;
    let kind = match (kind, l) {
        (KindArg::Pgap, None) => SharpnessKind::Pgap,
        (KindArg::Hardy1d, l) => {
            for e in &mut sched {
                e.1 = e.1.or(Some(e.0));
            }
            SharpnessKind::Hardy1d {
                l: l.unwrap_or(params.p),
            }
        }
        (KindArg::Pgap, Some(_)) => {
            return Err(Error::InvalidParams("--l only applies to HARDY1D".into()))
        }
        (other, _) => {
            return Err(Error::InvalidParams(format!(
                "sharpness scans exist for PGAP and HARDY1D, not {}",
                InequalityKind::from(other)
            )))
        }
    };
    let points = sharpness_scan(kind, params, &sched, tol)?;
    let mut table = Table::new([
        "eps",
        "delta",
        "quotient",
        "quad_error",
        "lower",
        "upper",
        "within_bounds",
    ]);
    for q in &points {
        table.push(vec![
            q.eps.into(),
            q.delta.unwrap_or(f64::NAN).into(),
            q.quotient.into(),
            q.quad_error.into(),
            q.lower.into(),
            q.upper.into(),
            q.within_bounds.into(),
        ])?;
    }
    let pass = points.iter().all(|q| q.within_bounds);
    let env = ReportEnvelope::new("sharpness", Some(*params), PayloadKind::Scan, table);
    Ok(Outcome {
        envelope: env,
        pass,
    })
}

fn figure1(params: &Params, r_max: f64, samples: usize) -> Result<Outcome> {
    let (points, rp) = hp_curve(params, r_max, samples)?;
    let rp = rp.radius();
    let mut table = Table::new(["r", "Hp", "is_ge_one"]);
    for q in &points {
        table.push(vec![q.r.into(), q.hp.into(), q.is_ge_one.into()])?;
    }
    let mut env_diag = Vec::new();
    if rp.is_finite() {
        table.push(vec![rp.into(), weight_hp(params, rp)?.into(), "r_p".into()])?;
        env_diag.push(format!("last row marks r_p = {rp}"));
    }
    let pass = points.iter().all(|q| q.is_ge_one == (q.r <= rp));
    let mut env = ReportEnvelope::new("figure1", Some(*params), PayloadKind::Curve, table);
    env.diagnostics.extend(env_diag);
    Ok(Outcome {
        envelope: env,
        pass,
    })
}

fn proofcheck(params: &Params, trials: usize, seed: u64) -> Result<Outcome> {
    if trials == 0 {
        return Err(Error::Precondition("--trials must be positive".into()));
    }
    let mut rng = trial_rng(seed, 0);
    let mut table = Table::new(["check", "value", "at", "threshold", "pass"]);
    let mut diagnostics = Vec::new();
    let mut all = true;

    let (mut ni, mut ni_at) = (f64::INFINITY, 0.0);
    for _ in 0..trials {
        let (b, s) = (rng.random_range(0.0..6.0), rng.random_range(0.0..=1.0));
        let v = check_ni(b, s);
        if v < ni {
            (ni, ni_at) = (v, s);
        }
    }
    all &= ni >= SLACK_FLOOR;
    table.push(vec![
        "ni_min_slack".into(),
        ni.into(),
        ni_at.into(),
        SLACK_FLOOR.into(),
        (ni >= SLACK_FLOOR).into(),
    ])?;

    let (mut pc, mut pc_at) = (f64::INFINITY, 0.0);
    for _ in 0..trials {
        let xi = rng.random_range(0.0..2.0);
        let eta = rng.random_range(-2.0..=xi);
        let v = check_pconvexity(params.p, xi, eta)?;
        if v < pc {
            (pc, pc_at) = (v, eta);
        }
    }
    all &= pc >= SLACK_FLOOR;
    table.push(vec![
        "pconvexity_min_slack".into(),
        pc.into(),
        pc_at.into(),
        SLACK_FLOOR.into(),
        (pc >= SLACK_FLOOR).into(),
    ])?;

    let ft = check_ftilde(params, &ftilde_grid())?;
    let ft_ok = if params.hypo_thm25() {
        ft.value >= 0.0
    } else {
        diagnostics.push("N >= 1 + p(p-1) fails, F~ minimum is informational".into());
        true
    };
    all &= ft_ok;
    table.push(vec![
        "ftilde_min".into(),
        ft.value.into(),
        ft.arg.into(),
        0.0.into(),
        ft_ok.into(),
    ])?;

    let (mut id, mut id_at, mut der, mut der_at) = (0.0f64, 0.0, 0.0f64, 0.0);
    for _ in 0..SUPERSOLUTION_RADII {
        let r = rng.random_range(0.1..10.0);
        let s = supersolution_residual(params, r, FD_STEP)?;
        if s.identity > id {
            (id, id_at) = (s.identity, r);
        }
        if s.derivative > der {
            (der, der_at) = (s.derivative, r);
        }
        diagnostics.extend(s.warning);
    }
    for (name, v, at) in [
        ("supersolution_identity", id, id_at),
        ("supersolution_derivative", der, der_at),
    ] {
        let ok = v < RESIDUAL_TOL;
        all &= ok;
        table.push(vec![
            name.into(),
            v.into(),
            at.into(),
            RESIDUAL_TOL.into(),
            ok.into(),
        ])?;
    }

    let mut env = ReportEnvelope::new("proofcheck", Some(*params), PayloadKind::Checks, table)
        .with_seed(seed);
    env.diagnostics = diagnostics;
    Ok(Outcome {
        envelope: env,
        pass: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_entries() {
        let s = parse_schedule(&["0.1".into(), "0.01:0.02".into()]).unwrap();
        assert_eq!(s, vec![(0.1, None), (0.01, Some(0.02))]);
        assert!(parse_schedule(&["x".into()]).is_err());
    }

    #[test]
    fn grid_excludes_origin() {
        let g = grid(1.0, 4).unwrap();
        assert_eq!(g, vec![0.25, 0.5, 0.75, 1.0]);
        assert!(grid(0.0, 4).is_err());
    }
}
