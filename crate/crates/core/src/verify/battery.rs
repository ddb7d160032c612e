//! Seeded batches of inequality checks over random test functions.

use rand::Rng;
use rayon::prelude::*;

use super::{verify, InequalityKind, InequalityReport, InputClass, TestInput};
use crate::error::{Error, Result};
use crate::hyp::Params;
use crate::rp::{solve_rp, Rp};
use crate::testfun::{random_bump, random_separable, trial_rng};

/// Supports of the default radial family are drawn from `[lo, hi]`.
pub const DEFAULT_SUPPORT: (f64, f64) = (0.1, 20.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryConfig {
    pub kind: InequalityKind,
    pub params: Params,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Let radial supports start at the origin.
    pub allow_origin: bool,
    /// Exponent of the Hardy quotient; drawn from `(1, p]` when `None`.
    pub l: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BatterySummary {
    pub reports: Vec<InequalityReport>,
    pub passed: usize,
}

impl BatterySummary {
    pub fn all_pass(&self) -> bool {
        self.passed == self.reports.len()
    }
}

/// Whether the weights of `kind` stay integrable for supports reaching `r = 0`.
pub fn origin_admissible(kind: InequalityKind, params: &Params) -> bool {
    match kind {
        InequalityKind::Pgap => true,
        InequalityKind::Prop11 => params.nf() > params.p,
        InequalityKind::Thm25
        | InequalityKind::Cor27
        | InequalityKind::Thm29
        | InequalityKind::Thm72 => params.nf() > params.p,
        InequalityKind::Hardy1d | InequalityKind::Thm23 | InequalityKind::Thm32 => false,
    }
}

fn run_trial(cfg: &BatteryConfig, index: usize, support: (f64, f64)) -> Result<InequalityReport> {
    let mut rng = trial_rng(cfg.seed, index as u64);
    match cfg.kind.input() {
        InputClass::Radial => {
            let u = random_bump(&mut rng, support.0, support.1, cfg.allow_origin)?;
            verify(cfg.kind, &cfg.params, TestInput::Radial(&u), cfg.tol)
        }
        InputClass::HalfSpace => {
            let f = random_separable(&mut rng, cfg.params.n)?;
            verify(cfg.kind, &cfg.params, TestInput::HalfSpace(&f), cfg.tol)
        }
        InputClass::Profile => {
            let p = cfg.params.p;
            let l = match cfg.l {
                Some(l) => l,
                None => rng.random_range(1.0..p).max(1.0 + 1e-3).min(p),
            };
            let v = random_bump(&mut rng, support.0, support.1, false)?;
            verify(
                cfg.kind,
                &cfg.params,
                TestInput::Profile { v: &v, l },
                cfg.tol,
            )
        }
    }
}

/// Run `cfg.trials` independent checks in parallel; reports come back in
/// trial order. Any hypothesis or numerical error aborts the batch.
pub fn run_battery(cfg: &BatteryConfig) -> Result<BatterySummary> {
    cfg.kind.check_hypotheses(&cfg.params)?;
    if cfg.allow_origin && !origin_admissible(cfg.kind, &cfg.params) {
        return Err(Error::hypothesis(
            cfg.kind.name(),
            format!(
                "supports at the origin are not admissible for {} at N = {}, p = {}",
                cfg.kind, cfg.params.n, cfg.params.p
            ),
        ));
    }
    let support = match (cfg.kind, solve_rp_if_needed(cfg)?) {
        (InequalityKind::Thm72, Some(rp)) => (1e-2 * rp, 0.99 * rp),
        _ => DEFAULT_SUPPORT,
    };
    let reports = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i, support))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(BatterySummary { reports, passed })
}

fn solve_rp_if_needed(cfg: &BatteryConfig) -> Result<Option<f64>> {
    if cfg.kind != InequalityKind::Thm72 {
        return Ok(None);
    }
    Ok(match solve_rp(&cfg.params)? {
        Rp::Finite(r) => Some(r.root),
        Rp::Infinite => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: InequalityKind, n: u32, p: f64) -> BatteryConfig {
        BatteryConfig {
            kind,
            params: Params::new(n, p).unwrap(),
            trials: 6,
            seed: 7,
            tol: 1e-10,
            allow_origin: false,
            l: None,
        }
    }

    #[test]
    fn deterministic_and_ordered() {
        let c = cfg(InequalityKind::Pgap, 3, 2.0);
        let a = run_battery(&c).unwrap();
        let b = run_battery(&c).unwrap();
        assert!(a.all_pass());
        let ids: Vec<_> = a
            .reports
            .iter()
            .map(|r| r.test_function_id.clone())
            .collect();
        let ids_b: Vec<_> = b
            .reports
            .iter()
            .map(|r| r.test_function_id.clone())
            .collect();
        assert_eq!(ids, ids_b);
        for (x, y) in a.reports.iter().zip(&b.reports) {
            assert_eq!(x.lhs.to_bits(), y.lhs.to_bits());
        }
    }

    #[test]
    fn thm72_supports_inside_ball() {
        let summary = run_battery(&cfg(InequalityKind::Thm72, 13, 4.0)).unwrap();
        assert!(summary.all_pass());
    }

    #[test]
    fn origin_refusals() {
        let mut c = cfg(InequalityKind::Hardy1d, 3, 2.0);
        c.allow_origin = true;
        assert!(run_battery(&c).unwrap_err().is_hypothesis_violation());
        let mut c = cfg(InequalityKind::Prop11, 2, 3.0);
        c.allow_origin = true;
        assert!(run_battery(&c).unwrap_err().is_hypothesis_violation());
        assert!(origin_admissible(
            InequalityKind::Prop11,
            &Params::new(4, 3.0).unwrap()
        ));
    }

    #[test]
    fn origin_supports_pass() {
        let mut c = cfg(InequalityKind::Thm25, 5, 2.0);
        c.allow_origin = true;
        assert!(run_battery(&c).unwrap().all_pass());
    }
}
