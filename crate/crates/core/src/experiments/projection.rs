use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{default_samples, echo, run_trials, Clock};
use crate::bodies::{construct_body, BodySpec};
use crate::error::{Error, Result};
use crate::estimators::{mc_sigma_body, within};
use crate::geometry::{lift_waist, segment_cap_check, verify_projection_hypothesis, Subspace};
use crate::measure::{sigma_exact, sigma_lip_lower, SubsphereQuery};
use crate::report::{ExperimentReport, InequalityCheck, TrialTable};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    pub body: BodySpec,
    /// Rank of the projection.
    pub k: usize,
    /// Axes spanning the range of `P`; the first `k` by default.
    #[serde(default)]
    pub axes: Option<Vec<usize>>,
    pub eps: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Points of the lifted waist checked for containment.
    #[serde(default = "waist_default")]
    pub waist_samples: usize,
    #[serde(default = "probes_default")]
    pub hypothesis_probes: usize,
    /// Also require agreement with the equality-case value (for bodies
    /// whose projection coincides with their section).
    #[serde(default)]
    pub expect_equality: bool,
}

fn waist_default() -> usize {
    2_000
}
fn probes_default() -> usize {
    10_000
}

impl ProjectionConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.body.dim()?;
        if !(1 <= self.k && self.k < n) {
            return Err(Error::spec("k", format!("need 1 ≤ k < n = {n}")));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::spec("eps", "must lie in (0, 1)"));
        }
        if self.samples == 0 {
            return Err(Error::spec("samples", "must be at least 1"));
        }
        Ok(())
    }
}

const COLUMNS: [&str; 6] = ["trial", "g_norm", "fiber_residual", "f_in_body", "neighbor_within_eps", "interval_ok"];

/// Compares `σ_{n−1}(K + εD)` with the waist bound at `arcsin ε` for a body
/// whose rank-`k` projection contains the ball, and checks the lifted waist
/// pointwise: `f(x) ∈ K`, and points within `arcsin ε` of `f(x)` lie within
/// `ε` of `K`.
pub fn run_projection(cfg: &ProjectionConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let body = construct_body(&cfg.body)?;
    let n = body.dim();
    let axes = cfg.axes.clone().unwrap_or_else(|| (0..cfg.k).collect());
    if axes.len() != cfg.k {
        return Err(Error::spec("axes", "must list k axes"));
    }
    let p = Subspace::coordinate(n, &axes)?;
    verify_projection_hypothesis(&body, &p, cfg.hypothesis_probes, rng::derive_seed(seed, "projection/hypothesis", 0))?;
    let theta = cfg.eps.asin();
    let lhs = mc_sigma_body(&body, cfg.eps, cfg.samples, rng::derive_seed(seed, "projection/sigma", 0))?;
    let bound = sigma_lip_lower(n - 1, cfg.k - 1, theta)?;
    let equality = sigma_exact(&SubsphereQuery::new(n - 1, cfg.k - 1, theta)?);

    let rows = run_trials(cfg.waist_samples, |t| {
        let mut g = rng::stream(seed, "projection/waist", t as u64);
        let x = uniform_sphere(&mut g, cfg.k);
        let w = lift_waist(&body, &p, &x)?;
        let gv = Vector::from_vec(w.g.clone());
        let f = Vector::from_vec(w.f.clone());
        let residual = (p.coords(&gv) - &x).norm();
        // a point at angle uniform in [0, arcsin ε] from f(x)
        let tangent = {
            let r = uniform_sphere(&mut g, n);
            let t = &r - &f * f.dot(&r);
            let tn = t.norm();
            t / tn
        };
        let phi = theta * g.random::<f64>();
        let z = &f * phi.cos() + tangent * phi.sin();
        Ok((
            gv.norm(),
            residual,
            within(&body, &f, 0.0),
            within(&body, &z, cfg.eps),
            segment_cap_check(&f, &z, cfg.eps),
        ))
    })?;
    let mut table = TrialTable::new(&COLUMNS);
    for (t, r) in rows.iter().enumerate() {
        table.push(vec![t.into(), r.0.into(), r.1.into(), r.2.into(), r.3.into(), r.4.into()]);
    }
    let mut report = ExperimentReport::new("projection", echo(cfg), seed, table);
    report.checks.push(InequalityCheck::ge("waist_bound", lhs.estimate, bound, 4.0 * lhs.standard_error));
    if cfg.expect_equality {
        report.checks.push(InequalityCheck::eq("equality_case", lhs.estimate, equality, 4.0 * lhs.standard_error + 1e-12));
    }
    let count = |f: fn(&(f64, f64, bool, bool, bool)) -> bool| rows.iter().filter(|r| f(r)).count() as f64;
    report.checks.push(InequalityCheck::le("waist_outside_body", count(|r| !r.2), 0.0, 0.0));
    report.checks.push(InequalityCheck::le("neighbors_outside_eps", count(|r| !r.3), 0.0, 0.0));
    report.checks.push(InequalityCheck::le("interval_violations", count(|r| !r.4), 0.0, 0.0));
    report.checks.push(InequalityCheck::le("lift_norm_below_one", count(|r| r.0 < 1.0 - 1e-8), 0.0, 0.0));
    let s = &mut report.summary;
    s.estimates.insert("sphere_fraction".into(), lhs);
    s.values.insert("waist_lower_bound".into(), bound);
    s.values.insert("equality_case".into(), equality);
    s.values.insert("gap_to_equality".into(), lhs.estimate - equality);
    Ok(clock.finish(report))
}
