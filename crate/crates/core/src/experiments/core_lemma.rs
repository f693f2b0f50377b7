use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_samples, default_trials, echo, run_trials, Clock};
use crate::bodies::{construct_body, neighborhood, Body, BodySpec};
use crate::error::{Error, Result};
use crate::estimators::{inclusion_radius, mc_sigma_body, within, CoverParams};
use crate::geometry::Rotation;
use crate::optimize::OptimizerConfig;
use crate::report::{ExperimentReport, InequalityCheck, Probability, TrialTable};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreLemmaConfig {
    pub k_body: BodySpec,
    pub l_body: BodySpec,
    pub delta_k: f64,
    pub delta_l: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Samples for the sphere fraction of `K + δ_K D`.
    #[serde(default = "default_samples")]
    pub sigma_samples: usize,
    #[serde(default)]
    pub cover: CoverParams,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl CoreLemmaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_k >= 0.0 && self.delta_l >= 0.0) {
            return Err(Error::spec("delta_k", "deltas must be nonnegative"));
        }
        if !(self.delta_k + self.delta_l < 1.0) {
            return Err(Error::spec("delta_l", "need delta_k + delta_l < 1"));
        }
        if self.sigma_samples == 0 {
            return Err(Error::spec("sigma_samples", "must be at least 1"));
        }
        if self.k_body.dim()? != self.l_body.dim()? {
            return Err(Error::spec("l_body", "dimension differs from k_body"));
        }
        self.optimizer.validate()
    }
}

/// Unit vectors `z` with `D ⊆ ∪ (z + L + δ_L D)` on probes of the ball: the
/// axes, `params.probes` sphere points, as many interior points and the
/// origin. Each uncovered probe `p` of largest norm is covered by some
/// `z = p − t·w` with `|z| = 1` and `t·w` inside `L + δ_L D`.
pub fn sphere_centered_cover(l: &Body, delta_l: f64, params: &CoverParams) -> Result<Vec<Vector>> {
    let lb = neighborhood(l, delta_l)?;
    let n = l.dim();
    let mut g = rng::stream(params.seed, "core_cover_probes", 0);
    let mut probes: Vec<Vector> = (0..2 * n)
        .map(|i| {
            let mut e = Vector::zeros(n);
            e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
            e
        })
        .collect();
    probes.extend((0..params.probes).map(|_| uniform_sphere(&mut g, n)));
    probes.extend((0..params.probes).map(|_| rng::uniform_ball(&mut g, n, 1.0)));
    probes.push(Vector::zeros(n));

    let mut uncovered: Vec<usize> = (0..probes.len()).collect();
    let mut centers = Vec::new();
    let mut cg = rng::stream(params.seed, "core_cover_candidates", 0);
    while !uncovered.is_empty() {
        if centers.len() >= params.max_translates {
            return Err(Error::IterationCap(format!("cover needed more than {} translates", params.max_translates)));
        }
        let &pi = uncovered
            .iter()
            .max_by(|&&a, &&b| probes[a].norm().total_cmp(&probes[b].norm()).then(b.cmp(&a)))
            .expect("nonempty");
        let p = &probes[pi];
        let pn = p.norm();
        let mut dirs = Vec::with_capacity(params.candidates + 1);
        if pn > 0.0 {
            dirs.push(p / pn);
        }
        dirs.extend((0..params.candidates).map(|_| uniform_sphere(&mut cg, n)));
        let mut cands = Vec::new();
        for w in &dirs {
            // |p − t w| = 1  ⇔  t = ⟨p,w⟩ ± √(⟨p,w⟩² + 1 − |p|²)
            let b = p.dot(w);
            let root = (b * b + 1.0 - pn * pn).max(0.0).sqrt();
            for t in [b + root, b - root] {
                let reach = if t >= 0.0 { lb.radial(w) } else { lb.radial(&-w) };
                if t.abs() <= reach {
                    let z = p - w * t;
                    let zn = z.norm();
                    if zn > 0.0 {
                        cands.push(z / zn);
                    }
                }
            }
        }
        // keep only candidates that really cover p
        cands.retain(|z| lb.contains(&(p - z)));
        if cands.is_empty() {
            return Err(Error::Hypothesis {
                detail: "no unit translate of L + δ_L D covers this point of the ball".into(),
                witness: Some(p.iter().copied().collect()),
            });
        }
        let counts: Vec<usize> = cands
            .par_iter()
            .map(|z| uncovered.iter().filter(|&&i| lb.contains(&(&probes[i] - z))).count())
            .collect();
        let best = (0..cands.len()).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).expect("nonempty");
        let z = cands.swap_remove(best);
        uncovered.retain(|&i| !lb.contains(&(&probes[i] - &z)));
        centers.push(z);
    }
    Ok(centers)
}

const COLUMNS: [&str; 7] = ["trial", "n", "net_ok", "inclusion_radius", "lower_bracket", "target", "success"];

/// Empirical failure rate of `(1 − δ_K − δ_L)D ⊆ K + UL` over Haar `U`,
/// against the bound `N·σ` with `1 − σ = σ_{n−1}(K + δ_K D)`.
pub fn run_core_lemma(cfg: &CoreLemmaConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let mut report = ExperimentReport::new("core", echo(cfg), seed, TrialTable::new(&COLUMNS));
    if cfg.trials == 0 {
        return Ok(clock.finish(report));
    }
    let k = construct_body(&cfg.k_body)?;
    let l = construct_body(&cfg.l_body)?;
    let n = k.dim();
    let cover = CoverParams { seed: rng::derive_seed(seed, "core/cover", 0), ..cfg.cover.clone() };
    let net = sphere_centered_cover(&l, cfg.delta_l, &cover)?;
    let hit = mc_sigma_body(&k, cfg.delta_k, cfg.sigma_samples, rng::derive_seed(seed, "core/sigma", 0))?;
    let sigma = 1.0 - hit.estimate;
    let big_n = net.len() as f64;
    let target = 1.0 - cfg.delta_k - cfg.delta_l;

    let rows = run_trials(cfg.trials, |t| {
        let mut g = rng::stream(seed, "core/rotation", t as u64);
        let u = Rotation::haar(&mut g, n);
        let net_ok = net.iter().all(|z| within(&k, &u.apply(z), cfg.delta_k));
        let opt = OptimizerConfig { seed: rng::derive_seed(seed, "core/optimizer", t as u64), ..cfg.optimizer.clone() };
        let r = inclusion_radius(&k, &l, &u, &opt)?;
        Ok((net_ok, r.radius, r.lower_bracket.unwrap_or(f64::NEG_INFINITY)))
    })?;
    for (t, &(net_ok, r, lo)) in rows.iter().enumerate() {
        report.trials.push(vec![
            t.into(),
            n.into(),
            net_ok.into(),
            r.into(),
            lo.into(),
            target.into(),
            (r >= target - 1e-9).into(),
        ]);
    }
    let fail = Probability::from_flags(rows.iter().map(|r| r.1 < target - 1e-9));
    let net_fail = Probability::from_flags(rows.iter().map(|r| !r.0));
    let bound = big_n * sigma;
    let s = &mut report.summary;
    s.values.insert("net_size".into(), big_n);
    s.values.insert("sigma".into(), sigma);
    s.values.insert("failure_bound".into(), bound);
    s.values.insert("target_radius".into(), target);
    s.estimates.insert("sphere_fraction_k_delta".into(), hit);
    for (name, p) in [("inclusion_failure", &fail), ("net_failure", &net_fail)] {
        let slack = 3.0 * (p.standard_error.powi(2) + (big_n * hit.standard_error).powi(2)).sqrt();
        report.checks.push(InequalityCheck::le(format!("{name}_rate"), p.estimate, bound, slack));
    }
    // the net event forces the inclusion
    let broken = rows.iter().filter(|r| r.0 && r.1 < target - 1e-6).count();
    report.checks.push(InequalityCheck::le("net_ok_without_inclusion", broken as f64, 0.0, 0.0));
    let s = &mut report.summary;
    s.probabilities.insert("inclusion_failure".into(), fail);
    s.probabilities.insert("net_failure".into(), net_fail);
    Ok(clock.finish(report))
}
