use serde::{Deserialize, Serialize};

use super::{default_trials, echo, positive, run_trials, Clock};
use crate::bodies::{construct_body, BodySpec};
use crate::error::{Error, Result};
use crate::estimators::section_diameter;
use crate::geometry::Subspace;
use crate::optimize::OptimizerConfig;
use crate::report::{ExperimentReport, InequalityCheck, Probability, Quantiles, TrialTable};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionsConfig {
    pub body: BodySpec,
    /// Dimension of the declared bounded section.
    pub k_exist: usize,
    /// Its spanning axes; the first `k_exist` by default.
    #[serde(default)]
    pub exist_axes: Option<Vec<usize>>,
    /// Bound on the declared section's diameter; `null` records it only.
    #[serde(default)]
    pub section_bound: Option<f64>,
    /// Dimensions of the random sections; one summary per entry.
    pub k_query: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Empirical `P{diam > t}` is reported for each threshold.
    #[serde(default)]
    pub thresholds: Vec<f64>,
    /// Success indicator `diam ≤ c_ref^{n/k_query}`.
    #[serde(default = "two")]
    pub c_ref: f64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn two() -> f64 {
    2.0
}

impl SectionsConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.body.dim()?;
        if !(1 <= self.k_exist && self.k_exist <= n) {
            return Err(Error::spec("k_exist", format!("need 1 ≤ k_exist ≤ {n}")));
        }
        if self.k_query.is_empty() {
            return Err(Error::spec("k_query", "need at least one dimension"));
        }
        for &k in &self.k_query {
            if !(1 <= k && k <= n) {
                return Err(Error::spec("k_query", format!("need 1 ≤ k ≤ {n}, got {k}")));
            }
        }
        if let Some(b) = self.section_bound {
            positive("section_bound", b)?;
        }
        positive("c_ref", self.c_ref)?;
        self.optimizer.validate()
    }
}

const COLUMNS: [&str; 7] = ["trial", "n", "k", "diameter", "success", "upper_bracket", "truncated"];

/// Section diameters of `K` along Haar-random subspaces of each requested
/// dimension, after verifying the declared bounded section.
pub fn run_sections(cfg: &SectionsConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let body = construct_body(&cfg.body)?;
    let n = body.dim();
    let axes = cfg.exist_axes.clone().unwrap_or_else(|| (0..cfg.k_exist).collect());
    if axes.len() != cfg.k_exist {
        return Err(Error::spec("exist_axes", "must list k_exist axes"));
    }
    let exist = section_diameter(&body, &Subspace::coordinate(n, &axes)?, &cfg.optimizer)?;
    if let Some(b) = cfg.section_bound {
        if exist.diameter > b * (1.0 + 1e-9) {
            return Err(Error::Hypothesis {
                detail: format!("declared section has diameter {} > {b}", exist.diameter),
                witness: Some(exist.direction),
            });
        }
    }
    let mut report = ExperimentReport::new("sections", echo(cfg), seed, TrialTable::new(&COLUMNS));
    report.summary.values.insert("existing_section_diameter".into(), exist.diameter);
    let (r_in, r_out) = (body.inner_radius(), body.outer_radius());
    let mut offset = 0;
    let mut medians = Vec::new();
    for &kq in &cfg.k_query {
        let rows = run_trials(cfg.trials, |t| {
            let idx = (offset + t) as u64;
            let mut g = rng::stream(seed, "sections/subspace", idx);
            let e = Subspace::random(&mut g, n, kq)?;
            let opt = OptimizerConfig {
                seed: rng::derive_seed(seed, "sections/optimizer", idx),
                ..cfg.optimizer.clone()
            };
            section_diameter(&body, &e, &opt)
        })?;
        let threshold = cfg.c_ref.powf(n as f64 / kq as f64);
        for (t, r) in rows.iter().enumerate() {
            report.trials.push(vec![
                (offset + t).into(),
                n.into(),
                kq.into(),
                r.diameter.into(),
                (r.diameter <= threshold).into(),
                r.upper_bracket.unwrap_or(f64::INFINITY).into(),
                r.truncation_active.into(),
            ]);
        }
        offset += rows.len();
        let diam: Vec<f64> = rows.iter().map(|r| r.diameter).collect();
        let Some(q) = Quantiles::of(&diam) else { continue };
        let tag = format!("k{kq}");
        let s = &mut report.summary;
        for &th in &cfg.thresholds {
            s.probabilities
                .insert(format!("exceeds_{th}_{tag}"), Probability::from_flags(diam.iter().map(|&d| d > th)));
        }
        s.probabilities
            .insert(format!("success_{tag}"), Probability::from_flags(diam.iter().map(|&d| d <= threshold)));
        s.fitted.insert(format!("c_fit_{tag}"), q.max.powf(kq as f64 / n as f64));
        // every section lies between the inscribed and circumscribed balls
        report.checks.push(InequalityCheck::ge(format!("min_diameter_{tag}"), q.min, 2.0 * r_in, 1e-9));
        if r_out.is_finite() {
            report.checks.push(InequalityCheck::le(format!("max_diameter_{tag}"), q.max, 2.0 * r_out, 1e-9));
        }
        medians.push((n as f64 / kq as f64, q.median));
        s.quantiles.insert(format!("diameter_{tag}"), q);
    }
    // trend data: median diameter against n/k
    medians.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = medians.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    report.summary.values.insert("median_nonincreasing_in_n_over_k".into(), monotone as u8 as f64);
    Ok(clock.finish(report))
}
