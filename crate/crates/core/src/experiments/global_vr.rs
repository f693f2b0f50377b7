use serde::{Deserialize, Serialize};

use super::{default_samples, default_trials, echo, positive, run_trials, Clock};
use crate::bodies::{construct_body, difference_body, mc_volume, scale_body, volume_ratio, BodySpec};
use crate::error::{Error, Result};
use crate::estimators::{diameter_of_intersection, section_diameter};
use crate::geometry::{Rotation, Subspace};
use crate::optimize::OptimizerConfig;
use crate::report::{ExperimentReport, InequalityCheck, Probability, Quantiles, TrialTable};
use crate::rng;
use crate::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalVrConfig {
    /// Convex body containing the unit ball; need not be symmetric.
    pub k_body: BodySpec,
    /// Symmetric body with a bounded `k`-section.
    pub l_body: BodySpec,
    pub k: usize,
    #[serde(default)]
    pub l_axes: Option<Vec<usize>>,
    #[serde(default = "one")]
    pub section_bound: f64,
    #[serde(default = "default_samples")]
    pub volume_samples: usize,
    /// `K'` is rescaled by its diameter on a random section of dimension
    /// `n − ⌈c·k⌉`, making that section of diameter 1.
    #[serde(default = "half")]
    pub c_section: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Success indicator `diam(K' ∩ UL) ≤ (2A)^{β·n/k}`.
    #[serde(default = "one")]
    pub beta_ref: f64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

impl GlobalVrConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.k_body.dim()?;
        if self.l_body.dim()? != n {
            return Err(Error::spec("l_body", "dimension differs from k_body"));
        }
        if !(1 <= self.k && self.k < n) {
            return Err(Error::spec("k", format!("need 1 ≤ k < n = {n}")));
        }
        positive("section_bound", self.section_bound)?;
        positive("c_section", self.c_section)?;
        positive("beta_ref", self.beta_ref)?;
        if self.volume_samples == 0 {
            return Err(Error::spec("volume_samples", "must be at least 1"));
        }
        self.optimizer.validate()
    }

    fn scaling_dim(&self, n: usize) -> usize {
        n.saturating_sub((self.c_section * self.k as f64).ceil() as usize).max(1)
    }
}

/// `C(2n, n)`.
pub(crate) fn central_binomial(n: usize) -> f64 {
    let nf = n as f64;
    (ln_gamma(2.0 * nf + 1.0) - 2.0 * ln_gamma(nf + 1.0)).exp().round()
}

const COLUMNS: [&str; 6] = ["trial", "n", "k", "diameter", "success", "scaled_diameter"];

/// Volume ratio `A` of `K`, the difference body `K' = K − K` with its
/// volume bound `|K'| ≤ C(2n,n)|K|`, and diameters of `K' ∩ UL` (which
/// contains `K ∩ UL`) against `(2A)^{n/k}`.
pub fn run_global_vr(cfg: &GlobalVrConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let k = construct_body(&cfg.k_body)?;
    let l = construct_body(&cfg.l_body)?;
    let n = k.dim();
    let opt = &cfg.optimizer;

    let axes = cfg.l_axes.clone().unwrap_or_else(|| (0..cfg.k).collect());
    let l_section = section_diameter(&l, &Subspace::coordinate(n, &axes)?, opt)?;
    if l_section.diameter > cfg.section_bound * (1.0 + 1e-9) {
        return Err(Error::Hypothesis {
            detail: format!("declared section of L has diameter {} > {}", l_section.diameter, cfg.section_bound),
            witness: Some(l_section.direction),
        });
    }

    let vr = volume_ratio(&k, cfg.volume_samples, rng::derive_seed(seed, "global_vr/volume_k", 0))?;
    let kd = difference_body(&k)?;
    let vol_kd = mc_volume(&kd, cfg.volume_samples, rng::derive_seed(seed, "global_vr/volume_kd", 0))?;
    let (vk, sk) = (vr.volume.estimate, vr.volume.standard_error);
    let rs_ratio = vol_kd.estimate / vk;
    let rs_se = rs_ratio * ((vol_kd.standard_error / vol_kd.estimate).powi(2) + (sk / vk).powi(2)).sqrt();
    let binom = central_binomial(n);

    // scale K' so that a random section of dimension n − ⌈ck⌉ has diameter 1
    let mut g = rng::stream(seed, "global_vr/section", 0);
    let e = Subspace::random(&mut g, n, cfg.scaling_dim(n))?;
    let m = section_diameter(&kd, &e, opt)?.diameter;
    let scaled = scale_body(&kd, 1.0 / m)?;

    let two_a = 2.0 * vr.ratio;
    let threshold = two_a.powf(cfg.beta_ref * n as f64 / cfg.k as f64);
    let rows = run_trials(cfg.trials, |t| {
        let mut g = rng::stream(seed, "global_vr/rotation", t as u64);
        let u = Rotation::haar(&mut g, n);
        let opt = OptimizerConfig { seed: rng::derive_seed(seed, "global_vr/optimizer", t as u64), ..opt.clone() };
        let d = diameter_of_intersection(&kd, &l, &u, &opt)?;
        let s = diameter_of_intersection(&scaled, &l, &u, &opt)?;
        Ok((d.diameter, s.diameter))
    })?;
    let mut table = TrialTable::new(&COLUMNS);
    for (t, r) in rows.iter().enumerate() {
        table.push(vec![t.into(), n.into(), cfg.k.into(), r.0.into(), (r.0 <= threshold).into(), r.1.into()]);
    }
    let mut report = ExperimentReport::new("global-vr", echo(cfg), seed, table);
    report.checks.push(InequalityCheck::le("rogers_shephard", rs_ratio, binom, 3.0 * rs_se));
    let s = &mut report.summary;
    s.values.insert("volume_ratio".into(), vr.ratio);
    s.values.insert("volume_ratio_se".into(), vr.standard_error);
    s.values.insert("difference_volume_ratio".into(), rs_ratio);
    s.values.insert("difference_volume_ratio_se".into(), rs_se);
    s.values.insert("central_binomial".into(), binom);
    s.values.insert("section_scale".into(), m);
    s.values.insert("l_section_diameter".into(), l_section.diameter);
    s.values.insert("threshold".into(), threshold);
    s.estimates.insert("volume_k".into(), vr.volume);
    s.estimates.insert("volume_difference".into(), vol_kd);
    let diam: Vec<f64> = rows.iter().map(|r| r.0).collect();
    if let Some(q) = Quantiles::of(&diam) {
        // smallest β with every observed diameter ≤ (2A)^{β n/k}
        if two_a > 1.0 {
            s.fitted.insert("beta".into(), q.max.ln() / (n as f64 / cfg.k as f64 * two_a.ln()));
        }
        s.quantiles.insert("diameter".into(), q);
        s.probabilities.insert("success".into(), Probability::from_flags(diam.iter().map(|&d| d <= threshold)));
    }
    if let Some(q) = Quantiles::of(&rows.iter().map(|r| r.1).collect::<Vec<_>>()) {
        s.quantiles.insert("scaled_diameter".into(), q);
    }
    Ok(clock.finish(report))
}
