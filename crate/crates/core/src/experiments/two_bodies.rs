use serde::{Deserialize, Serialize};

use super::{default_section_bound, default_trials, echo, positive, run_trials, Clock, ScheduleConfig};
use crate::bodies::{construct_body, polar, Body, BodySpec};
use crate::error::{Error, Result};
use crate::estimators::{diameter_of_intersection, hull_inclusion_radius, inclusion_radius, section_diameter};
use crate::experiments::theorem_schedule;
use crate::geometry::{verify_projection_hypothesis, Rotation, Subspace};
use crate::optimize::OptimizerConfig;
use crate::report::{ExperimentReport, InequalityCheck, Probability, Quantiles, TrialTable};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Diameters of `K ∩ UL` for bodies with bounded sections.
    Primal,
    /// Inradii of `K + UL` and `conv(K ∪ UL)` for bodies whose projections
    /// contain the ball; the diameter column is `diam(K° ∩ UL°)`.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodiesConfig {
    Explicit {
        k_body: BodySpec,
        l_body: BodySpec,
        /// Axes spanning the declared bounded section (or projection) of
        /// `K`; defaults to the first `k`.
        #[serde(default)]
        k_axes: Option<Vec<usize>>,
        /// Same for `L`, of dimension `n − ⌈ak⌉` by default.
        #[serde(default)]
        l_axes: Option<Vec<usize>>,
    },
    /// `K = rB^k × R^{n−k}` and `L = rB^{n−m} × R^m` with `m = ⌈ak⌉`,
    /// truncated at `truncation`.
    Cylinder {
        #[serde(default = "half")]
        core_radius: f64,
        #[serde(default = "big")]
        truncation: f64,
    },
}

fn half() -> f64 {
    0.5
}
fn big() -> f64 {
    crate::bodies::DEFAULT_TRUNCATION
}
fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBodiesConfig {
    pub n: usize,
    pub k: usize,
    pub bodies: BodiesConfig,
    /// Further `(n, k)` pairs, allowed with the cylinder construction only.
    #[serde(default)]
    pub sweep: Vec<Dims>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Reference constant of the success indicator `diam ≤ c_ref^{n/k}`.
    #[serde(default = "two")]
    pub c_ref: f64,
    /// Bound on the declared section diameters; `null` records them only.
    #[serde(default = "default_section_bound")]
    pub section_bound: Option<f64>,
    #[serde(default)]
    pub a_frac: Option<f64>,
    /// When present the full parameter schedule is evaluated first.
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default = "default_probes")]
    pub hypothesis_probes: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn default_mode() -> Mode {
    Mode::Primal
}
fn default_probes() -> usize {
    10_000
}

impl TwoBodiesConfig {
    pub fn dims(&self) -> Vec<Dims> {
        let mut d = vec![Dims { n: self.n, k: self.k }];
        d.extend(self.sweep.iter().copied());
        d
    }

    fn a_frac(&self) -> f64 {
        self.a_frac
            .or(self.schedule.map(|s| s.a_frac))
            .unwrap_or(crate::measure::BoundConstants::default().a_frac)
    }

    /// Codimension `⌈ak⌉` of the bounded section of `L`, at least 1.
    pub fn l_codim(&self, k: usize) -> usize {
        ((self.a_frac() * k as f64 - 1e-12).ceil() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        for d in self.dims() {
            if !(1 <= d.k && d.k < d.n) {
                return Err(Error::spec("k", format!("need 1 ≤ k < n, got n={}, k={}", d.n, d.k)));
            }
            if self.l_codim(d.k) >= d.n {
                return Err(Error::spec("a_frac", "section of L would be empty"));
            }
            if let Some(s) = &self.schedule {
                theorem_schedule(d.n, d.k, &s.constants())?;
            }
        }
        if !self.sweep.is_empty() && matches!(self.bodies, BodiesConfig::Explicit { .. }) {
            return Err(Error::spec("sweep", "needs the cylinder construction"));
        }
        if let Some(a) = self.a_frac {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::spec("a_frac", "must lie in (0, 1)"));
            }
        }
        positive("c_ref", self.c_ref)?;
        if let Some(b) = self.section_bound {
            positive("section_bound", b)?;
        }
        if let BodiesConfig::Cylinder { core_radius, truncation } = self.bodies {
            positive("core_radius", core_radius)?;
            positive("truncation", truncation)?;
            if self.mode == Mode::Dual {
                return Err(Error::spec("mode", "dual mode needs explicit bodies"));
            }
        }
        self.optimizer.validate()
    }

    /// The bodies and declared subspaces at `(n, k)`.
    pub fn build(&self, d: Dims) -> Result<(Body, Body, Subspace, Subspace)> {
        let m = self.l_codim(d.k);
        let (k_body, l_body, k_axes, l_axes) = match &self.bodies {
            BodiesConfig::Explicit { k_body, l_body, k_axes, l_axes } => (
                construct_body(k_body)?,
                construct_body(l_body)?,
                k_axes.clone().unwrap_or_else(|| (0..d.k).collect()),
                l_axes.clone().unwrap_or_else(|| (0..d.n - m).collect()),
            ),
            BodiesConfig::Cylinder { core_radius, truncation } => {
                let cyl = |core: usize| BodySpec::TruncatedCylinder {
                    core: Box::new(BodySpec::Ball { dim: core, radius: *core_radius }),
                    extra_dim: d.n - core,
                    transverse_radius: None,
                    truncation: *truncation,
                };
                (
                    construct_body(&cyl(d.k))?,
                    construct_body(&cyl(d.n - m))?,
                    (0..d.k).collect(),
                    (0..d.n - m).collect(),
                )
            }
        };
        for (name, b) in [("k_body", &k_body), ("l_body", &l_body)] {
            if b.dim() != d.n {
                return Err(Error::spec(name, format!("dimension {} differs from n = {}", b.dim(), d.n)));
            }
        }
        Ok((k_body, l_body, Subspace::coordinate(d.n, &k_axes)?, Subspace::coordinate(d.n, &l_axes)?))
    }
}

struct Trial {
    diameter: f64,
    upper: f64,
    truncated: bool,
    inclusion: f64,
    hull: f64,
    polar_diameter: f64,
}

const COLUMNS: [&str; 10] = [
    "trial",
    "n",
    "k",
    "diameter",
    "success",
    "upper_bracket",
    "truncated",
    "inclusion_radius",
    "hull_radius",
    "polar_diameter",
];

/// Per-trial diameters of `K ∩ UL` (primal) or inradii of `K + UL` (dual)
/// over Haar rotations, for every `(n, k)` of the configuration.
pub fn run_two_bodies(cfg: &TwoBodiesConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let mut table = TrialTable::new(&COLUMNS);
    let mut report = ExperimentReport::new("two-bodies", echo(cfg), seed, TrialTable::default());
    let mut offset = 0usize;
    for d in cfg.dims() {
        let (kb, lb, ek, el) = cfg.build(d)?;
        let tag = format!("n{}_k{}", d.n, d.k);
        let hyp_seed = rng::derive_seed(seed, "two_bodies/hypothesis", d.n as u64);
        let opt = &cfg.optimizer;
        if let Some(s) = &cfg.schedule {
            let p = theorem_schedule(d.n, d.k, &s.constants())?;
            report.summary.values.insert(format!("schedule_guaranteed_radius_{tag}"), p.guaranteed_radius);
            report.summary.values.insert(format!("schedule_delta_k_{tag}"), p.delta_k);
            report.summary.values.insert(format!("schedule_delta_l_{tag}"), p.delta_l);
        }
        let polars = match cfg.mode {
            Mode::Primal => {
                for (name, body, e) in [("K", &kb, &ek), ("L", &lb, &el)] {
                    let s = section_diameter(body, e, opt)?;
                    report.summary.values.insert(format!("section_diameter_{name}_{tag}"), s.diameter);
                    if let Some(bound) = cfg.section_bound {
                        if s.diameter > bound * (1.0 + 1e-9) {
                            return Err(Error::Hypothesis {
                                detail: format!(
                                    "declared section of {name} has diameter {} > {bound}",
                                    s.diameter
                                ),
                                witness: Some(s.direction),
                            });
                        }
                    }
                }
                None
            }
            Mode::Dual => {
                verify_projection_hypothesis(&kb, &ek, cfg.hypothesis_probes, hyp_seed)?;
                verify_projection_hypothesis(&lb, &el, cfg.hypothesis_probes, hyp_seed ^ 1)?;
                Some((polar(&kb)?, polar(&lb)?))
            }
        };
        let trials = run_trials(cfg.trials, |t| {
            let idx = (offset + t) as u64;
            let mut g = rng::stream(seed, "two_bodies/rotation", idx);
            let u = Rotation::haar(&mut g, d.n);
            let opt = OptimizerConfig { seed: rng::derive_seed(seed, "two_bodies/optimizer", idx), ..opt.clone() };
            match &polars {
                None => {
                    let r = diameter_of_intersection(&kb, &lb, &u, &opt)?;
                    Ok(Trial {
                        diameter: r.diameter,
                        upper: r.upper_bracket.unwrap_or(f64::INFINITY),
                        truncated: r.truncation_active,
                        inclusion: f64::NAN,
                        hull: f64::NAN,
                        polar_diameter: f64::NAN,
                    })
                }
                Some((kp, lp)) => {
                    let inc = inclusion_radius(&kb, &lb, &u, &opt)?;
                    let hull = hull_inclusion_radius(&kb, &lb, &u, &opt)?;
                    let pd = diameter_of_intersection(kp, lp, &u, &opt)?;
                    Ok(Trial {
                        diameter: 2.0 / hull.radius,
                        upper: hull.lower_bracket.map_or(f64::INFINITY, |b| 2.0 / b),
                        truncated: pd.truncation_active,
                        inclusion: inc.radius,
                        hull: hull.radius,
                        polar_diameter: pd.diameter,
                    })
                }
            }
        })?;
        let threshold = cfg.c_ref.powf(d.n as f64 / d.k as f64);
        for (t, r) in trials.iter().enumerate() {
            table.push(vec![
                (offset + t).into(),
                d.n.into(),
                d.k.into(),
                r.diameter.into(),
                (r.diameter <= threshold).into(),
                r.upper.into(),
                r.truncated.into(),
                r.inclusion.into(),
                r.hull.into(),
                r.polar_diameter.into(),
            ]);
        }
        offset += trials.len();
        summarize(&mut report, &trials, d, threshold, cfg.mode, &tag);
    }
    report.trials = table;
    Ok(clock.finish(report))
}

fn summarize(report: &mut ExperimentReport, trials: &[Trial], d: Dims, threshold: f64, mode: Mode, tag: &str) {
    let diam: Vec<f64> = trials.iter().map(|t| t.diameter).collect();
    let Some(q) = Quantiles::of(&diam) else { return };
    let s = &mut report.summary;
    let ratio = d.k as f64 / d.n as f64;
    s.fitted.insert(format!("c_fit_{tag}"), q.max.powf(ratio));
    s.fitted.insert(format!("c_fit_q95_{tag}"), q.q95.powf(ratio));
    s.values.insert(format!("threshold_{tag}"), threshold);
    s.quantiles.insert(format!("diameter_{tag}"), q);
    s.probabilities
        .insert(format!("success_{tag}"), Probability::from_flags(diam.iter().map(|&x| x <= threshold)));
    s.probabilities
        .insert(format!("truncated_{tag}"), Probability::from_flags(trials.iter().map(|t| t.truncated)));
    let truncated = trials.iter().filter(|t| t.truncated).count();
    report.checks.push(InequalityCheck::le(format!("truncated_trials_{tag}"), truncated as f64, 0.0, 0.0));
    if mode == Mode::Dual {
        // diam(K° ∩ UL°)·r(conv(K ∪ UL)) = 2 exactly; with the sum K + UL the
        // product only lies in [2, 4].
        let hull: Vec<f64> = trials.iter().map(|t| (t.polar_diameter * t.hull / 2.0 - 1.0).abs()).collect();
        let worst = hull.iter().copied().fold(0.0, f64::max);
        report.checks.push(InequalityCheck::le(format!("duality_hull_{tag}"), worst, 0.0, 1e-4));
        let lit: Vec<f64> = trials.iter().map(|t| t.polar_diameter * t.inclusion).collect();
        let lq = Quantiles::of(&lit).expect("nonempty");
        report.checks.push(InequalityCheck::ge(format!("duality_sum_lower_{tag}"), lq.min, 2.0, 2e-4));
        report.checks.push(InequalityCheck::le(format!("duality_sum_upper_{tag}"), lq.max, 4.0, 4e-4));
        report.summary.quantiles.insert(format!("duality_sum_product_{tag}"), lq);
    }
}
