use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{default_samples, echo, Clock};
use crate::error::{Error, Result};
use crate::geometry::{Cap, CapUnion, SphereSet};
use crate::measure::{parallel_hits, sigma_exact, McEstimate, SubsphereQuery};
use crate::report::{ExperimentReport, InequalityCheck, TrialTable};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

/// A symmetric subset of `Sⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// The great subsphere `Sʲ` on the first `j + 1` axes.
    Subsphere { dim: usize },
    /// Explicit caps; the union must be symmetric.
    Caps { caps: Vec<Cap> },
    /// `pairs` antipodal cap pairs with random centers and radii, drawn
    /// from the run seed.
    Random { pairs: usize, radius_min: f64, radius_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HigherSphereConfig {
    pub set: SetSpec,
    /// Manifold dimension of the sphere carrying the set.
    pub n: usize,
    /// Manifold dimension of the larger sphere.
    pub m: usize,
    pub theta: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "claim_default")]
    pub claim_samples: usize,
}

fn claim_default() -> usize {
    100_000
}

impl HigherSphereConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.m < self.n {
            return Err(Error::spec("m", format!("need 1 ≤ n ≤ m, got n={}, m={}", self.n, self.m)));
        }
        if !(self.theta > 0.0 && self.theta <= FRAC_PI_2) {
            return Err(Error::spec("theta", "must lie in (0, π/2]"));
        }
        if self.samples == 0 {
            return Err(Error::spec("samples", "must be at least 1"));
        }
        match &self.set {
            SetSpec::Subsphere { dim } if *dim >= self.n => {
                Err(Error::spec("set.dim", format!("subsphere dimension must be below {}", self.n)))
            }
            SetSpec::Random { pairs, radius_min, radius_max } => {
                if *pairs == 0 || !(0.0 <= *radius_min && radius_min <= radius_max && *radius_max <= FRAC_PI_2) {
                    Err(Error::spec("set", "need pairs ≥ 1 and 0 ≤ radius_min ≤ radius_max ≤ π/2"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn build_set(&self, seed: u64) -> Result<SphereSet> {
        let amb = self.n + 1;
        let set = match &self.set {
            SetSpec::Subsphere { dim } => SphereSet::Subsphere { ambient: amb, subsphere_dim: *dim },
            SetSpec::Caps { caps } => SphereSet::Caps(CapUnion::new(caps)?),
            SetSpec::Random { pairs, radius_min, radius_max } => {
                let mut g = rng::stream(seed, "higher_sphere/set", 0);
                SphereSet::Caps(CapUnion::random_symmetric(&mut g, amb, *pairs, (*radius_min, *radius_max)))
            }
        };
        if set.ambient_dim() != amb {
            return Err(Error::spec("set", format!("caps must live in R^{amb}")));
        }
        if !set.is_symmetric() {
            return Err(Error::spec("set", "the set must be symmetric"));
        }
        Ok(set)
    }
}

/// Fraction of uniform points of `S^dim` within `theta` of the set.
fn neighborhood_fraction(set: &SphereSet, dim: usize, theta: f64, samples: usize, seed: u64) -> McEstimate {
    let hits = parallel_hits(samples, seed, "higher_sphere/side", |g| {
        let x = uniform_sphere(g, dim + 1);
        set.distance(&x).expect("dimension checked") <= theta
    });
    McEstimate::from_hits(hits, samples)
}

/// Compares `σ_n(A_θ)` with `σ_m(A_θ)` for `A ⊂ Sⁿ ⊂ Sᵐ` and checks
/// `d(x₁, A) ≤ d(x, A)` for the spherical projection `x₁` of `x ∈ Sᵐ`.
pub fn run_higher_sphere(cfg: &HigherSphereConfig, seed: u64) -> Result<ExperimentReport> {
    let clock = Clock::start();
    cfg.validate()?;
    let set = cfg.build_set(seed)?;
    let lhs = neighborhood_fraction(&set, cfg.n, cfg.theta, cfg.samples, rng::derive_seed(seed, "higher_sphere/n", 0));
    let rhs = neighborhood_fraction(&set, cfg.m, cfg.theta, cfg.samples, rng::derive_seed(seed, "higher_sphere/m", 0));
    let amb = cfg.n + 1;
    let violations = if cfg.m > cfg.n && cfg.claim_samples > 0 {
        parallel_hits(cfg.claim_samples, rng::derive_seed(seed, "higher_sphere/claim", 0), "claim", |g| {
            let x = uniform_sphere(g, cfg.m + 1);
            let head: Vector = x.rows(0, amb).into();
            let rho = head.norm();
            if rho == 0.0 {
                return false;
            }
            let x1 = head / rho;
            let d1 = set.distance(&x1).expect("dimension checked");
            let d = set.distance(&x).expect("dimension checked");
            d1 > d + 1e-12
        })
    } else {
        0
    };
    let exact = match cfg.set {
        SetSpec::Subsphere { dim } => Some((
            sigma_exact(&SubsphereQuery::new(cfg.n, dim, cfg.theta)?),
            sigma_exact(&SubsphereQuery::new(cfg.m, dim, cfg.theta)?),
        )),
        _ => None,
    };

    let mut table = TrialTable::new(&["sphere_dim", "estimate", "standard_error", "samples", "exact"]);
    for (dim, e, ex) in [(cfg.n, lhs, exact.map(|x| x.0)), (cfg.m, rhs, exact.map(|x| x.1))] {
        table.push(vec![dim.into(), e.estimate.into(), e.standard_error.into(), e.samples.into(), ex.unwrap_or(f64::NAN).into()]);
    }
    let mut report = ExperimentReport::new("higher-sphere", echo(cfg), seed, table);
    if let SphereSet::Caps(c) = &set {
        report.summary.values.insert("caps".into(), c.caps().len() as f64);
    }
    let se = (lhs.standard_error.powi(2) + rhs.standard_error.powi(2)).sqrt();
    report.checks.push(InequalityCheck::ge("lower_sphere_dominates", lhs.estimate, rhs.estimate, 4.0 * se));
    report.checks.push(InequalityCheck::le("claim_violations", violations as f64, 0.0, 0.0));
    if let Some((en, em)) = exact {
        report.checks.push(InequalityCheck::eq("exact_n", lhs.estimate, en, 4.0 * lhs.standard_error + 1e-12));
        report.checks.push(InequalityCheck::eq("exact_m", rhs.estimate, em, 4.0 * rhs.standard_error + 1e-12));
    }
    report.summary.estimates.insert("sigma_n".into(), lhs);
    report.summary.estimates.insert("sigma_m".into(), rhs);
    report.summary.values.insert("claim_samples".into(), cfg.claim_samples as f64);
    report.summary.values.insert("claim_violations".into(), violations as f64);
    Ok(clock.finish(report))
}
