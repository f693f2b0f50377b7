//! Sphere fractions of neighborhoods, covering numbers, diameters of
//! intersections and sections, and inradii of Minkowski sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{check_dim, Body, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::geometry::{Rotation, Subspace};
use crate::measure::{parallel_hits, McEstimate};
use crate::optimize::{maximize_on_sphere, minimize_on_sphere, OptimizerConfig};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

/// `σ_{n−1}((K + εD) ∩ S^{n−1})`: the fraction of uniform sphere points
/// within distance `eps` of `K`.
pub fn mc_sigma_body(k: &Body, eps: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    if !(eps >= 0.0) {
        return Err(Error::domain(format!("eps must be nonnegative, got {eps}")));
    }
    let n = k.dim();
    let hits = parallel_hits(samples, seed, "mc_sigma_body", |g| {
        let x = uniform_sphere(g, n);
        k.contains(&x) || k.distance(&x) <= eps
    });
    Ok(McEstimate::from_hits(hits, samples))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverParams {
    /// Interior probes of `L` (hit-or-miss) plus as many boundary probes.
    pub probes: usize,
    /// Random translation directions tried per added translate.
    pub candidates: usize,
    pub max_translates: usize,
    pub seed: u64,
}

impl Default for CoverParams {
    fn default() -> Self {
        Self { probes: 20_000, candidates: 24, max_translates: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverResult {
    /// Number of translates of `K` used; an upper bound on `N(L, K)` as far
    /// as the probes can tell.
    pub count: usize,
    pub probes: usize,
    /// Packing bound `|L + K/2| / |K/2|` when both are centered balls.
    pub volumetric_bound: Option<f64>,
    pub centers: Vec<Vec<f64>>,
}

fn cover_probes(l: &Body, params: &CoverParams) -> Result<Vec<Vector>> {
    let n = l.dim();
    let r = l.outer_radius();
    if !r.is_finite() {
        return Err(Error::Unbounded("covering an unbounded body".to_string()));
    }
    let mut g = rng::stream(params.seed, "cover_probes", 0);
    let mut probes = Vec::with_capacity(2 * params.probes + 2 * n);
    for i in 0..2 * n {
        let mut e = Vector::zeros(n);
        e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
        let rad = l.radial(&e);
        if rad.is_finite() {
            probes.push(e * rad);
        }
    }
    for _ in 0..params.probes {
        let u = uniform_sphere(&mut g, n);
        let rad = l.radial(&u);
        if rad.is_finite() {
            probes.push(u * rad);
        }
    }
    // interior probes by rejection from r_out·D
    let mut tries = 0usize;
    let mut interior = 0usize;
    while interior < params.probes && tries < 50 * params.probes {
        let x = rng::uniform_ball(&mut g, n, r);
        tries += 1;
        if l.contains(&x) {
            probes.push(x);
            interior += 1;
        }
    }
    probes.push(Vector::zeros(n));
    Ok(probes)
}

/// Greedy cover of `L` by translates `c + K`: repeatedly take the uncovered
/// probe `p` of largest norm and, among centers `p − r_K(w)·w` (`w` toward the
/// origin or random) and `p` itself, keep the one covering most probes.
pub fn covering_number_upper(l: &Body, k: &Body, params: &CoverParams) -> Result<CoverResult> {
    check_dim(l.dim(), k.dim())?;
    let n = l.dim();
    if !(k.inner_radius() > 0.0) && k.as_ball().is_none() {
        return Err(Error::Hypothesis { detail: "covering body needs an interior".to_string(), witness: None });
    }
    let probes = cover_probes(l, params)?;
    let mut uncovered: Vec<usize> = (0..probes.len()).collect();
    let mut centers: Vec<Vector> = Vec::new();
    let mut g = rng::stream(params.seed, "cover_candidates", 0);
    while !uncovered.is_empty() {
        if centers.len() >= params.max_translates {
            return Err(Error::IterationCap(format!(
                "covering needed more than {} translates",
                params.max_translates
            )));
        }
        let &pi = uncovered
            .iter()
            .max_by(|&&a, &&b| probes[a].norm().total_cmp(&probes[b].norm()).then(b.cmp(&a)))
            .expect("nonempty");
        let p = &probes[pi];
        let mut cands = vec![p.clone()];
        let pn = p.norm();
        let mut dirs = Vec::new();
        if pn > 0.0 {
            dirs.push(p / pn);
        }
        for _ in 0..params.candidates {
            dirs.push(uniform_sphere(&mut g, n));
        }
        for w in dirs {
            let rad = k.radial(&w);
            if rad.is_finite() {
                cands.push(p - &w * rad);
                cands.push(p - &w * (0.5 * rad));
            }
        }
        let counts: Vec<usize> = cands
            .par_iter()
            .map(|c| uncovered.iter().filter(|&&i| k.contains(&(&probes[i] - c))).count())
            .collect();
        let best = (0..cands.len())
            .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
            .expect("nonempty");
        let c = cands.swap_remove(best);
        uncovered.retain(|&i| !k.contains(&(&probes[i] - &c)));
        centers.push(c);
    }
    let volumetric_bound = match (l.as_ball(), k.as_ball()) {
        (Some(a), Some(b)) => Some(((a + 0.5 * b) / (0.5 * b)).powi(n as i32)),
        _ => None,
    };
    Ok(CoverResult {
        count: centers.len(),
        probes: probes.len(),
        volumetric_bound,
        centers: centers.iter().map(|c| c.iter().copied().collect()).collect(),
    })
}

/// `2ⁿ / σ`, the covering bound for `N(D, K)` in terms of the sphere
/// fraction `σ = σ_{n−1}(K)`.
pub fn entropy_bound(k: &Body, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::domain(format!("sphere fraction must lie in (0, 1], got {sigma}")));
    }
    Ok((k.dim() as f64 * std::f64::consts::LN_2 - sigma.ln()).exp())
}

/// Which side of the true value each number bounds.
#[derive(Debug, Clone, Serialize)]
pub struct DiameterResult {
    /// Attained value `2·max r`, hence a lower bound on the diameter.
    pub diameter: f64,
    /// `2·(max over net + κ·δ)` when the radial functions are `κ`-Lipschitz.
    pub upper_bracket: Option<f64>,
    pub direction: Vec<f64>,
    /// The maximizing radial reached a truncation radius, so the body is
    /// effectively unbounded in that direction.
    pub truncation_active: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionResult {
    /// Attained value of the minimized support sum, an upper bound on the
    /// largest `r` with `rD` inside the sum.
    pub radius: f64,
    /// `min over net − κ·δ`, a certified lower bound.
    pub lower_bracket: Option<f64>,
    pub direction: Vec<f64>,
    pub note: String,
}

/// Lipschitz constant of `u ↦ r_K(u)` on the sphere: `R²/r_in`.
fn radial_lipschitz(k: &Body) -> Option<f64> {
    let (r, big) = (k.inner_radius(), k.outer_radius());
    (r > 0.0 && big.is_finite()).then(|| big * big / r)
}

fn truncation_hit(bodies: &[&Body], radial: f64) -> bool {
    bodies
        .iter()
        .filter_map(|b| b.truncation())
        .any(|t| radial >= t * (1.0 - 1e-9))
}

fn require_symmetric(bodies: &[&Body]) -> Result<()> {
    for b in bodies {
        if !b.is_symmetric() {
            return Err(Error::Hypothesis {
                detail: "diameter via radial functions needs symmetric bodies".to_string(),
                witness: None,
            });
        }
    }
    Ok(())
}

fn require_exact_support(bodies: &[&Body]) -> Result<()> {
    if bodies.iter().all(|b| b.support_is_exact()) {
        Ok(())
    } else {
        Err(Error::Hypothesis { detail: "support evaluator is only an upper bound".to_string(), witness: None })
    }
}

/// `diam(K ∩ UL) = 2·max_u min(r_K(u), r_L(Uᵀu))` for symmetric bodies.
pub fn diameter_of_intersection(k: &Body, l: &Body, u: &Rotation, opt: &OptimizerConfig) -> Result<DiameterResult> {
    check_dim(k.dim(), l.dim())?;
    check_dim(k.dim(), u.dim())?;
    require_symmetric(&[k, l])?;
    let f = |x: &Vector| k.radial(x).min(l.radial(&u.apply_transpose(x)));
    let best = maximize_on_sphere(k.dim(), f, opt)?;
    let kappa = match (radial_lipschitz(k), radial_lipschitz(l)) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let truncation_active = truncation_hit(&[k, l], best.value);
    Ok(DiameterResult {
        diameter: 2.0 * best.value,
        upper_bracket: kappa
            .filter(|_| best.value.is_finite())
            .map(|kp| 2.0 * (best.net_value + kp * best.net_resolution).max(best.value)),
        direction: best.point.iter().copied().collect(),
        truncation_active,
        note: format!(
            "diameter is attained (lower bound); net of {} points at resolution {:.4}",
            best.net_points, best.net_resolution
        ),
    })
}

/// `max { r : rD ⊆ K + UL } = min_u h_K(u) + h_L(Uᵀu)`.
pub fn inclusion_radius(k: &Body, l: &Body, u: &Rotation, opt: &OptimizerConfig) -> Result<InclusionResult> {
    check_dim(k.dim(), l.dim())?;
    check_dim(k.dim(), u.dim())?;
    require_exact_support(&[k, l])?;
    let f = |x: &Vector| k.support(x) + l.support(&u.apply_transpose(x));
    let best = minimize_on_sphere(k.dim(), f, opt)?;
    let kappa = k.outer_radius() + l.outer_radius();
    Ok(InclusionResult {
        radius: best.value,
        lower_bracket: kappa
            .is_finite()
            .then(|| (best.net_value - kappa * best.net_resolution).min(best.value)),
        direction: best.point.iter().copied().collect(),
        note: "radius is attained (upper bound on the true minimum)".to_string(),
    })
}

/// `max { r : rD ⊆ conv(K ∪ UL) } = min_u max(h_K(u), h_L(Uᵀu))`, the
/// quantity polar to `diam(K° ∩ UL°)/2`.
pub fn hull_inclusion_radius(k: &Body, l: &Body, u: &Rotation, opt: &OptimizerConfig) -> Result<InclusionResult> {
    check_dim(k.dim(), l.dim())?;
    check_dim(k.dim(), u.dim())?;
    require_exact_support(&[k, l])?;
    let f = |x: &Vector| k.support(x).max(l.support(&u.apply_transpose(x)));
    let best = minimize_on_sphere(k.dim(), f, opt)?;
    let kappa = k.outer_radius().max(l.outer_radius());
    Ok(InclusionResult {
        radius: best.value,
        lower_bracket: kappa
            .is_finite()
            .then(|| (best.net_value - kappa * best.net_resolution).min(best.value)),
        direction: best.point.iter().copied().collect(),
        note: "radius is attained (upper bound on the true minimum)".to_string(),
    })
}

/// `diam(K ∩ E) = 2·max over unit u ∈ E of r_K(u)`.
pub fn section_diameter(k: &Body, e: &Subspace, opt: &OptimizerConfig) -> Result<DiameterResult> {
    check_dim(k.dim(), e.ambient_dim())?;
    require_symmetric(&[k])?;
    let f = |z: &Vector| k.radial(&e.embed(z));
    let best = maximize_on_sphere(e.dim(), f, opt)?;
    let truncation_active = truncation_hit(&[k], best.value);
    Ok(DiameterResult {
        diameter: 2.0 * best.value,
        upper_bracket: radial_lipschitz(k)
            .filter(|_| best.value.is_finite())
            .map(|kp| 2.0 * (best.net_value + kp * best.net_resolution).max(best.value)),
        direction: e.embed(&best.point).iter().copied().collect(),
        truncation_active,
        note: format!("diameter is attained (lower bound); section of dimension {}", e.dim()),
    })
}

/// Whether `x` lies within `eps` of `K` up to the membership tolerance.
pub fn within(k: &Body, x: &Vector, eps: f64) -> bool {
    k.contains(x) || k.distance(x) <= eps + MEMBERSHIP_TOL
}

#[cfg(test)]
mod tests;
