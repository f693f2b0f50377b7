//! The invariant suite behind `waistlab verify`: fast, self-contained
//! checks of every module against closed forms and independent routes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

use serde::Serialize;

use crate::bodies::{construct_body, polar, BodySpec};
use crate::error::Result;
use crate::estimators::{
    covering_number_upper, diameter_of_intersection, entropy_bound, hull_inclusion_radius, mc_sigma_body,
    CoverParams,
};
use crate::experiments::{run_higher_sphere, HigherSphereConfig, SetSpec};
use crate::geometry::{build_net, haar_rotation, segment_cap_check};
use crate::measure::{
    cap_angles, cap_bounds, chisq_cdf, gaussian_fact_check, lip_bounds, sigma_exact, sigma_lip_lower, sigma_mc,
    BoundConstants, SubsphereQuery,
};
use crate::optimize::OptimizerConfig;
use crate::rng::{self, uniform_sphere};
use crate::{Body, Vector};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn(u64) -> Result<(bool, String)>);

fn sigma(m: usize, j: usize, t: f64) -> Result<f64> {
    Ok(sigma_exact(&SubsphereQuery::new(m, j, t)?))
}

fn thetas() -> Vec<f64> {
    (1..=20).map(|i| FRAC_PI_2 * i as f64 / 20.0).collect()
}

fn anchors(_: u64) -> Result<(bool, String)> {
    let a = sigma(2, 1, FRAC_PI_6)?;
    let b = sigma(1, 0, FRAC_PI_4)?;
    let c = sigma(3, 1, 0.5f64.asin())?;
    let d = chisq_cdf(2, 2.0)?;
    let ok = (a - 0.5).abs() <= 1e-12
        && (b - 0.5).abs() <= 1e-12
        && (c - 0.25).abs() <= 1e-12
        && (d - (1.0 - (-1.0f64).exp())).abs() <= 1e-12;
    Ok((ok, format!("σ₂,₁(π/6)={a}, σ₁,₀(π/4)={b}, σ₃,₁(asin ½)={c}, P(χ²₂≤2)={d}")))
}

fn complement(_: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for m in 2..=60 {
        for j in 0..m {
            for &t in &thetas() {
                if t >= FRAC_PI_2 {
                    continue;
                }
                let s = sigma(m, j, t)? + sigma(m, m - j - 1, FRAC_PI_2 - t)?;
                worst = worst.max((s - 1.0).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |σ + σ' − 1| = {worst:.3e}")))
}

fn monotone(_: u64) -> Result<(bool, String)> {
    let mut bad = 0;
    for m in 2..=30 {
        for j in 0..m {
            let mut prev = 0.0;
            for &t in &thetas() {
                let s = sigma(m, j, t)?;
                bad += (s < prev - 1e-15) as usize;
                prev = s;
                if j + 1 < m {
                    bad += (sigma(m, j + 1, t)? < s - 1e-15) as usize;
                }
                if j < m {
                    bad += (sigma(m + 1, j, t)? > s + 1e-15) as usize;
                }
            }
        }
    }
    Ok((bad == 0, format!("{bad} monotonicity violations in θ, j and m")))
}

fn cap_lemma(_: u64) -> Result<(bool, String)> {
    let c = BoundConstants::default();
    let (mut bad, mut points) = (0, 0);
    for k in 2..=20 {
        for n in (k + 1)..=100 {
            for i in 0..13 {
                let eps = 0.01 + 0.04 * i as f64;
                let (direct, compl) = cap_angles(n, k, eps);
                let s = sigma(n - 1, n - k - 1, direct)?;
                let sc = sigma(n - 1, k - 1, compl)?;
                let b = cap_bounds(n, k, eps, &c)?;
                let l = lip_bounds(n, k, eps, &c)?;
                points += 1;
                bad += !(b.lower <= s && s <= b.upper) as usize;
                bad += !(b.lower_compl <= sc && sc <= b.upper_compl) as usize;
                bad += (l.bound_ii > sigma_lip_lower(n - 1, k - 1, compl)?) as usize;
                if k + 2 <= n {
                    let lip = sigma_lip_lower(n - 1, n - k - 1, direct)?;
                    bad += (l.bound_i > lip) as usize;
                    bad += (lip > s) as usize;
                }
            }
        }
    }
    Ok((bad == 0, format!("{bad} violations over {points} grid points at c={}, C={}", c.c_small, c.c_big)))
}

fn gaussian_facts(_: u64) -> Result<(bool, String)> {
    let c = BoundConstants::default();
    let mut bad = 0;
    for k in 1..=20 {
        for m in [2.0, 3.0, 4.0] {
            for i in 1..=10 {
                let r = gaussian_fact_check(k, m, 0.05 * i as f64, &c)?;
                bad += !(r.tail_ok() && r.smallball_ok()) as usize;
            }
        }
    }
    Ok((bad == 0, format!("{bad} failing (k, M, ε) points")))
}

fn sigma_monte_carlo(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (i, &(m, j, t)) in [(2, 1, 0.3), (5, 2, 0.7), (9, 0, 1.1), (12, 6, 0.4), (20, 10, 0.9)].iter().enumerate() {
        let q = SubsphereQuery::new(m, j, t)?;
        let e = sigma_mc(&q, 100_000, rng::derive_seed(seed, "verify/sigma_mc", i as u64))?;
        worst = worst.max(e.z_score(sigma_exact(&q)));
    }
    Ok((worst <= 4.0, format!("max |z| = {worst:.2}")))
}

fn haar(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=12 {
        let u = haar_rotation(n, seed + n as u64)?;
        worst = worst.max(u.residual());
        if u != haar_rotation(n, seed + n as u64)? {
            return Ok((false, format!("n={n}: not deterministic")));
        }
    }
    Ok((worst <= 1e-12, format!("max ‖UᵀU − I‖ = {worst:.3e}")))
}

fn nets(seed: u64) -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    for (n, delta) in [(3, 0.4), (5, 0.7)] {
        let net = build_net(n, delta, seed)?;
        let mut g = rng::stream(seed, "verify/net_probe", n as u64);
        let worst = (0..20_000).map(|_| net.nearest(&uniform_sphere(&mut g, n)).1).fold(0.0, f64::max);
        let vol = (1.0 + 2.0 / delta.sin()).powi(n as i32);
        ok &= worst <= delta && net.cardinality() as f64 <= vol;
        details.push(format!("n={n} δ={delta}: N={} worst probe {worst:.4}", net.cardinality()));
    }
    Ok((ok, details.join("; ")))
}

fn interval(seed: u64) -> Result<(bool, String)> {
    let mut g = rng::stream(seed, "verify/interval", 0);
    let mut bad = 0;
    for i in 0..20_000 {
        let n = 2 + i % 7;
        let y = uniform_sphere(&mut g, n);
        let eps = 0.02 + 0.96 * (i as f64 / 20_000.0);
        // z at angle just inside arcsin ε from y
        let w = uniform_sphere(&mut g, n);
        let t = &w - &y * y.dot(&w);
        let phi = eps.asin() * (1.0 - 1e-9) * ((i % 97) as f64 / 96.0);
        let z = &y * phi.cos() + t.normalize() * phi.sin();
        bad += !segment_cap_check(&y, &z, eps) as usize;
    }
    Ok((bad == 0, format!("{bad} violations in 20000 triples")))
}

fn claim(seed: u64) -> Result<(bool, String)> {
    let cfg = HigherSphereConfig {
        set: SetSpec::Random { pairs: 3, radius_min: 0.05, radius_max: 0.5 },
        n: 3,
        m: 6,
        theta: 0.35,
        samples: 100_000,
        claim_samples: 50_000,
    };
    let r = run_higher_sphere(&cfg, seed)?;
    let failed: Vec<_> = r.failed_checks().iter().map(|c| c.name.clone()).collect();
    Ok((failed.is_empty(), format!("failed: {failed:?}")))
}

fn catalog(n: usize) -> Vec<(&'static str, Body)> {
    let spec = |v: serde_json::Value| construct_body(&serde_json::from_value::<BodySpec>(v).unwrap()).unwrap();
    let axes: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * i as f64).collect();
    vec![
        ("ball", spec(serde_json::json!({"kind": "ball", "dim": n}))),
        ("cube", spec(serde_json::json!({"kind": "cube", "dim": n}))),
        ("cross_polytope", spec(serde_json::json!({"kind": "cross_polytope", "dim": n}))),
        ("ellipsoid", spec(serde_json::json!({"kind": "ellipsoid", "semiaxes": axes}))),
    ]
}

fn polar_duality(seed: u64) -> Result<(bool, String)> {
    let mut g = rng::stream(seed, "verify/polar", 0);
    let mut worst = 0.0f64;
    for (_, k) in catalog(4) {
        let kp = polar(&k)?;
        for _ in 0..200 {
            let u = uniform_sphere(&mut g, 4);
            worst = worst.max((kp.support(&u) - k.gauge(&u)).abs());
            worst = worst.max((kp.gauge(&u) - k.support(&u)).abs());
            worst = worst.max((k.radial(&u) * k.gauge(&u) - 1.0).abs());
        }
    }
    Ok((worst <= 1e-9, format!("max evaluator mismatch {worst:.3e}")))
}

fn hull_duality(seed: u64) -> Result<(bool, String)> {
    let cat = catalog(3);
    let opt = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for (i, (a, b)) in [(1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
        let (k, l) = (&cat[a].1, &cat[b].1);
        let u = haar_rotation(3, rng::derive_seed(seed, "verify/duality", i as u64))?;
        let d = diameter_of_intersection(&polar(k)?, &polar(l)?, &u, &opt)?.diameter;
        let h = hull_inclusion_radius(k, l, &u, &opt)?.radius;
        worst = worst.max((d * h / 2.0 - 1.0).abs());
    }
    Ok((worst <= 1e-4, format!("max |diam·r/2 − 1| = {worst:.3e}")))
}

fn entropy(seed: u64) -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    let d = construct_body(&BodySpec::Ball { dim: 3, radius: 1.0 })?;
    for (name, k) in catalog(3) {
        let s = mc_sigma_body(&k, 0.0, 50_000, rng::derive_seed(seed, "verify/entropy", 0))?;
        let cov = covering_number_upper(&d, &k, &CoverParams { probes: 4_000, ..Default::default() })?;
        let bound = entropy_bound(&k, (s.estimate - 3.0 * s.standard_error).max(1e-300))?;
        ok &= cov.count as f64 <= bound;
        details.push(format!("{name}: N={} ≤ {bound:.1}", cov.count));
    }
    Ok((ok, details.join("; ")))
}

fn waist_equality(seed: u64) -> Result<(bool, String)> {
    let k = construct_body(&BodySpec::SubspaceBall { dim: 5, k: 2, radius: 1.0 })?;
    let eps = 0.4;
    let e = mc_sigma_body(&k, eps, 100_000, seed)?;
    let exact = sigma(4, 1, f64::asin(eps))?;
    let z = e.z_score(exact);
    Ok((z <= 4.0, format!("MC {} vs exact {exact} (|z| = {z:.2})", e.estimate)))
}

fn support_consistency(seed: u64) -> Result<(bool, String)> {
    let mut g = rng::stream(seed, "verify/support", 0);
    let mut worst = 0.0f64;
    for (_, k) in catalog(5) {
        for _ in 0..200 {
            let u = uniform_sphere(&mut g, 5);
            let p = k.support_point(&u);
            worst = worst.max((p.dot(&u) - k.support(&u)).abs());
            worst = worst.max(k.distance(&p));
            let x: Vector = &u * k.radial(&u);
            worst = worst.max((k.gauge(&x) - 1.0).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max residual {worst:.3e}")))
}

pub const CHECKS: [Check; 15] = [
    ("measure/anchors", anchors),
    ("measure/complement_identity", complement),
    ("measure/monotonicity", monotone),
    ("measure/cap_lemma_and_waist_bounds", cap_lemma),
    ("measure/gaussian_facts", gaussian_facts),
    ("measure/monte_carlo_agreement", sigma_monte_carlo),
    ("bodies/support_gauge_radial", support_consistency),
    ("bodies/polar_evaluators", polar_duality),
    ("geometry/haar_orthogonality", haar),
    ("geometry/net_certification", nets),
    ("geometry/segment_cap_inclusion", interval),
    ("experiments/higher_sphere_and_claim", claim),
    ("estimators/waist_equality_case", waist_equality),
    ("estimators/entropy_lemma", entropy),
    ("estimators/hull_duality", hull_duality),
];

/// Runs every check; an evaluation error counts as a failure.
pub fn run_verify(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| match f(rng::derive_seed(seed, name, 0)) {
            Ok((passed, detail)) => CheckOutcome { name: name.to_string(), passed, detail },
            Err(e) => CheckOutcome { name: name.to_string(), passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn suite_passes() {
        let out = super::run_verify(0);
        let failed: Vec<_> = out.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
