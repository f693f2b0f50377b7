//! Multistart pattern search on the unit sphere.
//!
//! Seeds are the points of a certified net plus uniform random points; the
//! best seeds are refined by a derivative-free search along tangent
//! directions with geodesic steps. Reported optima are attained values, so a
//! maximum is always a lower bound and a minimum an upper bound on the true
//! optimum; the net resolution gives the other side when the objective has a
//! known Lipschitz constant.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cached_net, estimated_cardinality};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

/// Seed shared by all optimizer nets, so they are built once per process.
const NET_SEED: u64 = 0x6e65_7473;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Requested net resolution; coarsened until the net is small enough.
    pub net_delta: f64,
    pub max_net_points: usize,
    pub random_starts: usize,
    /// Number of best seeds refined.
    pub restarts: usize,
    /// Random tangent directions tried per sweep, besides the coordinate ones.
    pub random_directions: usize,
    pub min_step: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            net_delta: PI / 40.0,
            max_net_points: 2048,
            random_starts: 256,
            restarts: 50,
            random_directions: 4,
            min_step: 1e-10,
            max_sweeps: 4000,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.net_delta > 0.0 && self.net_delta < FRAC_PI_2) {
            return Err(Error::spec("net_delta", "must lie in (0, π/2)"));
        }
        if self.restarts == 0 {
            return Err(Error::spec("restarts", "must be at least 1"));
        }
        if !(self.min_step > 0.0) {
            return Err(Error::spec("min_step", "must be positive"));
        }
        Ok(())
    }

    /// Net resolution actually used in dimension `n`.
    pub fn effective_delta(&self, n: usize) -> f64 {
        let mut delta = self.net_delta;
        while delta < 1.2 && estimated_cardinality(n, delta) > self.max_net_points as f64 {
            delta = (delta * 1.25).min(1.2);
        }
        delta
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereOptimum {
    /// Best attained objective value.
    pub value: f64,
    #[serde(serialize_with = "crate::report::serialize_vector")]
    pub point: Vector,
    /// Best value over the net points alone.
    pub net_value: f64,
    /// Certified covering radius of the seed net.
    pub net_resolution: f64,
    pub net_points: usize,
    pub evaluations: usize,
}

/// Point at geodesic distance `s` from `x` along the unit tangent `d`.
fn geodesic_step(x: &Vector, d: &Vector, s: f64) -> Vector {
    let y = x * s.cos() + d * s.sin();
    let n = y.norm();
    y / n
}

fn tangent(x: &Vector, d: &Vector) -> Option<Vector> {
    let t = d - x * x.dot(d);
    let n = t.norm();
    (n > 1e-8).then(|| t / n)
}

fn refine<F>(f: &F, x0: Vector, f0: f64, step0: f64, cfg: &OptimizerConfig, stream_idx: u64) -> (Vector, f64, usize)
where
    F: Fn(&Vector) -> f64 + Sync,
{
    let n = x0.len();
    let mut rng = rng::stream(cfg.seed, "refine", stream_idx);
    let (mut x, mut fx) = (x0, f0);
    let mut s = step0;
    let mut evals = 0;
    if n == 1 || !fx.is_finite() {
        return (x, fx, evals);
    }
    for _ in 0..cfg.max_sweeps {
        if s < cfg.min_step {
            break;
        }
        let mut dirs: Vec<Vector> = (0..n)
            .filter_map(|i| {
                let mut e = Vector::zeros(n);
                e[i] = 1.0;
                tangent(&x, &e)
            })
            .collect();
        for _ in 0..cfg.random_directions {
            if let Some(t) = tangent(&x, &uniform_sphere(&mut rng, n)) {
                dirs.push(t);
            }
        }
        let mut improved = false;
        for d in &dirs {
            for sign in [1.0, -1.0] {
                let y = geodesic_step(&x, d, sign * s);
                let fy = f(&y);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            s *= 0.5;
        }
    }
    (x, fx, evals)
}

/// Maximizes `f` over the unit sphere of `Rⁿ`.
pub fn maximize_on_sphere<F>(n: usize, f: F, cfg: &OptimizerConfig) -> Result<SphereOptimum>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain("optimization dimension must be at least 1"));
    }
    let delta = cfg.effective_delta(n);
    let net = cached_net(n, delta, NET_SEED)?;
    let mut seeds: Vec<Vector> = net.points.clone();
    let net_len = seeds.len();
    let mut rng = rng::stream(cfg.seed, "optimizer_starts", 0);
    seeds.extend((0..cfg.random_starts).map(|_| uniform_sphere(&mut rng, n)));
    let values: Vec<f64> = seeds.par_iter().map(|x| f(x)).collect();
    let net_value = values[..net_len].iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(cfg.restarts);
    let refined: Vec<(Vector, f64, usize)> = order
        .par_iter()
        .map(|&i| refine(&f, seeds[i].clone(), values[i], delta, cfg, i as u64))
        .collect();
    let evaluations = seeds.len() + refined.iter().map(|r| r.2).sum::<usize>();
    let (point, value, _) = refined
        .into_iter()
        .fold(None::<(Vector, f64, usize)>, |best, r| match best {
            Some(b) if b.1 >= r.1 => Some(b),
            _ => Some(r),
        })
        .expect("at least one restart");
    Ok(SphereOptimum {
        value,
        point,
        net_value,
        net_resolution: net.resolution,
        net_points: net_len,
        evaluations,
    })
}

/// Minimizes `f` over the unit sphere of `Rⁿ`.
pub fn minimize_on_sphere<F>(n: usize, f: F, cfg: &OptimizerConfig) -> Result<SphereOptimum>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    let mut r = maximize_on_sphere(n, |x| -f(x), cfg)?;
    r.value = -r.value;
    r.net_value = -r.net_value;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_linear_maximum() {
        let a = Vector::from_vec(vec![0.3, -1.0, 2.0, 0.5]);
        let r = maximize_on_sphere(4, |x| a.dot(x), &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, a.norm(), epsilon = 1e-12);
        assert!(r.value >= r.net_value);
    }

    #[test]
    fn minimizes_l_infinity_on_circle() {
        let r = minimize_on_sphere(2, |x| x.amax(), &OptimizerConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn deterministic() {
        let f = |x: &Vector| x[0] * x[1] - x[2].abs();
        let cfg = OptimizerConfig { seed: 5, ..Default::default() };
        let a = maximize_on_sphere(3, f, &cfg).unwrap();
        let b = maximize_on_sphere(3, f, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.point, b.point);
    }

    #[test]
    fn coarsens_in_high_dimension() {
        let cfg = OptimizerConfig::default();
        let d = cfg.effective_delta(12);
        assert!(d > cfg.net_delta);
        assert!(estimated_cardinality(12, d) <= cfg.max_net_points as f64 || d >= 1.2);
    }
}
