//! Certified nets on the sphere by greedy farthest-point insertion.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::angle;
use crate::error::{Error, Result};
use crate::measure::{sigma_exact, SubsphereQuery};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

/// Largest ambient dimension accepted by [`build_net`].
pub const MAX_NET_DIM: usize = 16;

#[derive(Debug, Clone)]
pub struct NetOptions {
    /// Uniform probes used for certification.
    pub probes: usize,
    /// Retry/extend rounds before giving up.
    pub max_rounds: usize,
    /// Ambient dimensions up to which certification is exhaustive.
    pub exhaustive_max_dim: usize,
    /// Upper limit on the random candidate pool.
    pub max_pool: usize,
}

impl Default for NetOptions {
    fn default() -> Self {
        Self { probes: 10_000, max_rounds: 20, exhaustive_max_dim: 4, max_pool: 200_000 }
    }
}

/// Points on the unit sphere of `Rⁿ` whose `resolution`-caps cover it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereNet {
    pub dim: usize,
    pub requested: f64,
    /// Certified covering radius (geodesic), at most `requested`. Exhaustive
    /// nets certify `max over grid + grid spacing`; otherwise the requested
    /// radius is certified by the probes.
    pub resolution: f64,
    /// Largest probe-to-net distance seen.
    pub probe_max: f64,
    pub exhaustive: bool,
    pub rounds: usize,
    /// Whether `N ≤ (1 + 2/sin δ)ⁿ` holds.
    pub within_volumetric_bound: bool,
    #[serde(with = "vectors")]
    pub points: Vec<Vector>,
}

mod vectors {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Vector;

    pub fn serialize<S: Serializer>(v: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = v.iter().map(|x| x.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(rows.into_iter().map(Vector::from_vec).collect())
    }
}

impl SphereNet {
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Index of and distance to the nearest net point.
    pub fn nearest(&self, x: &Vector) -> (usize, f64) {
        let (i, _) = nearest_dot(&self.points, x);
        (i, angle(x, &self.points[i]))
    }
}

fn nearest_dot(points: &[Vector], x: &Vector) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d = p.dot(x);
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

/// Rough cardinality of a `delta`-net: three times the number of disjoint
/// caps the sphere can hold.
pub fn estimated_cardinality(n: usize, delta: f64) -> f64 {
    if n <= 1 {
        return 2.0;
    }
    let q = SubsphereQuery::new(n - 1, 0, delta.min(std::f64::consts::FRAC_PI_2));
    match q {
        Ok(q) => 3.0 * 2.0 / sigma_exact(&q).max(f64::MIN_POSITIVE),
        Err(_) => f64::INFINITY,
    }
}

/// `ln((1 + 2/sin δ)ⁿ)`.
fn ln_volumetric_bound(n: usize, delta: f64) -> f64 {
    n as f64 * (1.0 + 2.0 / delta.sin()).ln()
}

/// Adds points of `pool` to `net` (farthest first) until every pool point
/// is within `target` of the net.
fn greedy_extend(net: &mut Vec<Vector>, pool: &[Vector], target: f64) {
    if pool.is_empty() {
        return;
    }
    let cos_t = target.cos();
    let mut best: Vec<f64> = pool
        .par_iter()
        .map(|p| if net.is_empty() { f64::NEG_INFINITY } else { nearest_dot(net, p).1 })
        .collect();
    loop {
        let (idx, worst) = best
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc });
        if worst >= cos_t {
            break;
        }
        let p = pool[idx].clone();
        best.par_iter_mut().zip(pool.par_iter()).for_each(|(b, q)| {
            let d = p.dot(q);
            if d > *b {
                *b = d;
            }
        });
        net.push(p);
    }
}

/// Points of the cube-face grid with `m` cells per edge, radially projected
/// to the sphere. Index layout: face-major, then lexicographic.
struct FaceGrid {
    n: usize,
    m: usize,
    per_face: usize,
}

impl FaceGrid {
    fn new(n: usize, m: usize) -> Self {
        Self { n, m, per_face: (m + 1).pow((n - 1) as u32) }
    }

    fn len(&self) -> usize {
        2 * self.n * self.per_face
    }

    fn point(&self, idx: usize) -> Vector {
        let face = idx / self.per_face;
        let mut rest = idx % self.per_face;
        let axis = face / 2;
        let sign = if face % 2 == 0 { 1.0 } else { -1.0 };
        let h = 2.0 / self.m as f64;
        let mut x = Vector::zeros(self.n);
        for j in 0..self.n {
            if j == axis {
                x[j] = sign;
            } else {
                x[j] = -1.0 + h * (rest % (self.m + 1)) as f64;
                rest /= self.m + 1;
            }
        }
        let nrm = x.norm();
        x / nrm
    }
}

/// Maximum over grid points of an upper bound on the distance to the net,
/// and the grid points whose bound exceeds `limit`.
fn grid_pass(grid: &FaceGrid, net: &[Vector], limit: f64) -> (f64, Vec<Vector>) {
    const BLOCK: usize = 4096;
    let cos_limit = limit.cos();
    let blocks: Vec<(f64, Vec<Vector>)> = (0..grid.len().div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut cached = 0usize;
            let mut worst: f64 = 0.0;
            let mut failing = Vec::new();
            for idx in b * BLOCK..((b + 1) * BLOCK).min(grid.len()) {
                let g = grid.point(idx);
                // any net point within the limit gives an admissible bound;
                // neighbouring grid points usually share it
                let d = if net[cached].dot(&g) >= cos_limit {
                    angle(&g, &net[cached])
                } else {
                    let (i, _) = nearest_dot(net, &g);
                    cached = i;
                    angle(&g, &net[i])
                };
                worst = worst.max(d);
                if d > limit {
                    failing.push(g);
                }
            }
            (worst, failing)
        })
        .collect();
    let worst = blocks.iter().map(|b| b.0).fold(0.0, f64::max);
    (worst, blocks.into_iter().flat_map(|b| b.1).collect())
}

pub fn build_net(n: usize, delta: f64, seed: u64) -> Result<SphereNet> {
    build_net_with(n, delta, seed, &NetOptions::default())
}

pub fn build_net_with(n: usize, delta: f64, seed: u64, opts: &NetOptions) -> Result<SphereNet> {
    if n == 0 || n > MAX_NET_DIM {
        return Err(Error::domain(format!("net dimension must lie in 1..={MAX_NET_DIM}, got {n}")));
    }
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!("net resolution must lie in (0, π/2), got {delta}")));
    }
    if n == 1 {
        return Ok(SphereNet {
            dim: 1,
            requested: delta,
            resolution: 0.0,
            probe_max: 0.0,
            exhaustive: true,
            rounds: 0,
            within_volumetric_bound: true,
            points: vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)],
        });
    }

    let exhaustive = n <= opts.exhaustive_max_dim;
    // grid spacing eta: every sphere point is within eta of a grid point
    let (grid, eta) = if exhaustive {
        let chord = 2.0 * (0.1 * delta).sin();
        let m = (2.0 * (n as f64 - 1.0).sqrt() / (2.0 * chord)).ceil().max(1.0) as usize;
        let h = 2.0 / m as f64;
        let eta = 2.0 * ((h / 2.0) * (n as f64 - 1.0).sqrt() / 2.0).min(1.0).asin();
        (Some(FaceGrid::new(n, m)), eta)
    } else {
        (None, 0.0)
    };
    // probabilistic certification is only as good as the probes, so both
    // modes aim well inside the requested radius
    let target = 0.75 * delta;

    let est = estimated_cardinality(n, target);
    let pool_size = ((8.0 * est).min(opts.max_pool as f64) as usize).max(20_000);
    let mut g = rng::stream(seed, "net_pool", 0);
    let pool: Vec<Vector> = (0..pool_size).map(|_| uniform_sphere(&mut g, n)).collect();
    let mut net: Vec<Vector> = Vec::new();
    greedy_extend(&mut net, &pool, target);

    let mut achieved = f64::INFINITY;
    for round in 0..opts.max_rounds {
        let mut pg = rng::stream(seed, "net_probe", round as u64);
        let probes: Vec<Vector> = (0..opts.probes).map(|_| uniform_sphere(&mut pg, n)).collect();
        let dists: Vec<f64> = probes
            .par_iter()
            .map(|p| angle(p, &net[nearest_dot(&net, p).0]))
            .collect();
        let probe_max = dists.iter().copied().fold(0.0, f64::max);
        let mut failing: Vec<Vector> = probes
            .iter()
            .zip(&dists)
            .filter(|(_, &d)| d > delta)
            .map(|(p, _)| p.clone())
            .collect();
        let mut grid_max = 0.0;
        if let Some(grid) = &grid {
            let (w, f) = grid_pass(grid, &net, delta - eta);
            grid_max = w;
            failing.extend(f);
        }
        achieved = if exhaustive { (grid_max + eta).max(probe_max) } else { probe_max };
        if failing.is_empty() {
            let resolution = if exhaustive { (grid_max + eta).max(probe_max) } else { delta };
            let within = (net.len() as f64).ln() <= ln_volumetric_bound(n, delta);
            return Ok(SphereNet {
                dim: n,
                requested: delta,
                resolution,
                probe_max,
                exhaustive,
                rounds: round + 1,
                within_volumetric_bound: within,
                points: net,
            });
        }
        greedy_extend(&mut net, &failing, target);
    }
    Err(Error::NetCertification { requested: delta, achieved, rounds: opts.max_rounds })
}

type NetKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<NetKey, Arc<SphereNet>>> {
    static CACHE: OnceLock<Mutex<HashMap<NetKey, Arc<SphereNet>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`build_net`]; nets are pure functions of their arguments.
pub fn cached_net(n: usize, delta: f64, seed: u64) -> Result<Arc<SphereNet>> {
    let key = (n, delta.to_bits(), seed);
    if let Some(net) = cache().lock().expect("net cache poisoned").get(&key) {
        return Ok(net.clone());
    }
    let net = Arc::new(build_net(n, delta, seed)?);
    cache().lock().expect("net cache poisoned").insert(key, net.clone());
    Ok(net)
}
