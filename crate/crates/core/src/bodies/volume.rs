//! Hit-or-miss volumes and volume ratios.

use serde::Serialize;

use super::{Body, ConvexBody};
use crate::error::{Error, Result};
use crate::measure::{parallel_hits, McEstimate};
use crate::rng::{self, uniform_ball};
use crate::special::unit_ball_volume;
use crate::Vector;

/// Number of sphere directions used to check `D ⊆ K`.
pub const CONTAINMENT_PROBES: usize = 10_000;

/// Volume of `K` from uniform samples in `r_out·D`.
pub fn mc_volume(k: &Body, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let r = k.outer_radius();
    if !r.is_finite() {
        return Err(Error::Unbounded("volume of an unbounded body".to_string()));
    }
    let n = k.dim();
    if r == 0.0 {
        return Ok(McEstimate { estimate: 0.0, standard_error: 0.0, samples });
    }
    let hits = parallel_hits(samples, seed, "mc_volume", |g| k.contains(&uniform_ball(g, n, r)));
    let frac = McEstimate::from_hits(hits, samples);
    let box_vol = unit_ball_volume(n) * r.powi(n as i32);
    Ok(McEstimate {
        estimate: frac.estimate * box_vol,
        standard_error: frac.standard_error * box_vol,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeRatio {
    /// `(|K|/|D|)^{1/n}`.
    pub ratio: f64,
    /// Delta-method standard error of `ratio`.
    pub standard_error: f64,
    pub volume: McEstimate,
}

/// Checks `D ⊆ K` on coordinate and random directions, returning the first
/// direction `u` with `‖u‖_K > 1`.
pub fn check_ball_inside(k: &dyn ConvexBody, probes: usize, seed: u64) -> Result<()> {
    let n = k.dim();
    if k.inner_radius() >= 1.0 {
        return Ok(());
    }
    let mut g = rng::stream(seed, "ball_inside", 0);
    let coords = (0..2 * n).map(|i| {
        let mut e = Vector::zeros(n);
        e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
        e
    });
    let random = (0..probes).map(|_| rng::uniform_sphere(&mut g, n));
    for u in coords.chain(random) {
        let gauge = k.gauge(&u);
        if gauge > 1.0 + super::MEMBERSHIP_TOL {
            return Err(Error::Containment {
                witness: u.iter().copied().collect(),
                detail: format!("unit ball not contained: gauge {gauge} > 1 at witness"),
            });
        }
    }
    Ok(())
}

pub fn volume_ratio(k: &Body, samples: usize, seed: u64) -> Result<VolumeRatio> {
    check_ball_inside(&**k, CONTAINMENT_PROBES, rng::derive_seed(seed, "containment", 0))?;
    let vol = mc_volume(k, samples, seed)?;
    let n = k.dim() as f64;
    let ratio = (vol.estimate / unit_ball_volume(k.dim())).powf(1.0 / n);
    let se = if vol.estimate > 0.0 {
        ratio * vol.standard_error / (n * vol.estimate)
    } else {
        0.0
    };
    Ok(VolumeRatio { ratio, standard_error: se, volume: vol })
}
