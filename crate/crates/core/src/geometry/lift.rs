//! Odd liftings of a projection onto a convex body, and the segment–cap
//! inclusion used to pass from a waist to a neighborhood of the body.

use serde::Serialize;

use super::Subspace;
use crate::bodies::algo::dykstra;
use crate::bodies::{Body, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::rng::{self, uniform_sphere};
use crate::Vector;

/// Residual allowed in `P g(x) = x` and in the fiber membership of `g(x)`.
pub const LIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct WaistPoint {
    /// `g(x) ∈ K` with `P g(x) = x`.
    pub g: Vec<f64>,
    /// `f(x) = g(x) / |g(x)| ∈ K ∩ S^{n−1}`.
    pub f: Vec<f64>,
}

/// Checks `PK ⊇ PD` through `h_K(Fᵀw) ≥ 1` on the axes of the frame and
/// `probes` random unit `w`, returning the first violating direction.
pub fn verify_projection_hypothesis(k: &Body, p: &Subspace, probes: usize, seed: u64) -> Result<()> {
    crate::bodies::check_dim(k.dim(), p.ambient_dim())?;
    if !k.support_is_exact() {
        return Err(Error::Hypothesis {
            detail: "projection hypothesis needs an exact support evaluator".to_string(),
            witness: None,
        });
    }
    let kd = p.dim();
    let mut g = rng::stream(seed, "projection_hypothesis", 0);
    let axes = (0..2 * kd).map(|i| {
        let mut e = Vector::zeros(kd);
        e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
        e
    });
    let random = (0..probes).map(|_| uniform_sphere(&mut g, kd));
    for w in axes.chain(random) {
        let v = p.embed(&w);
        let h = k.support(&v);
        if h < 1.0 - MEMBERSHIP_TOL {
            return Err(Error::Hypothesis {
                detail: format!("PK does not contain PD: support {h} < 1 along witness"),
                witness: Some(v.iter().copied().collect()),
            });
        }
    }
    Ok(())
}

/// Minimal-norm point of the fiber `K ∩ {z : Pz = Fᵀx}` for a unit `x ∈ Rᵏ`
/// (coordinates in the frame of `p`), and its normalization.
///
/// The selection is made odd exactly by computing it only for `x` whose
/// first nonzero coordinate is positive and negating otherwise; this needs
/// `K` symmetric.
pub fn lift_waist(k: &Body, p: &Subspace, x: &Vector) -> Result<WaistPoint> {
    crate::bodies::check_dim(k.dim(), p.ambient_dim())?;
    crate::bodies::check_dim(p.dim(), x.len())?;
    if !k.is_symmetric() {
        return Err(Error::Hypothesis {
            detail: "odd lifting needs a symmetric body".to_string(),
            witness: None,
        });
    }
    if (x.norm() - 1.0).abs() > super::UNIT_TOL {
        return Err(Error::domain(format!("lift point must be a unit vector, got norm {}", x.norm())));
    }
    let flip = x.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0);
    let xc = if flip { -x } else { x.clone() };
    let c = p.embed(&xc);

    let frame = p.frame();
    let onto_affine = |z: &Vector| -> Vector { z - frame.tr_mul(&(frame * z - &xc)) };
    let onto_body = |z: &Vector| -> Vector { k.project(z) };
    // start on the affine set at its point of least norm
    let y = dykstra(&c, &[&onto_body, &onto_affine], 1e-14, 200_000);
    let y = k.project(&y);
    let fiber_gap = (frame * &y - &xc).norm();
    if fiber_gap > LIFT_TOL || k.distance(&y) > MEMBERSHIP_TOL {
        return Err(Error::Hypothesis {
            detail: format!("empty fiber over witness (residual {fiber_gap})"),
            witness: Some(x.iter().copied().collect()),
        });
    }
    let g = if flip { -y } else { y };
    let norm = g.norm();
    Ok(WaistPoint { f: (&g / norm).iter().copied().collect(), g: g.iter().copied().collect() })
}

/// Euclidean distance from `z` to the segment `[−y, y]`.
pub fn segment_distance(y: &Vector, z: &Vector) -> f64 {
    let yy = y.norm_squared();
    if yy == 0.0 {
        return z.norm();
    }
    let t = (z.dot(y) / yy).clamp(-1.0, 1.0);
    (z - y * t).norm()
}

/// Whether `d(y, z) ≤ arcsin ε` implies `dist(z, [−y, y]) ≤ ε`, evaluated
/// exactly for the given pair (vacuously true when the angle is larger).
pub fn segment_cap_check(y: &Vector, z: &Vector, eps: f64) -> bool {
    let theta = super::angle(y, z);
    if theta > eps.asin() {
        return true;
    }
    segment_distance(y, z) <= eps * (1.0 + 1e-12) + 1e-15
}
