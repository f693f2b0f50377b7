//! Convex bodies presented through evaluators.
//!
//! A body is anything implementing [`ConvexBody`]; [`Body`] is the shared,
//! immutable handle the rest of the crate passes around. Catalog bodies
//! override every evaluator with closed forms. Combinators (intersection,
//! Minkowski sum, rotation, polar, difference body, neighborhoods) compose
//! evaluators and fall back to the generic projection schemes in [`algo`]
//! where no closed form exists.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::Vector;

pub mod algo;
mod catalog;
mod combinators;
mod spec;
mod volume;

pub use catalog::{
    Ball, CrossPolytope, Cube, Ellipsoid, Point, Product, SlabIntersection, VertexPolytope,
};
pub use combinators::{
    difference_body, intersect, minkowski_sum, neighborhood, orthogonality_residual, polar,
    rotate_body, scale_body,
    translate_body, DifferenceBody, Intersection, MinkowskiSum, Neighborhood, Polar, Rotated,
    Scaled, Translated,
};
pub use spec::{construct_body, BodySpec};
pub use volume::{check_ball_inside, mc_volume, volume_ratio, VolumeRatio, CONTAINMENT_PROBES};

/// Membership tolerance at the boundary; ties count as members.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default truncation radius for unbounded directions.
pub const DEFAULT_TRUNCATION: f64 = 1e6;

/// Evaluator bundle for a closed convex set containing the origin.
///
/// Implementations must keep `support` positively homogeneous, return a
/// maximizer from `support_point`, and report `inner_radius`/`outer_radius`
/// such that `inner_radius ≤ radial(u) ≤ outer_radius` for unit `u`.
pub trait ConvexBody: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// `h_K(u) = sup { ⟨x, u⟩ : x ∈ K }`.
    fn support(&self, u: &Vector) -> f64;

    /// Some `x ∈ K` attaining `h_K(u)`; the linear-minimization oracle.
    fn support_point(&self, u: &Vector) -> Vector;

    /// Minkowski functional `‖x‖_K`, `∞` outside the cone generated by `K`.
    fn gauge(&self, x: &Vector) -> f64 {
        algo::gauge_by_bisection(self, x)
    }

    /// A subgradient of the gauge at `x`; equivalently a support point of
    /// the polar body in direction `x`.
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        algo::numeric_gradient(|y| self.gauge(y), x)
    }

    /// `r_K(u) = 1 / ‖u‖_K`.
    fn radial(&self, u: &Vector) -> f64 {
        let g = self.gauge(u);
        if g == 0.0 {
            f64::INFINITY
        } else {
            1.0 / g
        }
    }

    /// Nearest point of `K` to `x`.
    fn project(&self, x: &Vector) -> Vector {
        algo::frank_wolfe_project(self, x).point
    }

    /// Euclidean distance from `x` to `K`.
    fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    fn contains(&self, x: &Vector) -> bool {
        algo::frank_wolfe_within(self, x, MEMBERSHIP_TOL)
    }

    /// Certified radius of a Euclidean ball about the origin inside `K`.
    fn inner_radius(&self) -> f64;

    /// Radius of a Euclidean ball about the origin containing `K`.
    fn outer_radius(&self) -> f64;

    fn is_symmetric(&self) -> bool;

    /// `false` when `support` is only an upper bound (intersections).
    fn support_is_exact(&self) -> bool {
        true
    }

    /// Radius at which unbounded directions were cut off, if any.
    fn truncation(&self) -> Option<f64> {
        None
    }

    /// `Some(r)` when the body is the centered Euclidean ball of radius `r`.
    fn as_ball(&self) -> Option<f64> {
        None
    }

    /// Vertex list when the body is stored as a vertex polytope.
    fn vertices(&self) -> Option<&[Vector]> {
        None
    }
}

/// Shared handle to an immutable convex body.
#[derive(Clone)]
pub struct Body(Arc<dyn ConvexBody>);

impl Body {
    pub fn new<B: ConvexBody + 'static>(body: B) -> Self {
        Body(Arc::new(body))
    }

    pub fn inner(&self) -> &Arc<dyn ConvexBody> {
        &self.0
    }

}

impl Deref for Body {
    type Target = dyn ConvexBody;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> crate::Result<()> {
    if expected != got {
        Err(crate::Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests;
