//! Bodies built from other bodies.

use super::algo::dykstra;
use super::catalog::{Ball, VertexPolytope};
use super::{check_dim, Body, ConvexBody, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Orthogonality residual tolerated by [`rotate_body`].
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

fn min_trunc(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `K ∩ L`. Its support is only the upper bound `min(h_K, h_L)`; exact
/// queries go through gauge, radial and projection.
#[derive(Debug, Clone)]
pub struct Intersection {
    a: Body,
    b: Body,
}

impl ConvexBody for Intersection {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.a.support(u).min(self.b.support(u))
    }
    /// The boundary point along `u`, which lies in the body but need not
    /// maximize `⟨·, u⟩`.
    fn support_point(&self, u: &Vector) -> Vector {
        let g = self.gauge(u);
        if g == 0.0 || !g.is_finite() {
            Vector::zeros(self.dim())
        } else {
            u / g
        }
    }
    fn gauge(&self, x: &Vector) -> f64 {
        self.a.gauge(x).max(self.b.gauge(x))
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        if self.a.gauge(x) >= self.b.gauge(x) {
            self.a.gauge_gradient(x)
        } else {
            self.b.gauge_gradient(x)
        }
    }
    fn project(&self, x: &Vector) -> Vector {
        if self.contains(x) {
            return x.clone();
        }
        let pa = |z: &Vector| self.a.project(z);
        let pb = |z: &Vector| self.b.project(z);
        dykstra(x, &[&pa, &pb], 1e-12, 20_000)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.a.contains(x) && self.b.contains(x)
    }
    fn inner_radius(&self) -> f64 {
        self.a.inner_radius().min(self.b.inner_radius())
    }
    fn outer_radius(&self) -> f64 {
        self.a.outer_radius().min(self.b.outer_radius())
    }
    fn is_symmetric(&self) -> bool {
        self.a.is_symmetric() && self.b.is_symmetric()
    }
    fn support_is_exact(&self) -> bool {
        false
    }
    fn truncation(&self) -> Option<f64> {
        min_trunc(self.a.truncation(), self.b.truncation())
    }
    fn as_ball(&self) -> Option<f64> {
        Some(self.a.as_ball()?.min(self.b.as_ball()?))
    }
}

pub fn intersect(k: &Body, l: &Body) -> Result<Body> {
    check_dim(k.dim(), l.dim())?;
    Ok(Body::new(Intersection { a: k.clone(), b: l.clone() }))
}

/// `K + L`.
#[derive(Debug, Clone)]
pub struct MinkowskiSum {
    a: Body,
    b: Body,
}

impl ConvexBody for MinkowskiSum {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.a.support(u) + self.b.support(u)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.a.support_point(u) + self.b.support_point(u)
    }
    fn contains(&self, x: &Vector) -> bool {
        if let Some(r) = self.b.as_ball() {
            return self.a.distance(x) <= r + MEMBERSHIP_TOL;
        }
        if let Some(r) = self.a.as_ball() {
            return self.b.distance(x) <= r + MEMBERSHIP_TOL;
        }
        super::algo::frank_wolfe_within(self, x, MEMBERSHIP_TOL)
    }
    fn distance(&self, x: &Vector) -> f64 {
        if let Some(r) = self.b.as_ball() {
            return (self.a.distance(x) - r).max(0.0);
        }
        if let Some(r) = self.a.as_ball() {
            return (self.b.distance(x) - r).max(0.0);
        }
        (x - self.project(x)).norm()
    }
    fn inner_radius(&self) -> f64 {
        self.a.inner_radius() + self.b.inner_radius()
    }
    fn outer_radius(&self) -> f64 {
        self.a.outer_radius() + self.b.outer_radius()
    }
    fn is_symmetric(&self) -> bool {
        self.a.is_symmetric() && self.b.is_symmetric()
    }
    fn truncation(&self) -> Option<f64> {
        min_trunc(self.a.truncation(), self.b.truncation())
    }
    fn as_ball(&self) -> Option<f64> {
        Some(self.a.as_ball()? + self.b.as_ball()?)
    }
}

pub fn minkowski_sum(k: &Body, l: &Body) -> Result<Body> {
    check_dim(k.dim(), l.dim())?;
    Ok(Body::new(MinkowskiSum { a: k.clone(), b: l.clone() }))
}

/// `K + εD`, with membership and distance read off the distance to `K`.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    base: Body,
    eps: f64,
}

impl ConvexBody for Neighborhood {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.base.support(u) + self.eps * u.norm()
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let n = u.norm();
        let p = self.base.support_point(u);
        if n == 0.0 {
            p
        } else {
            p + u * (self.eps / n)
        }
    }
    fn project(&self, x: &Vector) -> Vector {
        let p = self.base.project(x);
        let d = (x - &p).norm();
        if d <= self.eps {
            x.clone()
        } else {
            &p + (x - &p) * (self.eps / d)
        }
    }
    fn distance(&self, x: &Vector) -> f64 {
        (self.base.distance(x) - self.eps).max(0.0)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.base.distance(x) <= self.eps + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.base.inner_radius() + self.eps
    }
    fn outer_radius(&self) -> f64 {
        self.base.outer_radius() + self.eps
    }
    fn is_symmetric(&self) -> bool {
        self.base.is_symmetric()
    }
    fn truncation(&self) -> Option<f64> {
        self.base.truncation()
    }
    fn as_ball(&self) -> Option<f64> {
        Some(self.base.as_ball()? + self.eps)
    }
}

pub fn neighborhood(k: &Body, eps: f64) -> Result<Body> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::spec("eps", format!("must be nonnegative, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(k.clone());
    }
    Ok(Body::new(Neighborhood { base: k.clone(), eps }))
}

/// `UK` for orthogonal `U`.
#[derive(Debug, Clone)]
pub struct Rotated {
    base: Body,
    u: Matrix,
    ut: Matrix,
}

impl Rotated {
    fn back(&self, x: &Vector) -> Vector {
        &self.ut * x
    }
    fn fwd(&self, x: &Vector) -> Vector {
        &self.u * x
    }
}

impl ConvexBody for Rotated {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.base.support(&self.back(u))
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.fwd(&self.base.support_point(&self.back(u)))
    }
    fn gauge(&self, x: &Vector) -> f64 {
        self.base.gauge(&self.back(x))
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        self.fwd(&self.base.gauge_gradient(&self.back(x)))
    }
    fn radial(&self, u: &Vector) -> f64 {
        self.base.radial(&self.back(u))
    }
    fn project(&self, x: &Vector) -> Vector {
        self.fwd(&self.base.project(&self.back(x)))
    }
    fn distance(&self, x: &Vector) -> f64 {
        self.base.distance(&self.back(x))
    }
    fn contains(&self, x: &Vector) -> bool {
        self.base.contains(&self.back(x))
    }
    fn inner_radius(&self) -> f64 {
        self.base.inner_radius()
    }
    fn outer_radius(&self) -> f64 {
        self.base.outer_radius()
    }
    fn is_symmetric(&self) -> bool {
        self.base.is_symmetric()
    }
    fn support_is_exact(&self) -> bool {
        self.base.support_is_exact()
    }
    fn truncation(&self) -> Option<f64> {
        self.base.truncation()
    }
    fn as_ball(&self) -> Option<f64> {
        self.base.as_ball()
    }
}

/// `max |UᵀU − I|`.
pub fn orthogonality_residual(u: &Matrix) -> f64 {
    let n = u.ncols();
    (u.transpose() * u - Matrix::identity(n, n)).amax()
}

pub fn rotate_body(k: &Body, u: &Matrix) -> Result<Body> {
    if !u.is_square() {
        return Err(Error::spec("rotation", "matrix must be square"));
    }
    check_dim(k.dim(), u.nrows())?;
    let res = orthogonality_residual(u);
    if !(res <= ORTHOGONALITY_TOL) {
        return Err(Error::NotOrthogonal(res));
    }
    if k.as_ball().is_some() {
        return Ok(k.clone());
    }
    Ok(Body::new(Rotated { base: k.clone(), u: u.clone(), ut: u.transpose() }))
}

/// `K° = { y : ⟨x, y⟩ ≤ 1 for all x ∈ K }`; support and gauge swap roles.
#[derive(Debug, Clone)]
pub struct Polar {
    base: Body,
}

impl ConvexBody for Polar {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.base.gauge(u)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.base.gauge_gradient(u)
    }
    fn gauge(&self, x: &Vector) -> f64 {
        self.base.support(x)
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        self.base.support_point(x)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.base.support(x) <= 1.0 + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        1.0 / self.base.outer_radius()
    }
    fn outer_radius(&self) -> f64 {
        1.0 / self.base.inner_radius()
    }
    fn is_symmetric(&self) -> bool {
        self.base.is_symmetric()
    }
    fn as_ball(&self) -> Option<f64> {
        Some(1.0 / self.base.as_ball()?)
    }
}

pub fn polar(k: &Body) -> Result<Body> {
    if !(k.inner_radius() > 0.0) {
        return Err(Error::Unbounded(
            "polar of a body without the origin in its interior".to_string(),
        ));
    }
    if !k.outer_radius().is_finite() {
        return Err(Error::Unbounded("polar of an unbounded body".to_string()));
    }
    if let Some(r) = k.as_ball() {
        return Ok(Body::new(Ball::new(k.dim(), 1.0 / r)?));
    }
    Ok(Body::new(Polar { base: k.clone() }))
}

/// `sK`.
#[derive(Debug, Clone)]
pub struct Scaled {
    base: Body,
    s: f64,
}

impl ConvexBody for Scaled {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.s * self.base.support(u)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.base.support_point(u) * self.s
    }
    fn gauge(&self, x: &Vector) -> f64 {
        self.base.gauge(x) / self.s
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        self.base.gauge_gradient(x) / self.s
    }
    fn project(&self, x: &Vector) -> Vector {
        self.base.project(&(x / self.s)) * self.s
    }
    fn distance(&self, x: &Vector) -> f64 {
        self.s * self.base.distance(&(x / self.s))
    }
    fn contains(&self, x: &Vector) -> bool {
        self.base.contains(&(x / self.s))
    }
    fn inner_radius(&self) -> f64 {
        self.s * self.base.inner_radius()
    }
    fn outer_radius(&self) -> f64 {
        self.s * self.base.outer_radius()
    }
    fn is_symmetric(&self) -> bool {
        self.base.is_symmetric()
    }
    fn support_is_exact(&self) -> bool {
        self.base.support_is_exact()
    }
    fn truncation(&self) -> Option<f64> {
        self.base.truncation().map(|t| t * self.s)
    }
    fn as_ball(&self) -> Option<f64> {
        Some(self.s * self.base.as_ball()?)
    }
}

pub fn scale_body(k: &Body, s: f64) -> Result<Body> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::spec("scale", format!("must be positive, got {s}")));
    }
    if s == 1.0 {
        return Ok(k.clone());
    }
    Ok(Body::new(Scaled { base: k.clone(), s }))
}

/// `K + t`. The origin need not remain inside; radii are the crude
/// triangle-inequality bounds.
#[derive(Debug, Clone)]
pub struct Translated {
    base: Body,
    t: Vector,
}

impl ConvexBody for Translated {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.base.support(u) + self.t.dot(u)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.base.support_point(u) + &self.t
    }
    fn project(&self, x: &Vector) -> Vector {
        self.base.project(&(x - &self.t)) + &self.t
    }
    fn distance(&self, x: &Vector) -> f64 {
        self.base.distance(&(x - &self.t))
    }
    fn contains(&self, x: &Vector) -> bool {
        self.base.contains(&(x - &self.t))
    }
    fn inner_radius(&self) -> f64 {
        (self.base.inner_radius() - self.t.norm()).max(0.0)
    }
    fn outer_radius(&self) -> f64 {
        self.base.outer_radius() + self.t.norm()
    }
    fn is_symmetric(&self) -> bool {
        self.t.amax() == 0.0 && self.base.is_symmetric()
    }
    fn truncation(&self) -> Option<f64> {
        self.base.truncation()
    }
}

pub fn translate_body(k: &Body, t: &Vector) -> Result<Body> {
    check_dim(k.dim(), t.len())?;
    Ok(Body::new(Translated { base: k.clone(), t: t.clone() }))
}

/// `K − K` for a body without a cheaper description.
#[derive(Debug, Clone)]
pub struct DifferenceBody {
    base: Body,
}

impl ConvexBody for DifferenceBody {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.base.support(u) + self.base.support(&(-u))
    }
    fn support_point(&self, u: &Vector) -> Vector {
        self.base.support_point(u) - self.base.support_point(&(-u))
    }
    fn inner_radius(&self) -> f64 {
        // K − K ⊇ K + (−K) ⊇ 2·r_in·D when 0 ∈ K
        2.0 * self.base.inner_radius()
    }
    fn outer_radius(&self) -> f64 {
        2.0 * self.base.outer_radius()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn truncation(&self) -> Option<f64> {
        self.base.truncation()
    }
}

/// `K − K`: `2K` for symmetric `K`, pairwise differences for vertex
/// polytopes, otherwise support-only.
pub fn difference_body(k: &Body) -> Result<Body> {
    if k.is_symmetric() {
        return scale_body(k, 2.0);
    }
    if let Some(vs) = k.vertices() {
        let mut diffs: Vec<Vector> = Vec::with_capacity(vs.len() * vs.len());
        for a in vs {
            for b in vs {
                let d = a - b;
                if !diffs.iter().any(|e| (e - &d).amax() <= 1e-12) {
                    diffs.push(d);
                }
            }
        }
        return Ok(Body::new(VertexPolytope::new(diffs)?));
    }
    Ok(Body::new(DifferenceBody { base: k.clone() }))
}

impl DifferenceBody {
    /// The support-only representation, whatever the structure of `K`.
    pub fn from_body(k: &Body) -> Self {
        Self { base: k.clone() }
    }
}
