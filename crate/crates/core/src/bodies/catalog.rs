//! Closed-form test bodies.

use super::algo::{
    convex_hull_2d, dykstra, lp_slab_support, lp_vertex_contains, lp_vertex_gauge,
    project_ellipsoid, project_l1_ball,
};
use super::{check_dim, Body, ConvexBody, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::Vector;

fn argmax_abs(x: &Vector) -> usize {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::spec(field, format!("must be positive and finite, got {v}")))
    }
}

/// Centered Euclidean ball `r·D`.
#[derive(Debug, Clone)]
pub struct Ball {
    dim: usize,
    radius: f64,
}

impl Ball {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::spec("dim", "must be at least 1"));
        }
        positive("radius", radius)?;
        Ok(Self { dim, radius })
    }

    pub fn unit(dim: usize) -> Self {
        Self { dim, radius: 1.0 }
    }
}

impl ConvexBody for Ball {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, u: &Vector) -> f64 {
        self.radius * u.norm()
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let n = u.norm();
        if n == 0.0 {
            Vector::zeros(self.dim)
        } else {
            u * (self.radius / n)
        }
    }
    fn gauge(&self, x: &Vector) -> f64 {
        x.norm() / self.radius
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        let n = x.norm();
        if n == 0.0 {
            Vector::zeros(self.dim)
        } else {
            x / (n * self.radius)
        }
    }
    fn project(&self, x: &Vector) -> Vector {
        let n = x.norm();
        if n <= self.radius {
            x.clone()
        } else {
            x * (self.radius / n)
        }
    }
    fn distance(&self, x: &Vector) -> f64 {
        (x.norm() - self.radius).max(0.0)
    }
    fn contains(&self, x: &Vector) -> bool {
        x.norm() <= self.radius + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.radius
    }
    fn outer_radius(&self) -> f64 {
        self.radius
    }
    fn is_symmetric(&self) -> bool {
        true
    }
    fn as_ball(&self) -> Option<f64> {
        Some(self.radius)
    }
}

/// Cube `[−a, a]ⁿ`.
#[derive(Debug, Clone)]
pub struct Cube {
    dim: usize,
    half_width: f64,
}

impl Cube {
    pub fn new(dim: usize, half_width: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::spec("dim", "must be at least 1"));
        }
        positive("half_width", half_width)?;
        Ok(Self { dim, half_width })
    }
}

impl ConvexBody for Cube {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, u: &Vector) -> f64 {
        self.half_width * u.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn support_point(&self, u: &Vector) -> Vector {
        u.map(|v| self.half_width * v.signum())
    }
    fn gauge(&self, x: &Vector) -> f64 {
        x.amax() / self.half_width
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.dim);
        let i = argmax_abs(x);
        if x[i] != 0.0 {
            g[i] = x[i].signum() / self.half_width;
        }
        g
    }
    fn project(&self, x: &Vector) -> Vector {
        x.map(|v| v.clamp(-self.half_width, self.half_width))
    }
    fn contains(&self, x: &Vector) -> bool {
        x.amax() <= self.half_width + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.half_width
    }
    fn outer_radius(&self) -> f64 {
        self.half_width * (self.dim as f64).sqrt()
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Cross-polytope `r·B₁ⁿ`.
#[derive(Debug, Clone)]
pub struct CrossPolytope {
    dim: usize,
    radius: f64,
}

impl CrossPolytope {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::spec("dim", "must be at least 1"));
        }
        positive("radius", radius)?;
        Ok(Self { dim, radius })
    }
}

impl ConvexBody for CrossPolytope {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, u: &Vector) -> f64 {
        self.radius * u.amax()
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let mut p = Vector::zeros(self.dim);
        let i = argmax_abs(u);
        p[i] = self.radius * u[i].signum();
        p
    }
    fn gauge(&self, x: &Vector) -> f64 {
        x.iter().map(|v| v.abs()).sum::<f64>() / self.radius
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        x.map(|v| if v == 0.0 { 0.0 } else { v.signum() / self.radius })
    }
    fn project(&self, x: &Vector) -> Vector {
        project_l1_ball(x, self.radius)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.gauge(x) <= 1.0 + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.radius / (self.dim as f64).sqrt()
    }
    fn outer_radius(&self) -> f64 {
        self.radius
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Axis-aligned ellipsoid `Σ (xᵢ/aᵢ)² ≤ 1`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    semiaxes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(semiaxes: Vec<f64>) -> Result<Self> {
        if semiaxes.is_empty() {
            return Err(Error::spec("semiaxes", "must be nonempty"));
        }
        for a in &semiaxes {
            positive("semiaxes", *a)?;
        }
        Ok(Self { semiaxes })
    }
}

impl ConvexBody for Ellipsoid {
    fn dim(&self) -> usize {
        self.semiaxes.len()
    }
    fn support(&self, u: &Vector) -> f64 {
        u.iter().zip(&self.semiaxes).map(|(v, a)| (a * v).powi(2)).sum::<f64>().sqrt()
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let h = self.support(u);
        if h == 0.0 {
            return Vector::zeros(self.dim());
        }
        Vector::from_iterator(
            self.dim(),
            u.iter().zip(&self.semiaxes).map(|(v, a)| a * a * v / h),
        )
    }
    fn gauge(&self, x: &Vector) -> f64 {
        x.iter().zip(&self.semiaxes).map(|(v, a)| (v / a).powi(2)).sum::<f64>().sqrt()
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        let g = self.gauge(x);
        if g == 0.0 {
            return Vector::zeros(self.dim());
        }
        Vector::from_iterator(
            self.dim(),
            x.iter().zip(&self.semiaxes).map(|(v, a)| v / (a * a * g)),
        )
    }
    fn project(&self, x: &Vector) -> Vector {
        project_ellipsoid(x, &self.semiaxes)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.gauge(x) <= 1.0 + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.semiaxes.iter().copied().fold(f64::INFINITY, f64::min)
    }
    fn outer_radius(&self) -> f64 {
        self.semiaxes.iter().copied().fold(0.0, f64::max)
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// The one-point body `{0}`.
#[derive(Debug, Clone)]
pub struct Point {
    dim: usize,
}

impl Point {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::spec("dim", "must be at least 1"));
        }
        Ok(Self { dim })
    }
}

impl ConvexBody for Point {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, _u: &Vector) -> f64 {
        0.0
    }
    fn support_point(&self, _u: &Vector) -> Vector {
        Vector::zeros(self.dim)
    }
    fn gauge(&self, x: &Vector) -> f64 {
        if x.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn gauge_gradient(&self, _x: &Vector) -> Vector {
        Vector::zeros(self.dim)
    }
    fn project(&self, _x: &Vector) -> Vector {
        Vector::zeros(self.dim)
    }
    fn distance(&self, x: &Vector) -> f64 {
        x.norm()
    }
    fn contains(&self, x: &Vector) -> bool {
        x.norm() <= MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        0.0
    }
    fn outer_radius(&self) -> f64 {
        0.0
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Cartesian product `K₁ × K₂` on split coordinates. Bodies with an empty
/// second factor interior (e.g. `B₂ᵏ × {0}`) are the lower-dimensional
/// bodies; truncated cylinders are products with a large ball.
#[derive(Debug, Clone)]
pub struct Product {
    first: Body,
    second: Body,
    truncation: Option<f64>,
}

impl Product {
    pub fn new(first: Body, second: Body) -> Self {
        Self { first, second, truncation: None }
    }

    /// Marks the second factor as a cut-off of an unbounded direction set.
    pub fn truncated(first: Body, second: Body, radius: f64) -> Self {
        Self { first, second, truncation: Some(radius) }
    }

    fn split(&self, x: &Vector) -> (Vector, Vector) {
        let k = self.first.dim();
        (
            x.rows(0, k).into_owned(),
            x.rows(k, x.len() - k).into_owned(),
        )
    }

    fn join(a: Vector, b: Vector) -> Vector {
        let mut out = Vector::zeros(a.len() + b.len());
        out.rows_mut(0, a.len()).copy_from(&a);
        out.rows_mut(a.len(), b.len()).copy_from(&b);
        out
    }
}

impl ConvexBody for Product {
    fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }
    fn support(&self, u: &Vector) -> f64 {
        let (a, b) = self.split(u);
        self.first.support(&a) + self.second.support(&b)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let (a, b) = self.split(u);
        Self::join(self.first.support_point(&a), self.second.support_point(&b))
    }
    fn gauge(&self, x: &Vector) -> f64 {
        let (a, b) = self.split(x);
        self.first.gauge(&a).max(self.second.gauge(&b))
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        let (a, b) = self.split(x);
        if self.first.gauge(&a) >= self.second.gauge(&b) {
            Self::join(self.first.gauge_gradient(&a), Vector::zeros(b.len()))
        } else {
            Self::join(Vector::zeros(a.len()), self.second.gauge_gradient(&b))
        }
    }
    fn project(&self, x: &Vector) -> Vector {
        let (a, b) = self.split(x);
        Self::join(self.first.project(&a), self.second.project(&b))
    }
    fn distance(&self, x: &Vector) -> f64 {
        let (a, b) = self.split(x);
        self.first.distance(&a).hypot(self.second.distance(&b))
    }
    fn contains(&self, x: &Vector) -> bool {
        let (a, b) = self.split(x);
        self.first.contains(&a) && self.second.contains(&b)
    }
    fn inner_radius(&self) -> f64 {
        self.first.inner_radius().min(self.second.inner_radius())
    }
    fn outer_radius(&self) -> f64 {
        self.first.outer_radius().hypot(self.second.outer_radius())
    }
    fn is_symmetric(&self) -> bool {
        self.first.is_symmetric() && self.second.is_symmetric()
    }
    fn truncation(&self) -> Option<f64> {
        [self.truncation, self.first.truncation(), self.second.truncation()]
            .into_iter()
            .flatten()
            .reduce(f64::min)
    }
}

/// `{ x : |⟨nᵢ, x⟩| ≤ wᵢ for all i }`.
#[derive(Debug, Clone)]
pub struct SlabIntersection {
    normals: Vec<Vector>,
    widths: Vec<f64>,
    outer: f64,
}

impl SlabIntersection {
    pub fn new(normals: Vec<Vector>, widths: Vec<f64>) -> Result<Self> {
        if normals.is_empty() || normals.len() != widths.len() {
            return Err(Error::spec("slabs", "need a nonempty list of (normal, width) pairs"));
        }
        let dim = normals[0].len();
        for nv in &normals {
            check_dim(dim, nv.len())?;
            if nv.norm() == 0.0 {
                return Err(Error::spec("normal", "must be nonzero"));
            }
        }
        for w in &widths {
            positive("width", *w)?;
        }
        let mut outer_sq = 0.0;
        for i in 0..dim {
            let mut e = Vector::zeros(dim);
            e[i] = 1.0;
            match lp_slab_support(&normals, &widths, &e) {
                Some((h, _)) => outer_sq += h * h,
                None => {
                    return Err(Error::Unbounded(
                        "slab normals do not span the space".to_string(),
                    ))
                }
            }
        }
        Ok(Self { normals, widths, outer: outer_sq.sqrt() })
    }

    fn slab_index(&self, x: &Vector) -> (usize, f64) {
        let mut best = (0, 0.0);
        for (i, (nv, w)) in self.normals.iter().zip(&self.widths).enumerate() {
            let v = nv.dot(x).abs() / w;
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

impl ConvexBody for SlabIntersection {
    fn dim(&self) -> usize {
        self.normals[0].len()
    }
    fn support(&self, u: &Vector) -> f64 {
        lp_slab_support(&self.normals, &self.widths, u).map_or(f64::INFINITY, |(h, _)| h)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        lp_slab_support(&self.normals, &self.widths, u)
            .map(|(_, x)| x)
            .unwrap_or_else(|| Vector::zeros(self.dim()))
    }
    fn gauge(&self, x: &Vector) -> f64 {
        self.slab_index(x).1
    }
    fn gauge_gradient(&self, x: &Vector) -> Vector {
        let (i, v) = self.slab_index(x);
        if v == 0.0 {
            return Vector::zeros(self.dim());
        }
        &self.normals[i] * (self.normals[i].dot(x).signum() / self.widths[i])
    }
    fn project(&self, x: &Vector) -> Vector {
        if self.contains(x) {
            return x.clone();
        }
        let projections: Vec<Box<dyn Fn(&Vector) -> Vector + '_>> = self
            .normals
            .iter()
            .zip(&self.widths)
            .map(|(nv, &w)| {
                let nn = nv.norm_squared();
                Box::new(move |z: &Vector| {
                    let t = nv.dot(z);
                    let excess = if t > w { t - w } else if t < -w { t + w } else { 0.0 };
                    z - nv * (excess / nn)
                }) as Box<dyn Fn(&Vector) -> Vector>
            })
            .collect();
        let refs: Vec<&dyn Fn(&Vector) -> Vector> = projections.iter().map(|b| b.as_ref()).collect();
        dykstra(x, &refs, 1e-13, 100_000)
    }
    fn contains(&self, x: &Vector) -> bool {
        self.gauge(x) <= 1.0 + MEMBERSHIP_TOL
    }
    fn inner_radius(&self) -> f64 {
        self.normals
            .iter()
            .zip(&self.widths)
            .map(|(nv, w)| w / nv.norm())
            .fold(f64::INFINITY, f64::min)
    }
    fn outer_radius(&self) -> f64 {
        self.outer
    }
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Convex hull of a finite vertex list.
#[derive(Debug, Clone)]
pub struct VertexPolytope {
    vertices: Vec<Vector>,
    symmetric: bool,
    /// Counter-clockwise hull and origin-interior flag for planar polytopes.
    hull: Option<Vec<[f64; 2]>>,
    inner: f64,
    outer: f64,
}

impl VertexPolytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::spec("vertices", "must be nonempty"));
        }
        let dim = vertices[0].len();
        if dim == 0 {
            return Err(Error::spec("vertices", "must have positive dimension"));
        }
        for v in &vertices {
            check_dim(dim, v.len())?;
        }
        let symmetric = vertices
            .iter()
            .all(|v| vertices.iter().any(|w| (v + w).amax() <= 1e-12));
        let outer = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let hull = (dim == 2).then(|| convex_hull_2d(&vertices));
        let mut body = Self { vertices, symmetric, hull, inner: 0.0, outer };
        body.inner = body.compute_inner_radius();
        Ok(body)
    }

    pub fn vertex_list(&self) -> &[Vector] {
        &self.vertices
    }

    /// Edge lines `⟨n, y⟩ = b` with outward unit normals, for planar hulls.
    fn edges(&self) -> Option<Vec<([f64; 2], f64, [f64; 2], [f64; 2])>> {
        let hull = self.hull.as_ref()?;
        if hull.len() < 3 {
            return None;
        }
        let m = hull.len();
        Some(
            (0..m)
                .map(|i| {
                    let a = hull[i];
                    let b = hull[(i + 1) % m];
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let len = dx.hypot(dy);
                    let nrm = [dy / len, -dx / len];
                    (nrm, nrm[0] * a[0] + nrm[1] * a[1], a, b)
                })
                .collect(),
        )
    }

    fn compute_inner_radius(&self) -> f64 {
        let dim = self.vertices[0].len();
        if let Some(edges) = self.edges() {
            let r = edges.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            return r.max(0.0);
        }
        // the polytope contains the cross-polytope through its radial points
        // on the coordinate axes, which contains a ball of radius s/√n
        let mut s = f64::INFINITY;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = Vector::zeros(dim);
                e[i] = sign;
                let g = lp_vertex_gauge(&self.vertices, &e);
                s = s.min(if g > 0.0 { 1.0 / g } else { f64::INFINITY });
            }
        }
        if s.is_finite() {
            s / (dim as f64).sqrt()
        } else {
            0.0
        }
    }
}

impl ConvexBody for VertexPolytope {
    fn dim(&self) -> usize {
        self.vertices[0].len()
    }
    fn support(&self, u: &Vector) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }
    fn support_point(&self, u: &Vector) -> Vector {
        let mut best = 0;
        let mut val = f64::NEG_INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = v.dot(u);
            if d > val {
                val = d;
                best = i;
            }
        }
        self.vertices[best].clone()
    }
    fn gauge(&self, x: &Vector) -> f64 {
        if self.inner > 0.0 {
            if let Some(edges) = self.edges() {
                return edges
                    .iter()
                    .map(|(nrm, b, _, _)| (nrm[0] * x[0] + nrm[1] * x[1]) / b)
                    .fold(0.0, f64::max);
            }
        }
        lp_vertex_gauge(&self.vertices, x)
    }
    fn project(&self, x: &Vector) -> Vector {
        if let Some(edges) = self.edges() {
            if self.contains(x) {
                return x.clone();
            }
            let mut best = (f64::INFINITY, [0.0, 0.0]);
            for (_, _, a, b) in edges {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let t = (((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                let p = [a[0] + t * dx, a[1] + t * dy];
                let d = (x[0] - p[0]).hypot(x[1] - p[1]);
                if d < best.0 {
                    best = (d, p);
                }
            }
            return Vector::from_row_slice(&best.1);
        }
        super::algo::frank_wolfe_project(self, x).point
    }
    fn contains(&self, x: &Vector) -> bool {
        if let Some(edges) = self.edges() {
            return edges
                .iter()
                .all(|(nrm, b, _, _)| nrm[0] * x[0] + nrm[1] * x[1] <= b + MEMBERSHIP_TOL);
        }
        if self.hull.is_some() {
            // degenerate planar hull (segment or point)
            return super::algo::frank_wolfe_within(self, x, MEMBERSHIP_TOL);
        }
        lp_vertex_contains(&self.vertices, x)
    }
    fn inner_radius(&self) -> f64 {
        self.inner
    }
    fn outer_radius(&self) -> f64 {
        self.outer
    }
    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    fn vertices(&self) -> Option<&[Vector]> {
        Some(&self.vertices)
    }
}
