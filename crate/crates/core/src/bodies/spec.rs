//! Declarative body descriptions and their construction.

use serde::{Deserialize, Serialize};

use super::catalog::{
    Ball, CrossPolytope, Cube, Ellipsoid, Point, Product, SlabIntersection, VertexPolytope,
};
use super::combinators::{
    difference_body, intersect, minkowski_sum, neighborhood, polar, rotate_body, scale_body,
    translate_body,
};
use super::{Body, DEFAULT_TRUNCATION};
use crate::error::{Error, Result};
use crate::{Matrix, Vector};

fn one() -> f64 {
    1.0
}

fn default_truncation() -> f64 {
    DEFAULT_TRUNCATION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slab {
    pub normal: Vec<f64>,
    pub width: f64,
}

/// JSON form: an object with a `kind` tag and the parameters of that kind,
/// e.g. `{"kind": "cube", "dim": 3, "half_width": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Cube {
        dim: usize,
        #[serde(default = "one")]
        half_width: f64,
    },
    CrossPolytope {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipsoid {
        semiaxes: Vec<f64>,
    },
    SlabIntersection {
        slabs: Vec<Slab>,
    },
    /// `first × second` on split coordinates.
    Product {
        first: Box<BodySpec>,
        second: Box<BodySpec>,
    },
    VertexPolytope {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        symmetric: bool,
    },
    /// `core × (transverse_radius·D)` in `core_dim + extra_dim` dimensions; an
    /// omitted transverse radius means the unbounded cylinder, cut off at
    /// `truncation`.
    TruncatedCylinder {
        core: Box<BodySpec>,
        extra_dim: usize,
        #[serde(default)]
        transverse_radius: Option<f64>,
        #[serde(default = "default_truncation")]
        truncation: f64,
    },
    Point {
        dim: usize,
    },
    /// `radius·B₂ᵏ × {0}` in `Rⁿ`.
    SubspaceBall {
        dim: usize,
        k: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Scaled {
        body: Box<BodySpec>,
        factor: f64,
    },
    Translated {
        body: Box<BodySpec>,
        offset: Vec<f64>,
    },
    /// Row-major orthogonal matrix.
    Rotated {
        body: Box<BodySpec>,
        matrix: Vec<Vec<f64>>,
    },
    Intersection {
        bodies: Vec<BodySpec>,
    },
    MinkowskiSum {
        bodies: Vec<BodySpec>,
    },
    Neighborhood {
        body: Box<BodySpec>,
        eps: f64,
    },
    Polar {
        body: Box<BodySpec>,
    },
    Difference {
        body: Box<BodySpec>,
    },
}

fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

fn fold_bodies(bodies: &[BodySpec], field: &str, op: fn(&Body, &Body) -> Result<Body>) -> Result<Body> {
    let mut it = bodies.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::spec(field, "needs at least one body"))?;
    let mut acc = construct_body(first)?;
    for b in it {
        acc = op(&acc, &construct_body(b)?)?;
    }
    Ok(acc)
}

pub fn construct_body(spec: &BodySpec) -> Result<Body> {
    Ok(match spec {
        BodySpec::Ball { dim, radius } => Body::new(Ball::new(*dim, *radius)?),
        BodySpec::Cube { dim, half_width } => Body::new(Cube::new(*dim, *half_width)?),
        BodySpec::CrossPolytope { dim, radius } => Body::new(CrossPolytope::new(*dim, *radius)?),
        BodySpec::Ellipsoid { semiaxes } => Body::new(Ellipsoid::new(semiaxes.clone())?),
        BodySpec::SlabIntersection { slabs } => Body::new(SlabIntersection::new(
            slabs.iter().map(|s| vector(&s.normal)).collect(),
            slabs.iter().map(|s| s.width).collect(),
        )?),
        BodySpec::Product { first, second } => {
            Body::new(Product::new(construct_body(first)?, construct_body(second)?))
        }
        BodySpec::VertexPolytope { vertices, symmetric } => {
            let poly = VertexPolytope::new(vertices.iter().map(|v| vector(v)).collect())?;
            if *symmetric && !crate::bodies::ConvexBody::is_symmetric(&poly) {
                return Err(Error::spec("vertices", "symmetric flag set but the list is not closed under negation"));
            }
            Body::new(poly)
        }
        BodySpec::TruncatedCylinder { core, extra_dim, transverse_radius, truncation } => {
            if *extra_dim == 0 {
                return Err(Error::spec("extra_dim", "must be at least 1"));
            }
            if !(*truncation > 0.0) {
                return Err(Error::spec("truncation", "must be positive"));
            }
            let core = construct_body(core)?;
            match transverse_radius {
                Some(t) if *t <= *truncation => {
                    Body::new(Product::new(core, Body::new(Ball::new(*extra_dim, *t)?)))
                }
                Some(t) if !(*t > 0.0) => return Err(Error::spec("transverse_radius", "must be positive")),
                _ => Body::new(Product::truncated(
                    core,
                    Body::new(Ball::new(*extra_dim, *truncation)?),
                    *truncation,
                )),
            }
        }
        BodySpec::Point { dim } => Body::new(Point::new(*dim)?),
        BodySpec::SubspaceBall { dim, k, radius } => {
            if *k == 0 || k > dim {
                return Err(Error::spec("k", format!("need 1 ≤ k ≤ dim, got k={k}, dim={dim}")));
            }
            let ball = Body::new(Ball::new(*k, *radius)?);
            if k == dim {
                ball
            } else {
                Body::new(Product::new(ball, Body::new(Point::new(dim - k)?)))
            }
        }
        BodySpec::Scaled { body, factor } => scale_body(&construct_body(body)?, *factor)?,
        BodySpec::Translated { body, offset } => translate_body(&construct_body(body)?, &vector(offset))?,
        BodySpec::Rotated { body, matrix } => {
            let n = matrix.len();
            if matrix.iter().any(|r| r.len() != n) {
                return Err(Error::spec("matrix", "must be square"));
            }
            let m = Matrix::from_fn(n, n, |i, j| matrix[i][j]);
            rotate_body(&construct_body(body)?, &m)?
        }
        BodySpec::Intersection { bodies } => fold_bodies(bodies, "bodies", intersect)?,
        BodySpec::MinkowskiSum { bodies } => fold_bodies(bodies, "bodies", minkowski_sum)?,
        BodySpec::Neighborhood { body, eps } => neighborhood(&construct_body(body)?, *eps)?,
        BodySpec::Polar { body } => polar(&construct_body(body)?)?,
        BodySpec::Difference { body } => difference_body(&construct_body(body)?)?,
    })
}

impl BodySpec {
    pub fn build(&self) -> Result<Body> {
        construct_body(self)
    }

    /// Ambient dimension (builds the body, so also validates it).
    pub fn dim(&self) -> Result<usize> {
        Ok(self.build()?.dim())
    }
}
