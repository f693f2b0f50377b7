//! Cap unions and subspheres, with exact geodesic distances from points of
//! the same or a higher-dimensional sphere.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::angle;
use crate::error::{Error, Result};
use crate::rng::uniform_sphere;
use crate::Vector;

/// Closed geodesic ball `{ y : d(y, center) ≤ radius }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapUnion {
    ambient: usize,
    centers: Vec<Vector>,
    radii: Vec<f64>,
}

impl CapUnion {
    pub fn new(caps: &[Cap]) -> Result<Self> {
        let first = caps.first().ok_or_else(|| Error::spec("caps", "need at least one cap"))?;
        let ambient = first.center.len();
        let mut centers = Vec::with_capacity(caps.len());
        let mut radii = Vec::with_capacity(caps.len());
        for c in caps {
            crate::bodies::check_dim(ambient, c.center.len())?;
            let v = Vector::from_column_slice(&c.center);
            let n = v.norm();
            if n == 0.0 {
                return Err(Error::spec("center", "must be nonzero"));
            }
            if !(c.radius >= 0.0 && c.radius <= std::f64::consts::PI) {
                return Err(Error::spec("radius", format!("must lie in [0, π], got {}", c.radius)));
            }
            centers.push(v / n);
            radii.push(c.radius);
        }
        Ok(Self { ambient, centers, radii })
    }

    /// `pairs` antipodal cap pairs with uniform centers on the sphere of
    /// `R^ambient` and radii uniform in `radius_range`.
    pub fn random_symmetric<R: Rng + ?Sized>(
        rng: &mut R,
        ambient: usize,
        pairs: usize,
        radius_range: (f64, f64),
    ) -> Self {
        let mut centers = Vec::with_capacity(2 * pairs);
        let mut radii = Vec::with_capacity(2 * pairs);
        for _ in 0..pairs {
            let c = uniform_sphere(rng, ambient);
            let r = rng.random_range(radius_range.0..=radius_range.1);
            centers.push(-&c);
            centers.push(c);
            radii.push(r);
            radii.push(r);
        }
        Self { ambient, centers, radii }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn caps(&self) -> Vec<Cap> {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(c, &r)| Cap { center: c.iter().copied().collect(), radius: r })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.centers.iter().zip(&self.radii).all(|(c, r)| {
            self.centers
                .iter()
                .zip(&self.radii)
                .any(|(d, s)| (c + d).amax() <= 1e-12 && (r - s).abs() <= 1e-12)
        })
    }

    /// `d(x, A)` for a unit `x` of the same sphere.
    fn distance_same(&self, x: &Vector) -> f64 {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(c, r)| (angle(x, c) - r).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A subset `A` of the sphere of `R^ambient`, evaluated either on its own
/// sphere or, through the canonical embedding, on any higher one.
#[derive(Debug, Clone, PartialEq)]
pub enum SphereSet {
    Caps(CapUnion),
    /// The great subsphere on the first `subsphere_dim + 1` axes.
    Subsphere { ambient: usize, subsphere_dim: usize },
}

impl SphereSet {
    pub fn ambient_dim(&self) -> usize {
        match self {
            SphereSet::Caps(c) => c.ambient,
            SphereSet::Subsphere { ambient, .. } => *ambient,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            SphereSet::Caps(c) => c.is_symmetric(),
            SphereSet::Subsphere { .. } => true,
        }
    }

    /// Geodesic distance from a unit `x ∈ R^m` (`m ≥ ambient`) to `A`.
    ///
    /// For caps, with `ρ = |Px|` and `x₁ = Px/ρ`, the nearest point of `A`
    /// to `x` is the nearest point to `x₁`, so `d(x, A) = acos(ρ cos d(x₁, A))`.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        let amb = self.ambient_dim();
        if x.len() < amb {
            return Err(Error::DimensionMismatch { expected: amb, got: x.len() });
        }
        Ok(match self {
            SphereSet::Subsphere { subsphere_dim, .. } => {
                let j = subsphere_dim + 1;
                x.rows(j, x.len() - j).norm().min(1.0).asin()
            }
            SphereSet::Caps(c) => {
                if x.len() == amb {
                    c.distance_same(x)
                } else {
                    let p = x.rows(0, amb).into_owned();
                    let rho = p.norm();
                    if rho <= 1e-300 {
                        std::f64::consts::FRAC_PI_2
                    } else {
                        let d1 = c.distance_same(&(p / rho));
                        if rho >= 1.0 {
                            d1
                        } else {
                            (rho * d1.cos()).clamp(-1.0, 1.0).acos()
                        }
                    }
                }
            }
        })
    }
}
