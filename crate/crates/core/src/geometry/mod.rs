//! Rotations, subspaces and geodesic geometry on the sphere.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::{Matrix, Vector};

mod caps;
mod lift;
mod net;

pub use caps::{Cap, CapUnion, SphereSet};
pub use lift::{lift_waist, segment_cap_check, segment_distance, verify_projection_hypothesis, WaistPoint};
pub use net::{build_net, build_net_with, cached_net, estimated_cardinality, NetOptions, SphereNet};

/// Residual bound for orthogonal matrices and orthonormal frames.
pub const ORTHO_TOL: f64 = 1e-10;

/// How far from unit length an input to [`geodesic_distance`] may be.
pub const UNIT_TOL: f64 = 1e-8;

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize) -> Result<Matrix> {
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::spec("matrix", "ragged rows"));
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// An orthogonal `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Rotation {
    matrix: Matrix,
}

impl Rotation {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::spec("rotation", "matrix must be square"));
        }
        let res = crate::bodies::orthogonality_residual(&matrix);
        if !(res <= ORTHO_TOL) {
            return Err(Error::NotOrthogonal(res));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n, n) }
    }

    /// Haar-distributed element of `O(n)` drawn from `rng`.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let g = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        // the sign fix lands in SO(n) or its coset depending on n; a fair
        // reflection of the last column makes the law uniform on O(n)
        if rng.random::<bool>() {
            q.column_mut(n - 1).neg_mut();
        }
        Self { matrix: q }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn residual(&self) -> f64 {
        crate::bodies::orthogonality_residual(&self.matrix)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    pub fn apply_transpose(&self, x: &Vector) -> Vector {
        self.matrix.tr_mul(x)
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation { matrix: &self.matrix * &other.matrix }
    }

    pub fn transpose(&self) -> Rotation {
        Rotation { matrix: self.matrix.transpose() }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Rotation {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        Rotation::new(matrix_from_rows(&rows, n)?)
    }
}

impl From<Rotation> for Vec<Vec<f64>> {
    fn from(r: Rotation) -> Self {
        rows_of(&r.matrix)
    }
}

pub fn haar_rotation(n: usize, seed: u64) -> Result<Rotation> {
    if n == 0 {
        return Err(Error::domain("rotation dimension must be at least 1"));
    }
    Ok(Rotation::haar(&mut rng::stream(seed, "haar_rotation", 0), n))
}

/// `k` orthonormal rows spanning a subspace `E ⊂ Rⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct Subspace {
    frame: Matrix,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    ambient_dim: usize,
    rows: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(frame: Matrix) -> Result<Self> {
        let (k, n) = frame.shape();
        if k == 0 || k > n {
            return Err(Error::spec("frame", format!("need 1 ≤ k ≤ n, got {k}×{n}")));
        }
        let res = (&frame * frame.transpose() - Matrix::identity(k, k)).amax();
        if !(res <= ORTHO_TOL) {
            return Err(Error::NotOrthogonal(res));
        }
        Ok(Self { frame })
    }

    /// Span of the listed coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let mut frame = Matrix::zeros(axes.len(), n);
        for (r, &a) in axes.iter().enumerate() {
            if a >= n {
                return Err(Error::spec("axes", format!("axis {a} out of range for dimension {n}")));
            }
            frame[(r, a)] = 1.0;
        }
        Self::new(frame)
    }

    /// Span of the first `k` axes.
    pub fn leading(n: usize, k: usize) -> Result<Self> {
        Self::coordinate(n, &(0..k).collect::<Vec<_>>())
    }

    /// Uniform `k`-dimensional subspace: the first `k` rows of a Haar rotation.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::spec("k", format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
        }
        let u = Rotation::haar(rng, n);
        Ok(Self { frame: u.matrix.rows(0, k).into_owned() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    /// Coordinates `Fx ∈ Rᵏ` of the orthogonal projection of `x`.
    pub fn coords(&self, x: &Vector) -> Vector {
        &self.frame * x
    }

    /// `Fᵀz ∈ Rⁿ` for coordinates `z ∈ Rᵏ`.
    pub fn embed(&self, z: &Vector) -> Vector {
        self.frame.tr_mul(z)
    }

    /// Orthogonal projection `FᵀFx` as a vector of `Rⁿ`.
    pub fn project(&self, x: &Vector) -> Vector {
        self.embed(&self.coords(x))
    }

    pub fn rotated(&self, u: &Rotation) -> Subspace {
        Subspace { frame: &self.frame * u.matrix.transpose() }
    }

    pub fn gram_residual(&self) -> f64 {
        let k = self.dim();
        (&self.frame * self.frame.transpose() - Matrix::identity(k, k)).amax()
    }
}

impl TryFrom<FrameRepr> for Subspace {
    type Error = Error;

    fn try_from(r: FrameRepr) -> Result<Self> {
        Subspace::new(matrix_from_rows(&r.rows, r.ambient_dim)?)
    }
}

impl From<Subspace> for FrameRepr {
    fn from(s: Subspace) -> Self {
        FrameRepr { ambient_dim: s.ambient_dim(), rows: rows_of(&s.frame) }
    }
}

pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    Subspace::random(&mut rng::stream(seed, "random_subspace", 0), n, k)
}

fn unit(x: &Vector) -> Result<Vector> {
    let n = x.norm();
    if n == 0.0 {
        return Err(Error::domain("zero vector has no direction"));
    }
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::domain(format!("expected a unit vector, got norm {n}")));
    }
    Ok(x / n)
}

/// `arccos⟨x, y⟩` for unit vectors (renormalized when within 1e-8 of unit
/// length).
pub fn geodesic_distance(x: &Vector, y: &Vector) -> Result<f64> {
    crate::bodies::check_dim(x.len(), y.len())?;
    Ok(angle(&unit(x)?, &unit(y)?))
}

/// Geodesic distance between unit vectors without validation. Uses the
/// chord for small angles, where `acos` loses half the digits.
pub(crate) fn angle(x: &Vector, y: &Vector) -> f64 {
    let c = x.dot(y);
    if c > 0.9 {
        2.0 * ((x - y).norm() / 2.0).min(1.0).asin()
    } else if c < -0.9 {
        std::f64::consts::PI - 2.0 * ((x + y).norm() / 2.0).min(1.0).asin()
    } else {
        c.clamp(-1.0, 1.0).acos()
    }
}

/// `x₁ = Pₙx / |Pₙx|`: normalized projection onto the first `n_sub`
/// coordinates.
pub fn spherical_projection(x: &Vector, n_sub: usize) -> Result<Vector> {
    if n_sub == 0 || n_sub > x.len() {
        return Err(Error::domain(format!(
            "target dimension {n_sub} outside 1..={}",
            x.len()
        )));
    }
    let p = x.rows(0, n_sub).into_owned();
    let norm = p.norm();
    if norm <= 1e-12 {
        return Err(Error::UndefinedProjection);
    }
    Ok(p / norm)
}

#[cfg(test)]
mod tests;
