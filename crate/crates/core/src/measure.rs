//! Measures of geodesic neighborhoods of great subspheres, the waist lower
//! bound, closed-form cap bounds and the chi-square facts behind them.
//!
//! Conventions: `S^m` is the unit sphere of `R^{m+1}` (manifold dimension
//! `m`), the canonical subsphere `S^j` is spanned by the first `j + 1`
//! coordinates, and `σ_{m,j}(θ)` is the normalized measure of its closed
//! `θ`-neighborhood.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::special::{beta_reg_pair, beta_reg_upper_pair, gamma_p, gamma_q};

pub mod fit;

/// Parameters of `σ_{m,j}(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsphereQuery {
    sphere_dim: usize,
    subsphere_dim: usize,
    theta: f64,
}

impl SubsphereQuery {
    pub fn new(sphere_dim: usize, subsphere_dim: usize, theta: f64) -> Result<Self> {
        if sphere_dim < 1 {
            return Err(Error::domain("sphere dimension must be at least 1"));
        }
        if subsphere_dim >= sphere_dim {
            return Err(Error::domain(format!(
                "subsphere dimension {subsphere_dim} must be below sphere dimension {sphere_dim}"
            )));
        }
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::domain(format!("theta {theta} outside (0, pi/2]")));
        }
        Ok(Self {
            sphere_dim,
            subsphere_dim,
            theta,
        })
    }

    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn subsphere_dim(&self) -> usize {
        self.subsphere_dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Beta parameters `((m - j)/2, (j + 1)/2)` of the squared distance sine.
    fn beta_params(&self) -> (f64, f64) {
        (
            (self.sphere_dim - self.subsphere_dim) as f64 / 2.0,
            (self.subsphere_dim + 1) as f64 / 2.0,
        )
    }

    fn sin_cos_sq(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        if self.theta == FRAC_PI_2 {
            (1.0, 0.0)
        } else {
            (s * s, c * c)
        }
    }
}

/// Exact `σ_{m,j}(θ) = I_{sin²θ}((m−j)/2, (j+1)/2)`.
///
/// The squared norm of the component of a uniform point orthogonal to the
/// subsphere's span is `Beta((m−j)/2, (j+1)/2)` distributed, and the point is
/// within geodesic distance `θ` exactly when that norm is at most `sin θ`.
pub fn sigma_exact(q: &SubsphereQuery) -> f64 {
    let (a, b) = q.beta_params();
    let (s2, c2) = q.sin_cos_sq();
    beta_reg_pair(a, b, s2, c2)
}

/// `1 − σ_{m,j}(θ)` evaluated without cancellation.
pub fn sigma_exact_complement(q: &SubsphereQuery) -> f64 {
    let (a, b) = q.beta_params();
    let (s2, c2) = q.sin_cos_sq();
    beta_reg_upper_pair(a, b, s2, c2)
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_hits(hits: u64, samples: usize) -> Self {
        if samples == 0 {
            return Self {
                estimate: 0.0,
                standard_error: 0.0,
                samples,
            };
        }
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p,
            standard_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }

    /// `|estimate − value|` measured in standard errors (∞ when SE = 0 and
    /// the values differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.estimate - value).abs();
        // exact estimates (SE = 0) are compared up to roundoff
        if diff <= 1e-12 * value.abs().max(1.0) && self.standard_error == 0.0 || diff == 0.0 {
            0.0
        } else if self.standard_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.standard_error
        }
    }
}

/// Counts, in parallel and reproducibly, how many of `samples` draws satisfy
/// `hit`. Each chunk of [`rng::CHUNK`] samples owns an independent stream.
pub(crate) fn parallel_hits<F>(samples: usize, seed: u64, label: &str, hit: F) -> u64
where
    F: Fn(&mut rng::StreamRng) -> bool + Sync,
{
    rng::chunk_sizes(samples)
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut r = rng::stream(seed, label, i as u64);
            (0..size).filter(|_| hit(&mut r)).count() as u64
        })
        .sum()
}

/// Monte-Carlo oracle for [`sigma_exact`]: uniform points on `S^m` tested by
/// their geodesic distance `arcsin |P⊥x|` to the canonical `S^j`.
pub fn sigma_mc(q: &SubsphereQuery, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let ambient = q.sphere_dim + 1;
    let split = q.subsphere_dim + 1;
    let theta = q.theta;
    let hits = parallel_hits(samples, seed, "sigma_mc", |r| {
        let x = rng::uniform_sphere(r, ambient);
        let orth = x.rows(split, ambient - split).norm().min(1.0);
        orth.asin() <= theta
    });
    Ok(McEstimate::from_hits(hits, samples))
}

/// Right-hand side of the relaxed waist inequality,
/// `σ^Lip_{n,k}(θ) ≥ σ_{2n−k+1, k−1}(θ)`.
pub fn sigma_lip_lower(n: usize, k: usize, theta: f64) -> Result<f64> {
    if k < 1 || k >= n {
        return Err(Error::domain(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    let q = SubsphereQuery::new(2 * n - k + 1, k - 1, theta)?;
    Ok(sigma_exact(&q))
}

/// `1 − sigma_lip_lower(n, k, θ)` without cancellation.
pub fn sigma_lip_lower_complement(n: usize, k: usize, theta: f64) -> Result<f64> {
    if k < 1 || k >= n {
        return Err(Error::domain(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    let q = SubsphereQuery::new(2 * n - k + 1, k - 1, theta)?;
    Ok(sigma_exact_complement(&q))
}

/// The unnamed absolute constants of the bounds, plus the parameters of the
/// diameter schedule.
///
/// The defaults for `c_small` and `c_big` come from the grid sweep in
/// [`fit::admissible_constants`] with a safety margin; see the README.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConstants {
    pub c_small: f64,
    pub c_big: f64,
    pub c1_sched: f64,
    pub c2_sched: f64,
    pub a_frac: f64,
}

impl BoundConstants {
    pub const DEFAULT_C_SMALL: f64 = 0.1;
    pub const DEFAULT_C_BIG: f64 = 3.0;

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_small", self.c_small),
            ("c_big", self.c_big),
            ("c1_sched", self.c1_sched),
            ("c2_sched", self.c2_sched),
            ("a_frac", self.a_frac),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.a_frac >= 1.0 {
            return Err(Error::domain(format!(
                "a_frac must lie in (0, 1), got {}",
                self.a_frac
            )));
        }
        Ok(())
    }

    pub fn with_cs(c_small: f64, c_big: f64) -> Self {
        Self {
            c_small,
            c_big,
            ..Self::default()
        }
    }
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c_small: Self::DEFAULT_C_SMALL,
            c_big: Self::DEFAULT_C_BIG,
            c1_sched: 1.0,
            c2_sched: 0.5,
            a_frac: 1.0 / 33.0,
        }
    }
}

fn clamp01(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn check_cap_domain(n: usize, k: usize, eps: f64) -> Result<()> {
    if !(1 < k && k <= n) {
        return Err(Error::domain(format!("need 1 < k <= n, got n={n}, k={k}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain(format!("eps {eps} outside (0, 1/2)")));
    }
    Ok(())
}

/// Angles `arcsin √(ε²k/n)` and `arcsin √(1 − ε²k/n)` at which the cap
/// lemma is stated.
pub fn cap_angles(n: usize, k: usize, eps: f64) -> (f64, f64) {
    let r = eps * eps * k as f64 / n as f64;
    (r.sqrt().asin(), (1.0 - r).sqrt().asin())
}

/// Closed-form sides of the cap lemma and of its complement form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapBounds {
    /// `(c ε)^{2k}`
    pub lower: f64,
    /// `(C ε)^{k/2}`
    pub upper: f64,
    /// `1 − (C ε)^{k/2}`
    pub lower_compl: f64,
    /// `1 − (c ε)^k`
    pub upper_compl: f64,
}

pub fn cap_bounds(n: usize, k: usize, eps: f64, consts: &BoundConstants) -> Result<CapBounds> {
    check_cap_domain(n, k, eps)?;
    let kf = k as f64;
    let small = consts.c_small * eps;
    let big = consts.c_big * eps;
    Ok(CapBounds {
        lower: clamp01(small.powf(2.0 * kf)),
        upper: clamp01(big.powf(kf / 2.0)),
        lower_compl: clamp01(1.0 - big.powf(kf / 2.0)),
        upper_compl: clamp01(1.0 - small.powf(kf)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipBounds {
    /// `(c ε)^{8k}`, a lower bound for `σ^Lip_{n−1,n−k−1}(arcsin √(ε²k/n))`.
    pub bound_i: f64,
    /// `1 − (C ε)^{k/4}`, a lower bound for `σ^Lip_{n−1,k−1}(arcsin √(1−ε²k/n))`.
    pub bound_ii: f64,
}

pub fn lip_bounds(n: usize, k: usize, eps: f64, consts: &BoundConstants) -> Result<LipBounds> {
    check_cap_domain(n, k, eps)?;
    let kf = k as f64;
    Ok(LipBounds {
        bound_i: clamp01((consts.c_small * eps).powf(8.0 * kf)),
        bound_ii: clamp01(1.0 - (consts.c_big * eps).powf(kf / 4.0)),
    })
}

/// CDF of the chi-square law with `k` degrees of freedom.
pub fn chisq_cdf(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("chi-square needs k >= 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("chi-square argument {x} is negative")));
    }
    Ok(gamma_p(k as f64 / 2.0, x / 2.0))
}

/// Survival function `P{χ²_k > x}` without cancellation.
pub fn chisq_sf(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("chi-square needs k >= 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("chi-square argument {x} is negative")));
    }
    Ok(gamma_q(k as f64 / 2.0, x / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    /// `P{g₁² + … + g_k² > M²k}`
    pub probability: f64,
    /// `2 e^{−c M² k}`
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallCheck {
    /// `(c ε)^k`
    pub lower: f64,
    /// `P{g₁² + … + g_k² ≤ ε²k}`
    pub probability: f64,
    /// `(C ε)^k`
    pub upper: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFactReport {
    pub tail: TailCheck,
    pub small_ball: SmallBallCheck,
}

impl GaussianFactReport {
    pub fn tail_ok(&self) -> bool {
        self.tail.ok
    }

    pub fn smallball_ok(&self) -> bool {
        self.small_ball.ok
    }
}

/// Evaluates both chi-square facts exactly and compares them with the
/// closed forms at the supplied constants.
pub fn gaussian_fact_check(
    k: usize,
    m: f64,
    eps: f64,
    consts: &BoundConstants,
) -> Result<GaussianFactReport> {
    if !(m >= 2.0) {
        return Err(Error::domain(format!("tail check needs M >= 2, got {m}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("small-ball check needs eps > 0, got {eps}")));
    }
    let kf = k as f64;
    let tail_p = chisq_sf(k, m * m * kf)?;
    let tail_bound = 2.0 * (-consts.c_small * m * m * kf).exp();
    let ball_p = chisq_cdf(k, eps * eps * kf)?;
    let lower = (consts.c_small * eps).powf(kf);
    let upper = (consts.c_big * eps).powf(kf);
    Ok(GaussianFactReport {
        tail: TailCheck {
            probability: tail_p,
            bound: tail_bound,
            ok: tail_p <= tail_bound,
        },
        small_ball: SmallBallCheck {
            lower,
            probability: ball_p,
            upper,
            ok: lower <= ball_p && ball_p <= upper,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

    fn q(m: usize, j: usize, t: f64) -> SubsphereQuery {
        SubsphereQuery::new(m, j, t).unwrap()
    }

    #[test]
    fn sigma_exact_anchors() {
        // band of half-width θ around a great circle of S²: area fraction sin θ
        assert_abs_diff_eq!(sigma_exact(&q(2, 1, FRAC_PI_6)), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma_exact(&q(3, 1, 0.5f64.asin())), 0.25, epsilon = 1e-12);
        assert_eq!(sigma_exact(&q(5, 4, FRAC_PI_2)), 1.0);
        // two arcs of half-width θ on the circle
        assert_abs_diff_eq!(sigma_exact(&q(1, 0, FRAC_PI_4)), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn two_cap_value() {
        // caps of radius 30° around ±e₁ on S²
        let want = 1.0 - (PI / 6.0).cos();
        assert_abs_diff_eq!(sigma_exact(&q(2, 0, FRAC_PI_6)), want, epsilon = 1e-13);
        assert_abs_diff_eq!(want, 0.13397, epsilon = 1e-5);
    }

    #[test]
    fn query_domain_errors() {
        assert!(SubsphereQuery::new(3, 3, 0.1).is_err());
        assert!(SubsphereQuery::new(3, 1, 0.0).is_err());
        assert!(SubsphereQuery::new(3, 1, 1.6).is_err());
        assert!(SubsphereQuery::new(0, 0, 0.1).is_err());
    }

    #[test]
    fn complement_matches_direct() {
        let query = q(17, 5, 0.4);
        assert_abs_diff_eq!(
            sigma_exact(&query) + sigma_exact_complement(&query),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sigma_mc_close_and_deterministic() {
        let query = q(2, 1, FRAC_PI_6);
        let a = sigma_mc(&query, 200_000, 11).unwrap();
        let b = sigma_mc(&query, 200_000, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.z_score(0.5) < 4.0, "{a:?}");
        let circle = sigma_mc(&q(1, 0, FRAC_PI_4), 200_000, 3).unwrap();
        assert!(circle.z_score(0.5) < 4.0);
        assert!(sigma_mc(&query, 0, 1).is_err());
    }

    #[test]
    fn sigma_lip_lower_examples() {
        assert_abs_diff_eq!(sigma_lip_lower(3, 2, FRAC_PI_6).unwrap(), 0.0625, epsilon = 1e-13);
        assert_eq!(sigma_lip_lower(3, 2, FRAC_PI_2).unwrap(), 1.0);
        assert!(sigma_lip_lower(3, 3, 0.1).is_err());
        assert!(sigma_lip_lower(3, 0, 0.1).is_err());
    }

    #[test]
    fn cap_bounds_arithmetic() {
        let b = cap_bounds(8, 2, 0.25, &BoundConstants::with_cs(0.1, 2.0)).unwrap();
        assert_abs_diff_eq!(b.lower, 3.90625e-7, epsilon = 1e-18);
        assert_abs_diff_eq!(b.upper, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper + b.lower_compl, 1.0, epsilon = 1e-15);
        assert!(cap_bounds(8, 1, 0.25, &BoundConstants::default()).is_err());
        assert!(cap_bounds(8, 9, 0.25, &BoundConstants::default()).is_err());
        assert!(cap_bounds(8, 2, 0.5, &BoundConstants::default()).is_err());
    }

    #[test]
    fn cap_sandwich_at_spec_constants() {
        let consts = BoundConstants::with_cs(0.01, 30.0);
        let b = cap_bounds(8, 2, 0.25, &consts).unwrap();
        let (theta, _) = cap_angles(8, 2, 0.25);
        let s = sigma_exact(&q(7, 5, theta));
        assert!(b.lower <= s && s <= b.upper, "{b:?} {s}");
    }

    #[test]
    fn lip_bounds_arithmetic_and_clamp() {
        let b = lip_bounds(16, 4, 0.1, &BoundConstants::with_cs(0.05, 10.0)).unwrap();
        assert_relative_eq!(b.bound_i, 0.005f64.powi(32), max_relative = 1e-13);
        assert_eq!(b.bound_ii, 0.0);
        let big = lip_bounds(16, 4, 0.4, &BoundConstants::with_cs(0.05, 10.0)).unwrap();
        assert_eq!(big.bound_ii, 0.0);
        let (theta, _) = cap_angles(16, 4, 0.1);
        let lower = sigma_lip_lower(15, 11, theta).unwrap();
        let c = lip_bounds(16, 4, 0.1, &BoundConstants::with_cs(0.01, 10.0)).unwrap();
        assert!(c.bound_i <= lower);
    }

    #[test]
    fn chisq_anchors() {
        assert_abs_diff_eq!(chisq_cdf(2, 2.0).unwrap(), 1.0 - (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(chisq_cdf(1, 1.0).unwrap(), 0.682_689_492_137_085_9, epsilon = 1e-12);
        assert_eq!(chisq_cdf(5, 0.0).unwrap(), 0.0);
        assert!(chisq_cdf(5, -1.0).is_err());
        assert!(chisq_cdf(0, 1.0).is_err());
    }

    #[test]
    fn gaussian_fact_examples() {
        let r = gaussian_fact_check(1, 2.0, 0.2, &BoundConstants::with_cs(0.3, 2.0)).unwrap();
        assert_abs_diff_eq!(r.tail.probability, 0.0455, epsilon = 1e-4);
        assert!(r.tail_ok());
        let r = gaussian_fact_check(3, 2.0, 0.2, &BoundConstants::with_cs(0.1, 2.0)).unwrap();
        assert!(r.smallball_ok(), "{r:?}");
        assert!(gaussian_fact_check(3, 1.5, 0.2, &BoundConstants::default()).is_err());
        assert!(gaussian_fact_check(3, 2.0, 0.0, &BoundConstants::default()).is_err());
    }

    #[test]
    fn small_ball_vanishes_with_eps() {
        let consts = BoundConstants::default();
        let mut last = 1.0;
        for eps in [0.1, 0.01, 0.001, 1e-4] {
            let r = gaussian_fact_check(4, 2.0, eps, &consts).unwrap();
            assert!(r.small_ball.probability < last);
            assert!(r.small_ball.upper < 1e-2 || eps > 1e-3);
            last = r.small_ball.probability;
        }
    }

    #[test]
    fn constants_validation() {
        assert!(BoundConstants::default().validate().is_ok());
        let mut c = BoundConstants::default();
        c.a_frac = 1.5;
        assert!(c.validate().is_err());
        c.a_frac = 0.02;
        c.c_small = 0.0;
        assert!(c.validate().is_err());
    }
}
