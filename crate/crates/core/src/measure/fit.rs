//! Grid sweep that brackets the admissible values of the unnamed constants.
//!
//! Every closed-form bound is monotone in its constant, so each grid point
//! yields either an upper limit on `c` or a lower limit on `C`. The shipped
//! defaults must sit inside the intersection of all limits.

use serde::{Deserialize, Serialize};

use super::{
    cap_angles, chisq_cdf, chisq_sf, sigma_exact, sigma_lip_lower, sigma_lip_lower_complement,
    SubsphereQuery,
};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitGrid {
    pub k_min: usize,
    pub k_max: usize,
    pub n_max: usize,
    pub eps: Vec<f64>,
    pub fact_k_max: usize,
    pub fact_m: Vec<f64>,
    pub fact_eps: Vec<f64>,
}

impl Default for FitGrid {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 20,
            n_max: 100,
            eps: (0..13).map(|i| 0.01 + 0.04 * i as f64).collect(),
            fact_k_max: 20,
            fact_m: vec![2.0, 3.0, 4.0],
            fact_eps: (1..=10).map(|i| 0.05 * i as f64).collect(),
        }
    }
}

/// The tightest limit found for one constant and where it binds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Limit {
    pub value: f64,
    pub check: String,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOutcome {
    /// Largest admissible `c` (all checks).
    pub c_small_max: Limit,
    /// Smallest admissible `C` (all checks).
    pub c_big_min: Limit,
}

impl FitOutcome {
    pub fn admits(&self, c_small: f64, c_big: f64) -> bool {
        c_small <= self.c_small_max.value && c_big >= self.c_big_min.value
    }
}

struct Tracker {
    c_max: Limit,
    big_min: Limit,
}

impl Tracker {
    fn upper_c(&mut self, v: f64, check: &str, n: usize, k: usize, eps: f64) {
        if v < self.c_max.value {
            self.c_max = Limit { value: v, check: check.into(), n, k, eps };
        }
    }

    fn lower_big(&mut self, v: f64, check: &str, n: usize, k: usize, eps: f64) {
        if v > self.big_min.value {
            self.big_min = Limit { value: v, check: check.into(), n, k, eps };
        }
    }
}

/// Sweeps the cap lemma (both forms), the waist corollary (both parts) and
/// the two chi-square facts over `grid`. Grid points with `k = n` are skipped:
/// the subsphere `S^{n−k−1}` is empty there.
pub fn admissible_constants(grid: &FitGrid) -> Result<FitOutcome> {
    let mut t = Tracker {
        c_max: Limit { value: f64::INFINITY, check: String::new(), n: 0, k: 0, eps: 0.0 },
        big_min: Limit { value: 0.0, check: String::new(), n: 0, k: 0, eps: 0.0 },
    };
    for k in grid.k_min.max(2)..=grid.k_max {
        let kf = k as f64;
        for n in (k + 1)..=grid.n_max {
            for &eps in &grid.eps {
                let (direct, compl) = cap_angles(n, k, eps);
                let s = sigma_exact(&SubsphereQuery::new(n - 1, n - k - 1, direct)?);
                // (cε)^{2k} ≤ σ and, from the complement form, (cε)^k ≤ σ
                t.upper_c(s.powf(1.0 / (2.0 * kf)) / eps, "cap lower", n, k, eps);
                t.upper_c(s.powf(1.0 / kf) / eps, "cap complement upper", n, k, eps);
                // σ ≤ (Cε)^{k/2}
                t.lower_big(s.powf(2.0 / kf) / eps, "cap upper", n, k, eps);
                if k + 2 <= n {
                    let lip = sigma_lip_lower(n - 1, n - k - 1, direct)?;
                    t.upper_c(lip.powf(1.0 / (8.0 * kf)) / eps, "lip (i)", n, k, eps);
                }
                let miss = sigma_lip_lower_complement(n - 1, k - 1, compl)?;
                t.lower_big(miss.powf(4.0 / kf) / eps, "lip (ii)", n, k, eps);
            }
        }
    }
    for k in 1..=grid.fact_k_max {
        let kf = k as f64;
        for &m in &grid.fact_m {
            let p = chisq_sf(k, m * m * kf)?;
            t.upper_c(-(p / 2.0).ln() / (m * m * kf), "gaussian tail", k, k, m);
        }
        for &eps in &grid.fact_eps {
            let p = chisq_cdf(k, eps * eps * kf)?;
            let root = p.powf(1.0 / kf) / eps;
            t.upper_c(root, "small ball lower", k, k, eps);
            t.lower_big(root, "small ball upper", k, k, eps);
        }
    }
    Ok(FitOutcome {
        c_small_max: t.c_max,
        c_big_min: t.big_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::BoundConstants;

    #[test]
    fn defaults_are_admissible_on_a_coarse_grid() {
        let grid = FitGrid {
            k_max: 6,
            n_max: 30,
            eps: vec![0.01, 0.21, 0.49],
            fact_k_max: 6,
            ..FitGrid::default()
        };
        let fit = admissible_constants(&grid).unwrap();
        let c = BoundConstants::default();
        assert!(fit.admits(c.c_small, c.c_big), "{fit:?}");
    }
}
