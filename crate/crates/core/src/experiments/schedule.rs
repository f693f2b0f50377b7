use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::BoundConstants;

/// The proof takes `a < 1/33`; larger `a` is allowed but flagged.
pub const PROVEN_A_BOUND: f64 = 1.0 / 33.0;

/// Schedule block of a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub a_frac: f64,
    pub c1_sched: f64,
    pub c2_sched: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let c = BoundConstants::default();
        Self { a_frac: c.a_frac, c1_sched: c.c1_sched, c2_sched: c.c2_sched }
    }
}

impl ScheduleConfig {
    pub fn constants(&self) -> BoundConstants {
        BoundConstants { a_frac: self.a_frac, c1_sched: self.c1_sched, c2_sched: self.c2_sched, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub n: usize,
    pub k: usize,
    pub a_frac: f64,
    pub c1_sched: f64,
    pub c2_sched: f64,
    pub eps_k: f64,
    pub delta_k: f64,
    pub eps_l: f64,
    pub delta_l: f64,
    /// `1 − δ_K − 2δ_L`, the radius of the ball guaranteed inside `K + 2UL`.
    pub guaranteed_radius: f64,
    /// `2e^{1.2n}`, the covering estimate used with the schedule.
    pub covering_estimate: f64,
    /// Whether `a < 1/33`, the range the proof assumes.
    pub proven_regime: bool,
}

/// `ε_K = e^{−C₁n/k}`, `δ_K = √(1 − ε_K²k/n)`, `ε_L = e^{−c₂n/(ak)}`,
/// `δ_L = √(ε_L²ak/n)`, requiring `ak ≥ 1` and `δ_K + 2δ_L < 1`.
pub fn theorem_schedule(n: usize, k: usize, consts: &BoundConstants) -> Result<ScheduleParams> {
    consts.validate()?;
    if !(1 <= k && k <= n) {
        return Err(Error::domain(format!("need 1 ≤ k ≤ n, got n={n}, k={k}")));
    }
    let (nf, kf, a) = (n as f64, k as f64, consts.a_frac);
    if a * kf < 1.0 {
        return Err(Error::InfeasibleSchedule(format!("a·k = {} < 1 (a = {a}, k = {k})", a * kf)));
    }
    let eps_k = (-consts.c1_sched * nf / kf).exp();
    let x = eps_k * eps_k * kf / nf;
    let delta_k = (1.0 - x).sqrt();
    // 1 − √(1 − x) without cancellation
    let gap_k = x / (1.0 + delta_k);
    let eps_l = (-consts.c2_sched * nf / (a * kf)).exp();
    let delta_l = eps_l * (a * kf / nf).sqrt();
    let guaranteed_radius = gap_k - 2.0 * delta_l;
    if !(guaranteed_radius > 0.0) {
        return Err(Error::InfeasibleSchedule(format!(
            "schedule infeasible at these constants: δ_K + 2δ_L = {} ≥ 1",
            delta_k + 2.0 * delta_l
        )));
    }
    Ok(ScheduleParams {
        n,
        k,
        a_frac: a,
        c1_sched: consts.c1_sched,
        c2_sched: consts.c2_sched,
        eps_k,
        delta_k,
        eps_l,
        delta_l,
        guaranteed_radius,
        covering_estimate: 2.0 * (1.2 * nf).exp(),
        proven_regime: a < PROVEN_A_BOUND,
    })
}
