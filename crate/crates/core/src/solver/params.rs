use num_traits::One;

use crate::rational::{ceil_sqrt, ceil_to_usize, floor_log2, frac, int, Rational};

/// Constants of the variable-fixing method for given `(m, n, κ̂)`.
///
/// `√n` is irrational; every occurrence uses `cs = ⌈√n⌉`, which makes `δ`
/// smaller and `Γ` larger (both conservative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverParams {
    pub m: usize,
    pub n: usize,
    pub kappa_hat: Rational,
    /// `⌈√n⌉`
    pub cs: usize,
    /// `1 / (2·n·cs·(m+2)·κ̂)`
    pub delta: Rational,
    /// `4(m+2)·cs·κ̂²·T/δ`
    pub gamma: Rational,
    /// Ratio-Circuit calls allowed per phase.
    pub t: usize,
    /// Multiplier on the feasibility Ratio-Circuit budget.
    pub feasibility_constant: usize,
}

/// Upper bound on `ln x` for `x ≥ 1`: `0.6932·(⌊log₂x⌋ + 1)`.
///
/// `0.6932 > ln 2`, so this dominates `ln x` for every `x ≥ 1`.
pub fn ln_upper(x: &Rational) -> Rational {
    frac(6932, 10000) * int(floor_log2(x).max(0) + 1)
}

impl SolverParams {
    pub fn new(m: usize, n: usize, kappa_hat: &Rational) -> Self {
        let cs = ceil_sqrt(n);
        let (mi, ni, csi) = (int(m as i64), int(n as i64), int(cs as i64));
        let k2 = kappa_hat * kappa_hat;
        let delta = (int(2) * &ni * &csi * (&mi + int(2)) * kappa_hat).recip();
        // T appears inside Γ and Γ inside T; iterate T ↦ 1 + ⌈n·ln(…Γ(T)…)⌉
        // from T = 1 until it stops growing (the map is monotone and
        // logarithmic, so this terminates quickly).
        let gamma_of = |t: usize| int(4) * (&mi + int(2)) * &csi * &k2 * int(t as i64) / &delta;
        let mut t = 1usize;
        loop {
            let gamma = gamma_of(t);
            let arg = int(2) * &ni * &ni * &csi * &csi * &csi * &k2 * &gamma / &delta;
            let next = 1 + ceil_to_usize(&(&ni * ln_upper(&arg)));
            if next <= t {
                break;
            }
            t = next;
        }
        let gamma = gamma_of(t);
        SolverParams {
            m,
            n,
            kappa_hat: kappa_hat.clone(),
            cs,
            delta,
            gamma,
            t,
            feasibility_constant: 10,
        }
    }

    /// `κ̂(m+1)nδ`, the fixing threshold on the final dual slack.
    pub fn fixing_threshold(&self) -> Rational {
        &self.kappa_hat * int((self.m + 1) as i64) * int(self.n as i64) * &self.delta
    }

    /// `(m+1) / (cs·(m+2))`, the big-slack threshold.
    pub fn big_slack_threshold(&self) -> Rational {
        big_slack_threshold(self.m, self.n)
    }

    /// `2·cs·κ̂`, the bound on `‖c̃‖∞`.
    pub fn cost_norm_bound(&self) -> Rational {
        int(2 * self.cs as i64) * &self.kappa_hat
    }

    /// `C_f·m·n·(⌈log₂(n+κ̂)⌉ + 1)` Ratio-Circuit calls.
    pub fn feasibility_ratio_budget(&self) -> usize {
        let log = crate::rational::ceil_log2(&(int(self.n as i64) + &self.kappa_hat)).max(0) as usize + 1;
        self.feasibility_constant * self.m * self.n * log
    }

    /// `(m+1)·n` Support-Circuit calls.
    pub fn feasibility_support_budget(&self) -> usize {
        (self.m + 1) * self.n
    }
}

pub(crate) fn big_slack_threshold(m: usize, n: usize) -> Rational {
    int((m + 1) as i64) / (int(ceil_sqrt(n) as i64) * int((m + 2) as i64))
}

/// Guard used by tests: `T ≥ 1 + n·ln(2n²cs³κ̂²Γ/δ)` holds for the chosen `T`.
pub fn t_is_fixed_point(p: &SolverParams) -> bool {
    let ni = int(p.n as i64);
    let csi = int(p.cs as i64);
    let arg = int(2) * &ni * &ni * &csi * &csi * &csi * &p.kappa_hat * &p.kappa_hat * &p.gamma / &p.delta;
    int(p.t as i64) >= Rational::one() + ni * ln_upper(&arg)
}
