use num_traits::{Signed, Zero};

use super::params::big_slack_threshold;
use super::{AttemptStats, KappaFailure, RatioStep, SolverParams, SolverStep};
use crate::error::{Error, Result};
use crate::instance::is_feasible;
use crate::linalg::{project_to_kernel, rank, scale_to_unit_band};
use crate::matrix::{IndexSet, Matrix};
use crate::oracles::{inverse_weights, ratio_circuit, step_along, support_circuit, unit_weights, RatioOutcome};
use crate::rational::{dot, is_zero_vec, norm1_on, norm_inf, sub, support, Bound, Rational};
use crate::walk::OracleTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixingOutcome {
    /// The projected cost vanished; `x0` is optimal.
    Optimal(Vec<Rational>),
    /// `x_N = x*_N = 0` for every optimal `x*`.
    Fixed { x: Vec<Rational>, fixed: IndexSet },
}

impl FixingOutcome {
    pub fn x(&self) -> &[Rational] {
        match self {
            FixingOutcome::Optimal(x) | FixingOutcome::Fixed { x, .. } => x,
        }
    }
}

/// Bookkeeping for one phase `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    pub cost: Vec<Rational>,
    /// Accumulated truncation `r` with `c̃ ∈ Im(Aᵀ) + c − r`.
    pub perturbation: Vec<Rational>,
    pub ratio_calls: usize,
    pub support_calls: usize,
    /// `c̃ − (c − r) ∈ Im(Aᵀ)` and `0 ≤ r ≤ kδ`.
    pub perturbation_ok: bool,
    /// `‖c̃‖∞ ≤ 2·cs·κ̂`.
    pub norm_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixingRun {
    /// `Err` carries the reason the estimate was judged too small.
    pub outcome: std::result::Result<FixingOutcome, KappaFailure>,
    pub stats: AttemptStats,
    pub phases: Vec<PhaseRecord>,
    pub steps: Vec<SolverStep>,
    pub ratio_steps: Vec<RatioStep>,
    /// Projected cost scaled into `‖c‖₂ ∈ [1,2)`.
    pub scaled_cost: Vec<Rational>,
    /// Final `s̃`, optimal dual slack for the last modified cost.
    pub final_slack: Vec<Rational>,
}

/// `{j : s'_j > (m+1)·κ̂·‖c − c'‖∞}`.
pub fn fixing_set(c: &[Rational], c_prime: &[Rational], s_prime: &[Rational], kappa_hat: &Rational, m: usize) -> IndexSet {
    let thr = Rational::from_integer(((m + 1) as i64).into()) * kappa_hat * norm_inf(&sub(c, c_prime));
    (0..s_prime.len()).filter(|&j| s_prime[j] > thr).collect()
}

/// Whether some `s'_j` exceeds `(m+1)/(cs·(m+2))`. For `c ∈ ker(A)` with
/// `‖c‖₂ ≥ 1` and a small perturbation this holds whenever `κ̂ ≥ κ_A`.
pub fn big_slack_exists(
    c: &[Rational],
    r: &[Rational],
    s_prime: &[Rational],
    m: usize,
    n: usize,
    kappa_hat: &Rational,
) -> bool {
    let _ = (c, r, kappa_hat);
    let thr = big_slack_threshold(m, n);
    s_prime.iter().any(|s| *s > thr)
}

/// Variable fixing from a feasible `x0`.
pub fn variable_fixing(
    a: &Matrix,
    b: &[Rational],
    c: &[Rational],
    x0: &[Rational],
    params: &SolverParams,
) -> Result<FixingRun> {
    let (m, n) = (a.rows(), a.cols());
    if c.len() != n || x0.len() != n || b.len() != m {
        return Err(Error::dims("variable fixing inputs must match A"));
    }
    if !is_feasible(a, b, None, x0) {
        return Err(Error::InfeasibleStart("x0 violates Ax = b, x ≥ 0".into()));
    }
    let mut stats = AttemptStats {
        kappa_hat: params.kappa_hat.clone(),
        ratio_calls: 0,
        support_calls: 0,
        failure: None,
    };
    let projected = project_to_kernel(a, c);
    if is_zero_vec(&projected) {
        return Ok(FixingRun {
            outcome: Ok(FixingOutcome::Optimal(x0.to_vec())),
            stats,
            phases: Vec::new(),
            steps: Vec::new(),
            ratio_steps: Vec::new(),
            scaled_cost: projected,
            final_slack: vec![Rational::zero(); n],
        });
    }
    let (cost, _) = scale_to_unit_band(&projected)?;
    stats.ratio_calls += 1;
    let mut slack = ratio_circuit(a, &cost, &unit_weights(n))?.dual.s;

    let mut run = FixingRun {
        outcome: Err(KappaFailure::PhaseBudget),
        stats,
        phases: Vec::new(),
        steps: Vec::new(),
        ratio_steps: Vec::new(),
        scaled_cost: cost.clone(),
        final_slack: Vec::new(),
    };
    let fail = |mut run: FixingRun, why: KappaFailure| {
        run.stats.failure = Some(why);
        run.outcome = Err(why);
        Ok(run)
    };

    let mut x = x0.to_vec();
    let mut large = IndexSet::new();
    let mut prev_rank = 0;
    let mut t = 0usize;
    let mut perturbation = vec![Rational::zero(); n];
    let mut ctilde: Vec<Rational> = Vec::new();

    while dot(&slack, &x).is_positive() {
        let s_t: IndexSet = (0..n).filter(|&i| slack[i] >= params.delta).collect();
        let thr = &params.gamma * norm1_on(&x, &s_t);
        for i in 0..n {
            if x[i] >= thr {
                large.insert(i);
            }
        }
        let rk = rank(a, &large);
        if t == 0 || rk > prev_rank {
            if run.phases.len() == m + 1 {
                return fail(run, KappaFailure::PhaseBudget);
            }
            ctilde = (0..n)
                .map(|i| if s_t.contains(i) { slack[i].clone() } else { Rational::zero() })
                .collect();
            for i in 0..n {
                perturbation[i] += &slack[i] - &ctilde[i];
            }
            let k = run.phases.len() + 1;
            let residual: Vec<Rational> = (0..n).map(|i| &ctilde[i] - &cost[i] + &perturbation[i]).collect();
            let kdelta = Rational::from_integer((k as i64).into()) * &params.delta;
            let perturbation_ok = is_zero_vec(&project_to_kernel(a, &residual))
                && perturbation.iter().all(|r| !r.is_negative() && *r <= kdelta);
            run.phases.push(PhaseRecord {
                cost: ctilde.clone(),
                perturbation: perturbation.clone(),
                ratio_calls: 0,
                support_calls: 0,
                perturbation_ok,
                norm_ok: norm_inf(&ctilde) <= params.cost_norm_bound(),
            });
            let target = support(&ctilde);
            while let Some(z) = support_circuit(a, &ctilde, &x, &target) {
                let phase = run.phases.last_mut().expect("phase started");
                if phase.support_calls >= n {
                    return fail(run, KappaFailure::SupportBudget);
                }
                phase.support_calls += 1;
                run.stats.support_calls += 1;
                if z.imbalance() > params.kappa_hat {
                    return fail(run, KappaFailure::ImbalanceWitness);
                }
                let aug = step_along(None, &x, z.vector());
                let Bound::Finite(alpha) = aug.alpha else {
                    return Err(Error::UnboundedStep);
                };
                x = aug.x;
                t += 1;
                run.steps.push(SolverStep {
                    iteration: t,
                    phase: k,
                    oracle: OracleTag::SupportCircuit,
                    alpha,
                    potential: dot(&ctilde, &x),
                    l_size: large.len(),
                    l_rank: rk,
                    x_after: x.clone(),
                });
            }
        }
        prev_rank = rk;

        let phase = run.phases.last_mut().expect("phase started");
        if phase.ratio_calls >= params.t {
            return fail(run, KappaFailure::RatioBudget);
        }
        phase.ratio_calls += 1;
        run.stats.ratio_calls += 1;
        let rc = ratio_circuit(a, &ctilde, &inverse_weights(&x))?;
        let (next, alpha) = match &rc.outcome {
            RatioOutcome::Circuit(g) => {
                if g.imbalance() > params.kappa_hat {
                    return fail(run, KappaFailure::ImbalanceWitness);
                }
                let aug = step_along(None, &x, g.vector());
                let Bound::Finite(alpha) = aug.alpha else {
                    return Err(Error::Invariant("ratio circuit with weights 1/x is a ray".into()));
                };
                (aug.x, alpha)
            }
            RatioOutcome::Zero => (x.clone(), Rational::zero()),
        };
        run.ratio_steps.push(RatioStep {
            cost: ctilde.clone(),
            before: x.clone(),
            after: next.clone(),
        });
        slack = if dot(&rc.dual.s, &next) < dot(&ctilde, &next) {
            rc.dual.s
        } else {
            ctilde.clone()
        };
        x = next;
        t += 1;
        run.steps.push(SolverStep {
            iteration: t,
            phase: run.phases.len(),
            oracle: OracleTag::RatioCircuit,
            alpha,
            potential: dot(&ctilde, &x),
            l_size: large.len(),
            l_rank: rk,
            x_after: x.clone(),
        });
    }

    run.final_slack = slack.clone();
    if !big_slack_exists(&cost, &perturbation, &slack, m, n, &params.kappa_hat) {
        return fail(run, KappaFailure::NoBigSlack);
    }
    let thr = params.fixing_threshold();
    let fixed: IndexSet = (0..n).filter(|&i| slack[i] > thr).collect();
    if fixed.is_empty() {
        return fail(run, KappaFailure::EmptyFixingSet);
    }
    debug_assert!(fixed.iter().all(|i| x[i].is_zero()));
    run.outcome = Ok(FixingOutcome::Fixed { x, fixed });
    Ok(run)
}
