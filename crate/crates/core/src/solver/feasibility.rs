use num_traits::{Signed, Zero};

use super::{AttemptStats, KappaFailure, RatioStep, SolverParams, SolverStep};
use crate::doubling::{kappa_doubling_run, DEFAULT_MAX_SQUARINGS};
use crate::error::{Error, Result};
use crate::instance::is_feasible;
use crate::linalg::rank;
use crate::matrix::{IndexSet, Matrix};
use crate::oracles::{inverse_weights, ratio_circuit, step_along, support_circuit, DualCertificate, RatioOutcome};
use crate::rational::{dot, int, is_zero_vec, norm1_on, Bound, Rational};
use crate::walk::OracleTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityOutcome {
    /// A feasible point with `x_N = 0`.
    Solution(Vec<Rational>),
    /// `s = c + Aᵀy ≥ 0` with `⟨b,y⟩ < 0`: every feasible `x` has
    /// `⟨c,x⟩ = ⟨s,x⟩ − ⟨b,y⟩ > 0`, so `x_N = 0` is impossible.
    Certificate(DualCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityRun {
    /// `None` when the run gave up because `κ̂` was too small.
    pub outcome: Option<FeasibilityOutcome>,
    pub stats: AttemptStats,
    pub steps: Vec<SolverStep>,
    pub ratio_steps: Vec<RatioStep>,
}

/// Feasibility on `min ⟨1_N, x⟩`, starting from a feasible `x0`.
pub fn feasibility(
    a: &Matrix,
    b: &[Rational],
    n_set: &IndexSet,
    x0: &[Rational],
    params: &SolverParams,
) -> Result<FeasibilityRun> {
    let (m, n) = (a.rows(), a.cols());
    if x0.len() != n || b.len() != m || n_set.max().is_some_and(|i| i >= n) {
        return Err(Error::dims("feasibility inputs must match A"));
    }
    if !is_feasible(a, b, None, x0) {
        return Err(Error::InfeasibleStart("x0 violates Ax = b, x ≥ 0".into()));
    }
    let mut c = vec![Rational::zero(); n];
    for i in n_set.iter() {
        c[i] = int(1);
    }
    let threshold_factor = int((4 * m * n) as i64) * &params.kappa_hat;
    let ratio_budget = params.feasibility_ratio_budget();
    let support_budget = params.feasibility_support_budget();

    let mut stats = AttemptStats {
        kappa_hat: params.kappa_hat.clone(),
        ratio_calls: 0,
        support_calls: 0,
        failure: None,
    };
    let mut steps = Vec::new();
    let mut ratio_steps = Vec::new();
    let mut x = x0.to_vec();
    let mut large = IndexSet::new();
    let mut prev_rank = 0;
    let mut t = 0usize;

    let finish = |outcome, stats, steps, ratio_steps| FeasibilityRun {
        outcome,
        stats,
        steps,
        ratio_steps,
    };

    while !norm1_on(&x, n_set).is_zero() {
        let xn = norm1_on(&x, n_set);
        let thr = &threshold_factor * &xn;
        for i in 0..n {
            if x[i] >= thr {
                large.insert(i);
            }
        }
        let rk = rank(a, &large);
        if t == 0 || rk > prev_rank {
            while let Some(z) = support_circuit(a, &c, &x, n_set) {
                if stats.support_calls >= support_budget {
                    stats.failure = Some(KappaFailure::SupportBudget);
                    return Ok(finish(None, stats, steps, ratio_steps));
                }
                stats.support_calls += 1;
                if z.imbalance() > params.kappa_hat {
                    stats.failure = Some(KappaFailure::ImbalanceWitness);
                    return Ok(finish(None, stats, steps, ratio_steps));
                }
                let aug = step_along(None, &x, z.vector());
                let Bound::Finite(alpha) = aug.alpha else {
                    return Err(Error::Invariant("support circuit meeting N is a ray".into()));
                };
                x = aug.x;
                t += 1;
                steps.push(SolverStep {
                    iteration: t,
                    phase: 1,
                    oracle: OracleTag::SupportCircuit,
                    alpha,
                    potential: norm1_on(&x, n_set),
                    l_size: large.len(),
                    l_rank: rk,
                    x_after: x.clone(),
                });
            }
            if norm1_on(&x, n_set).is_zero() {
                break;
            }
        }
        prev_rank = rk;

        if stats.ratio_calls >= ratio_budget {
            stats.failure = Some(KappaFailure::RatioBudget);
            return Ok(finish(None, stats, steps, ratio_steps));
        }
        stats.ratio_calls += 1;
        let rc = ratio_circuit(a, &c, &inverse_weights(&x))?;
        if dot(b, &rc.dual.y).is_negative() {
            return Ok(finish(Some(FeasibilityOutcome::Certificate(rc.dual)), stats, steps, ratio_steps));
        }
        let RatioOutcome::Circuit(g) = rc.outcome else {
            // λ = 0 forces ⟨c,x⟩ = −⟨b,y⟩ > 0, handled above.
            return Err(Error::Invariant("zero ratio value with x_N ≠ 0 and no certificate".into()));
        };
        if g.imbalance() > params.kappa_hat {
            stats.failure = Some(KappaFailure::ImbalanceWitness);
            return Ok(finish(None, stats, steps, ratio_steps));
        }
        let aug = step_along(None, &x, g.vector());
        let Bound::Finite(alpha) = aug.alpha else {
            return Err(Error::Invariant("ratio circuit with unit weight budget is a ray".into()));
        };
        ratio_steps.push(RatioStep {
            cost: c.clone(),
            before: x.clone(),
            after: aug.x.clone(),
        });
        x = aug.x;
        t += 1;
        steps.push(SolverStep {
            iteration: t,
            phase: 1,
            oracle: OracleTag::RatioCircuit,
            alpha,
            potential: norm1_on(&x, n_set),
            l_size: large.len(),
            l_rank: rk,
            x_after: x.clone(),
        });
    }
    debug_assert!(is_zero_vec(&n_set.iter().map(|i| x[i].clone()).collect::<Vec<_>>()));
    Ok(finish(Some(FeasibilityOutcome::Solution(x)), stats, steps, ratio_steps))
}

/// Feasibility with the estimate found by squaring from `κ̂ = n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub run: FeasibilityRun,
    pub kappa_hat: Rational,
    pub attempts: Vec<AttemptStats>,
}

impl FeasibilityReport {
    pub fn outcome(&self) -> &FeasibilityOutcome {
        self.run.outcome.as_ref().expect("successful run")
    }
}

pub fn feasibility_with_doubling(
    a: &Matrix,
    b: &[Rational],
    n_set: &IndexSet,
    x0: &[Rational],
) -> Result<FeasibilityReport> {
    let mut attempts = Vec::new();
    let out = kappa_doubling_run(a.cols(), DEFAULT_MAX_SQUARINGS, |k| {
        let params = SolverParams::new(a.rows(), a.cols(), k);
        let run = feasibility(a, b, n_set, x0, &params)?;
        attempts.push(run.stats.clone());
        Ok(run.outcome.is_some().then_some(run))
    })?;
    Ok(FeasibilityReport {
        run: out.value,
        kappa_hat: out.kappa_hat,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ints;

    fn run(a: &Matrix, b: &[Rational], n_set: IndexSet, x0: &[Rational]) -> FeasibilityReport {
        feasibility_with_doubling(a, b, &n_set, x0).unwrap()
    }

    #[test]
    fn single_augmentation() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let r = run(&a, &ints(&[1]), IndexSet::from([1]), &ints(&[0, 1]));
        assert_eq!(*r.outcome(), FeasibilityOutcome::Solution(ints(&[1, 0])));
    }

    #[test]
    fn already_zero_on_n() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let r = run(&a, &ints(&[1]), IndexSet::from([1]), &ints(&[1, 0]));
        assert_eq!(*r.outcome(), FeasibilityOutcome::Solution(ints(&[1, 0])));
        assert!(r.run.steps.is_empty());
    }

    #[test]
    fn certificate_when_forced() {
        let a = Matrix::from_i64(&[&[0, 1]]);
        let b = ints(&[1]);
        let r = run(&a, &b, IndexSet::from([1]), &ints(&[0, 1]));
        let FeasibilityOutcome::Certificate(cert) = r.outcome() else {
            panic!("expected a certificate");
        };
        let c = ints(&[0, 1]);
        assert!(cert.verify(&a, &c, None));
        assert!(dot(&b, &cert.y).is_negative());
    }
}
