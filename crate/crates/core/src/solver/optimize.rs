use num_traits::{Signed, Zero};

use super::{
    build_aux_lp, feasibility_with_doubling, variable_fixing, AttemptStats, FeasibilityOutcome, FeasibilityReport,
    FixingOutcome, FixingRun, KappaFailure, SolverParams, SolverStep,
};
use crate::doubling::{kappa_doubling_run, DEFAULT_MAX_SQUARINGS};
use crate::error::{Error, Result};
use crate::instance::{is_feasible, LpInstance};
use crate::linalg::independent_rows;
use crate::matrix::{IndexSet, Matrix};
use crate::oracles::{inverse_weights, ratio_circuit, DualCertificate, RatioOutcome};
use crate::rational::{dot, int, is_zero_vec, Rational};
use crate::simplex::solve_standard;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptimizeStatus {
    Optimal(Vec<Rational>),
    Unbounded,
}

/// One variable-fixing call on the columns still free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub columns: IndexSet,
    pub rows: Vec<usize>,
    pub run: FixingRun,
}

impl Round {
    /// Fixed columns in original indices.
    pub fn fixed(&self) -> IndexSet {
        match &self.run.outcome {
            Ok(FixingOutcome::Fixed { fixed, .. }) => fixed.iter().map(|k| self.columns.as_slice()[k]).collect(),
            _ => IndexSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimizeReport {
    pub status: OptimizeStatus,
    pub kappa_hat: Option<Rational>,
    /// Every estimate tried, the last one successful.
    pub attempts: Vec<AttemptStats>,
    /// Rounds of the successful attempt.
    pub rounds: Vec<Round>,
    /// Augmentations of the successful attempt, iterates in full coordinates.
    pub steps: Vec<SolverStep>,
}

impl OptimizeReport {
    pub fn x(&self) -> Option<&[Rational]> {
        match &self.status {
            OptimizeStatus::Optimal(x) => Some(x),
            OptimizeStatus::Unbounded => None,
        }
    }
}

/// `min ⟨c,z⟩ s.t. Az = 0, ⟨1,z⟩ ≤ 1, z ≥ 0` is negative iff LP(c) is
/// unbounded (given feasibility).
fn is_unbounded(a: &Matrix, c: &[Rational]) -> bool {
    let n = a.cols();
    let mut rows = a.row_vecs();
    for r in rows.iter_mut() {
        r.push(Rational::zero());
    }
    rows.push(vec![int(1); n + 1]);
    let m2 = Matrix::from_rows(rows).expect("nonempty");
    let mut rhs = vec![Rational::zero(); a.rows()];
    rhs.push(int(1));
    let mut cost = c.to_vec();
    cost.push(Rational::zero());
    solve_standard(&m2, &rhs, &cost).objective.is_some_and(|v| v.is_negative())
}

struct Attempt {
    x: Vec<Rational>,
    rounds: Vec<Round>,
    steps: Vec<SolverStep>,
}

/// Repeated variable fixing at a fixed `κ̂`; `Ok(None)` when `κ̂` proved
/// too small.
fn attempt(
    a: &Matrix,
    b: &[Rational],
    c: &[Rational],
    x0: &[Rational],
    kappa_hat: &Rational,
    stats: &mut AttemptStats,
) -> Result<Option<Attempt>> {
    let n = a.cols();
    let mut cols = IndexSet::full(n);
    let mut x = x0.to_vec();
    let mut rounds = Vec::new();
    let mut steps = Vec::new();
    let mut offset = 0;
    while let Some(a_j) = a.select_columns(cols.as_slice()) {
        let rows = independent_rows(&a_j);
        if rows.is_empty() {
            // No constraints left on these columns.
            for i in cols.iter() {
                if c[i].is_positive() {
                    x[i] = Rational::zero();
                } else if c[i].is_negative() {
                    return Err(Error::Invariant("free column with negative cost after unboundedness check".into()));
                }
            }
            break;
        }
        let a_r = a_j.select_rows(&rows).expect("nonempty");
        let b_r: Vec<Rational> = rows.iter().map(|&i| b[i].clone()).collect();
        let c_j: Vec<Rational> = cols.iter().map(|i| c[i].clone()).collect();
        let x_j: Vec<Rational> = cols.iter().map(|i| x[i].clone()).collect();
        let params = SolverParams::new(rows.len(), cols.len(), kappa_hat);
        let run = variable_fixing(&a_r, &b_r, &c_j, &x_j, &params)?;
        stats.ratio_calls += run.stats.ratio_calls;
        stats.support_calls += run.stats.support_calls;
        for st in &run.steps {
            let mut full = x.clone();
            for (k, i) in cols.iter().enumerate() {
                full[i] = st.x_after[k].clone();
            }
            let mut st = st.clone();
            st.iteration += offset;
            st.x_after = full;
            steps.push(st);
        }
        offset = steps.len();
        let outcome = match &run.outcome {
            Err(why) => {
                stats.failure = Some(*why);
                return Ok(None);
            }
            Ok(o) => o.clone(),
        };
        for (k, i) in cols.iter().enumerate() {
            x[i] = outcome.x()[k].clone();
        }
        let round = Round {
            columns: cols.clone(),
            rows,
            run,
        };
        let fixed = round.fixed();
        rounds.push(round);
        match outcome {
            FixingOutcome::Optimal(_) => break,
            FixingOutcome::Fixed { .. } => cols = cols.difference(&fixed),
        }
    }

    // Wrong fixings are possible when κ̂ < κ_A; certify optimality directly.
    stats.ratio_calls += 1;
    if !matches!(ratio_circuit(a, c, &inverse_weights(&x))?.outcome, RatioOutcome::Zero) {
        stats.failure = Some(KappaFailure::WrongFixing);
        return Ok(None);
    }
    Ok(Some(Attempt { x, rounds, steps }))
}

/// Optimal solution of `min ⟨c,x⟩ s.t. Ax = b, x ≥ 0` from a feasible `x0`,
/// or unboundedness.
pub fn optimize(a: &Matrix, b: &[Rational], c: &[Rational], x0: &[Rational]) -> Result<OptimizeReport> {
    let n = a.cols();
    if c.len() != n || x0.len() != n || b.len() != a.rows() {
        return Err(Error::dims("optimize inputs must match A"));
    }
    if !is_feasible(a, b, None, x0) {
        return Err(Error::InfeasibleStart("x0 violates Ax = b, x ≥ 0".into()));
    }
    let trivial = |status| OptimizeReport {
        status,
        kappa_hat: None,
        attempts: Vec::new(),
        rounds: Vec::new(),
        steps: Vec::new(),
    };
    if is_zero_vec(c) {
        return Ok(trivial(OptimizeStatus::Optimal(x0.to_vec())));
    }
    if is_unbounded(a, c) {
        return Ok(trivial(OptimizeStatus::Unbounded));
    }
    let mut attempts = Vec::new();
    let out = kappa_doubling_run(n, DEFAULT_MAX_SQUARINGS, |k| {
        let mut stats = AttemptStats {
            kappa_hat: k.clone(),
            ratio_calls: 0,
            support_calls: 0,
            failure: None,
        };
        let r = attempt(a, b, c, x0, k, &mut stats);
        attempts.push(stats);
        r
    })?;
    let Attempt { x, rounds, steps } = out.value;
    Ok(OptimizeReport {
        status: OptimizeStatus::Optimal(x),
        kappa_hat: Some(out.kappa_hat),
        attempts,
        rounds,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Optimal { x: Vec<Rational>, objective: Rational, report: OptimizeReport },
    Unbounded { report: OptimizeReport },
    /// Farkas certificate on the auxiliary problem: `s = c_aux + Ãᵀy ≥ 0`,
    /// `⟨b,y⟩ < 0`, hence `Aᵀy ≥ 0` with `⟨b,y⟩ < 0`.
    Infeasible { certificate: DualCertificate, phase1: FeasibilityReport },
}

/// Phase I (auxiliary problem plus feasibility) unless a start is given,
/// then the optimizer.
pub fn solve_from_scratch(inst: &LpInstance, start: Option<&[Rational]>) -> Result<SolveOutcome> {
    let x0 = match start {
        Some(x) => x.to_vec(),
        None => {
            let aux = build_aux_lp(&inst.a, &inst.b)?;
            let rep = feasibility_with_doubling(&aux.instance.a, &aux.instance.b, &aux.z_block, &aux.start)?;
            match rep.outcome().clone() {
                FeasibilityOutcome::Solution(v) => aux.recover(&v),
                FeasibilityOutcome::Certificate(certificate) => {
                    return Ok(SolveOutcome::Infeasible {
                        certificate,
                        phase1: rep,
                    })
                }
            }
        }
    };
    let report = optimize(&inst.a, &inst.b, &inst.c, &x0)?;
    Ok(match &report.status {
        OptimizeStatus::Optimal(x) => SolveOutcome::Optimal {
            x: x.clone(),
            objective: dot(&inst.c, x),
            report,
        },
        OptimizeStatus::Unbounded => SolveOutcome::Unbounded { report },
    })
}
