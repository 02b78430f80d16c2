use num_traits::{Signed, Zero};

use super::diameter::{diameter_cap, walk_to, DiameterWalk};
use super::{OracleTag, WalkStatus, WalkStep, WalkTrace};
use crate::circuits::{conformal_decompose, ElementaryVector};
use crate::error::{Error, Result};
use crate::instance::is_feasible;
use crate::linalg::{basic_solution, extend_to_basis, rank, solve};
use crate::matrix::{IndexSet, Matrix};
use crate::oracles::{step_along, support_circuit_on};
use crate::rational::{ceil_log2, dot, int, support, Bound, Rational};

/// Vertex description `B ∪ L ∪ H = [n]`: `x_L = 0`, `x_H = u_H`, `x_B` basic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub basis: IndexSet,
    pub lower: IndexSet,
    pub upper: IndexSet,
}

impl Partition {
    pub fn new(n: usize, basis: IndexSet, lower: IndexSet, upper: IndexSet) -> Result<Self> {
        let all = basis.union(&lower).union(&upper);
        let disjoint = basis.len() + lower.len() + upper.len() == all.len();
        if !disjoint || all != IndexSet::full(n) {
            return Err(Error::InvalidInput("B, L, H must partition the columns".into()));
        }
        Ok(Partition { basis, lower, upper })
    }

    /// `x*` with `x*_B = A_B⁻¹(b − A_H u_H)`.
    pub fn vertex(&self, a: &Matrix, b: &[Rational], u: &[Bound]) -> Result<Vec<Rational>> {
        let mut rhs = b.to_vec();
        for h in self.upper.iter() {
            let uh = u[h].finite().ok_or_else(|| Error::Precondition(format!("u_{} must be finite", h + 1)))?;
            for (i, r) in rhs.iter_mut().enumerate() {
                *r -= &a[(i, h)] * uh;
            }
        }
        let mut x = basic_solution(a, &rhs, &self.basis)?;
        for h in self.upper.iter() {
            x[h] = u[h].finite().expect("checked").clone();
        }
        Ok(x)
    }
}

/// Outcome of one Support-Circuit step in the small-gap regime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportStepCheck {
    pub step: usize,
    /// Some `i ∈ L ∪ H` moved onto its target bound.
    pub correct_bound: bool,
    /// Some `i ∈ L ∪ H` moved onto the opposite bound.
    pub wrong_bound: bool,
    /// Some coordinate of the step, possibly basic, ended on a bound, so
    /// the set of free coordinates shrank.
    pub bound_hit: bool,
}

/// The `[A_K 0; I_F I]` system used for the second phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reformulation {
    /// `K = B ∪ S_t`, the columns still walking.
    pub kept: IndexSet,
    /// `F ⊆ K`, columns with a finite bound (one slack each).
    pub capped: IndexSet,
    pub a: Matrix,
    pub b: Vec<Rational>,
    pub basis: IndexSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacitatedWalk {
    /// Both phases, in x-space.
    pub trace: WalkTrace,
    pub partition: Partition,
    pub cost: Vec<Rational>,
    pub phase1_steps: usize,
    pub support_calls: usize,
    pub support_checks: Vec<SupportStepCheck>,
    /// `⟨c,x⁽ᵗ⁾⟩ + |H|` for each phase-one iterate.
    pub gaps: Vec<Rational>,
    /// `|S_t|` when phase one stops.
    pub final_mismatch: usize,
    pub reformulation: Option<Reformulation>,
    pub phase2: Option<DiameterWalk>,
}

fn mismatch(x: &[Rational], x_star: &[Rational], p: &Partition) -> IndexSet {
    p.lower.union(&p.upper).iter().filter(|&i| x[i] != x_star[i]).collect()
}

/// Circuit walk to the vertex given by `partition` on `{Ax = b, 0 ≤ x ≤ u}`.
///
/// Phase one drives all but `m` of the `L ∪ H` coordinates to their target
/// bounds; phase two walks the remaining system in standard form.
pub fn capacitated_walk(
    a: &Matrix,
    b: &[Rational],
    u: &[Bound],
    partition: &Partition,
    x0: &[Rational],
    kappa_hat: &Rational,
) -> Result<CapacitatedWalk> {
    let (m, n) = (a.rows(), a.cols());
    if u.len() != n || x0.len() != n || b.len() != m {
        return Err(Error::dims("u, x0 and b must match A"));
    }
    if partition.basis.len() != m {
        return Err(Error::InvalidInput(format!("|B| must be {m}")));
    }
    let p = Partition::new(n, partition.basis.clone(), partition.lower.clone(), partition.upper.clone())?;
    for i in p.lower.union(&p.upper).iter() {
        if u[i].is_infinite() {
            return Err(Error::Precondition(format!("u_{} must be finite for i ∈ L ∪ H", i + 1)));
        }
    }
    let x_star = p.vertex(a, b, u)?;
    if !is_feasible(a, b, Some(u), &x_star) {
        return Err(Error::InfeasibleTarget("partition vertex violates 0 ≤ x ≤ u".into()));
    }
    if !is_feasible(a, b, Some(u), x0) {
        return Err(Error::InfeasibleStart("start violates Ax = b, 0 ≤ x ≤ u".into()));
    }
    let free0 = free_coordinates(x0, u);
    if rank(a, &free0) != free0.len() {
        return Err(Error::InfeasibleStart("start is not a vertex".into()));
    }

    let mut cost = vec![Rational::zero(); n];
    for i in p.lower.iter() {
        cost[i] = u[i].finite().expect("finite").recip();
    }
    for i in p.upper.iter() {
        cost[i] = -u[i].finite().expect("finite").recip();
    }
    let h_count = int(p.upper.len() as i64);
    let one = int(1);
    let phase1_cap = 10 * (n - m).max(1) * (ceil_log2(&int(n as i64)).max(0) as usize + 1) + n;

    let mut x = x0.to_vec();
    let mut steps = Vec::new();
    let mut support_checks = Vec::new();
    let mut support_calls = 0;
    let mut gaps = vec![dot(&cost, &x) + &h_count];
    let mut s_t = mismatch(&x, &x_star, &p);
    while s_t.len() > m {
        if steps.len() >= phase1_cap {
            return Err(Error::IterationCap {
                what: "capacitated walk phase one",
                cap: phase1_cap,
            });
        }
        let gap = gaps.last().expect("nonempty").clone();
        let (g, tag) = if gap >= one {
            let r: Vec<Rational> = x_star.iter().zip(&x).map(|(s, xi)| s - xi).collect();
            let dec = conformal_decompose(a, &r)?;
            let mut best: Option<(Rational, ElementaryVector)> = None;
            for part in dec.parts {
                let cv = dot(&cost, part.vector());
                if best.as_ref().is_none_or(|(bc, _)| cv < *bc) {
                    best = Some((cv, part));
                }
            }
            (best.expect("x ≠ x*").1, OracleTag::Decomposition)
        } else {
            support_calls += 1;
            let free = free_coordinates(&x, u);
            let z = support_circuit_on(a, &cost, &free, &s_t)
                .ok_or_else(|| Error::Invariant("no free circuit meets S_t in the small-gap regime".into()))?;
            (z, OracleTag::SupportCircuit)
        };
        let aug = step_along(Some(u), &x, g.vector());
        let Bound::Finite(alpha) = aug.alpha else {
            return Err(Error::Invariant("capacitated step is unbounded".into()));
        };
        if tag == OracleTag::SupportCircuit {
            let moved = |i: usize| aug.x[i] != x[i];
            let correct = s_t.iter().any(|i| moved(i) && aug.x[i] == x_star[i]);
            let wrong = p.lower.iter().any(|i| moved(i) && Bound::Finite(aug.x[i].clone()) == u[i])
                || p.upper.iter().any(|i| moved(i) && aug.x[i].is_zero());
            let bound_hit = support(g.vector())
                .iter()
                .any(|i| aug.x[i].is_zero() || Bound::Finite(aug.x[i].clone()) == u[i]);
            support_checks.push(SupportStepCheck {
                step: steps.len(),
                correct_bound: correct,
                wrong_bound: wrong,
                bound_hit,
            });
        }
        x = aug.x;
        gaps.push(dot(&cost, &x) + &h_count);
        steps.push(WalkStep {
            direction: g,
            alpha,
            oracle: tag,
            phase: 1,
            iterate_after: x.clone(),
        });
        s_t = mismatch(&x, &x_star, &p);
    }
    let phase1_steps = steps.len();
    let final_mismatch = s_t.len();

    let mut reformulation = None;
    let mut phase2 = None;
    let mut cap = phase1_cap;
    if x != x_star {
        let kept = p.basis.union(&s_t);
        let capped: IndexSet = kept.iter().filter(|&i| !u[i].is_infinite()).collect();
        let (ref_sys, xt0, xt_star) = reformulate(a, b, u, &kept, &capped, &x, &x_star)?;
        let walk_cap = diameter_cap(ref_sys.a.rows(), ref_sys.a.cols(), kappa_hat);
        cap += walk_cap;
        let walk = walk_to(&ref_sys.a, &xt_star, &ref_sys.basis, &xt0, kappa_hat, walk_cap)?;
        let pos: Vec<usize> = kept.iter().collect();
        for st in &walk.trace.steps {
            let mut g = vec![Rational::zero(); n];
            for (k, &i) in pos.iter().enumerate() {
                g[i] = st.direction.vector()[k].clone();
            }
            let mut next = x.clone();
            for (k, &i) in pos.iter().enumerate() {
                next[i] = st.iterate_after[k].clone();
            }
            x = next;
            steps.push(WalkStep {
                direction: ElementaryVector::new_unchecked(g),
                alpha: st.alpha.clone(),
                oracle: st.oracle,
                phase: 2,
                iterate_after: x.clone(),
            });
        }
        reformulation = Some(ref_sys);
        phase2 = Some(walk);
    }
    if x != x_star {
        return Err(Error::Invariant("capacitated walk did not reach x*".into()));
    }

    Ok(CapacitatedWalk {
        trace: WalkTrace {
            start: x0.to_vec(),
            target: x_star,
            steps,
            status: WalkStatus::ReachedTarget,
            cap,
        },
        partition: p,
        cost,
        phase1_steps,
        support_calls,
        support_checks,
        gaps,
        final_mismatch,
        reformulation,
        phase2,
    })
}

fn free_coordinates(x: &[Rational], u: &[Bound]) -> IndexSet {
    (0..x.len())
        .filter(|&i| x[i].is_positive() && u[i].finite().is_none_or(|ui| x[i] < *ui))
        .collect()
}

/// Builds `[A_K 0; I_F I](x_K, y_F) = (b − A_rest x_rest, u_F)` and maps the
/// current point and the target into it.
fn reformulate(
    a: &Matrix,
    b: &[Rational],
    u: &[Bound],
    kept: &IndexSet,
    capped: &IndexSet,
    x: &[Rational],
    x_star: &[Rational],
) -> Result<(Reformulation, Vec<Rational>, Vec<Rational>)> {
    let m = a.rows();
    let (k, f) = (kept.len(), capped.len());
    let pos = |i: usize| kept.as_slice().binary_search(&i).expect("capped ⊆ kept");
    let mut rows = Vec::with_capacity(m + f);
    for r in 0..m {
        let mut row: Vec<Rational> = kept.iter().map(|j| a[(r, j)].clone()).collect();
        row.extend((0..f).map(|_| Rational::zero()));
        rows.push(row);
    }
    for (t, i) in capped.iter().enumerate() {
        let mut row = vec![Rational::zero(); k + f];
        row[pos(i)] = int(1);
        row[k + t] = int(1);
        rows.push(row);
    }
    let at = Matrix::from_rows(rows)?;
    let mut bt: Vec<Rational> = b.to_vec();
    for j in kept.complement(a.cols()).iter() {
        if !x[j].is_zero() {
            for (r, v) in bt.iter_mut().enumerate() {
                *v -= &a[(r, j)] * &x[j];
            }
        }
    }
    bt.extend(capped.iter().map(|i| u[i].finite().expect("capped").clone()));
    let lift = |v: &[Rational]| -> Vec<Rational> {
        let mut out: Vec<Rational> = kept.iter().map(|i| v[i].clone()).collect();
        out.extend(capped.iter().map(|i| u[i].finite().expect("capped") - &v[i]));
        out
    };
    let (xt0, xt_star) = (lift(x), lift(x_star));
    let basis = extend_to_basis(&at, &support(&xt_star));
    let check = solve(&at, &bt).is_some() && basic_solution(&at, &bt, &basis)? == xt_star;
    if !check {
        return Err(Error::Invariant("reformulated target is not the basic solution".into()));
    }
    Ok((
        Reformulation {
            kept: kept.clone(),
            capped: capped.clone(),
            a: at,
            b: bt,
            basis,
        },
        xt0,
        xt_star,
    ))
}
