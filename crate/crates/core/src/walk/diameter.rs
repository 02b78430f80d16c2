use num_traits::Signed;

use super::lemmas::{analysis_sets, AnalysisSets};
use super::{OracleTag, WalkStatus, WalkStep, WalkTrace};
use crate::circuits::{conformal_decompose, ElementaryVector};
use crate::error::{Error, Result};
use crate::instance::is_feasible;
use crate::linalg::{basic_solution, rank};
use crate::matrix::{IndexSet, Matrix};
use crate::oracles::step_along;
use crate::rational::{ceil_log2, int, is_nonnegative, norm1_on, support, Bound, Rational};

/// A finished Diameter-Bound walk with the data its lemmas refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiameterWalk {
    pub trace: WalkTrace,
    pub kappa_hat: Rational,
    /// `N = [n] \ B` for the target basis.
    pub nonbasic: IndexSet,
    /// Columns kept after restricting to `supp(x*) ∪ supp(x⁽⁰⁾)`.
    pub kept: IndexSet,
    /// `dim ker(A_K)`; plays the role of `n − m` in the decay lemma.
    pub kernel_dim: usize,
    pub analysis: Vec<AnalysisSets>,
}

/// `10·m·min(m, n−m)·(⌈log₂(m+κ)⌉ + 1)`.
pub fn diameter_cap(m: usize, n: usize, kappa: &Rational) -> usize {
    let log = ceil_log2(&(int(m as i64) + kappa)).max(0) as usize + 1;
    10 * m * m.min(n.saturating_sub(m)) * log
}

/// Walks from the vertex `x0` to the basic solution of `target_basis`,
/// each step taking the conformal part of `x* − x` with the largest mass on
/// the nonbasic coordinates.
pub fn diameter_walk(
    a: &Matrix,
    b: &[Rational],
    target_basis: &IndexSet,
    x0: &[Rational],
    kappa_hat: &Rational,
) -> Result<DiameterWalk> {
    let (m, n) = (a.rows(), a.cols());
    if x0.len() != n || b.len() != m {
        return Err(Error::dims("start and right-hand side must match A"));
    }
    let x_star = basic_solution(a, b, target_basis)?;
    if !is_nonnegative(&x_star) {
        return Err(Error::InfeasibleTarget(format!("basis {target_basis} has a negative basic solution")));
    }
    if !is_feasible(a, b, None, x0) {
        return Err(Error::InfeasibleStart("start violates Ax = b, x ≥ 0".into()));
    }
    let s0 = support(x0);
    if rank(a, &s0) != s0.len() {
        return Err(Error::InfeasibleStart("start is not a vertex".into()));
    }
    walk_to(a, &x_star, target_basis, x0, kappa_hat, diameter_cap(m, n, kappa_hat))
}

/// The walk itself; the start need not be a vertex.
pub(crate) fn walk_to(
    a: &Matrix,
    x_star: &[Rational],
    basis: &IndexSet,
    x0: &[Rational],
    kappa_hat: &Rational,
    cap: usize,
) -> Result<DiameterWalk> {
    let n = a.cols();
    let nonbasic = basis.complement(n);
    let kept = support(x_star).union(&support(x0));
    let local: Vec<usize> = kept.as_slice().to_vec();
    let local_n: IndexSet = local
        .iter()
        .enumerate()
        .filter(|(_, &i)| nonbasic.contains(i))
        .map(|(k, _)| k)
        .collect();
    let (a_k, kernel_dim) = match a.select_columns(&local) {
        Some(a_k) => {
            let d = local.len() - rank(&a_k, &IndexSet::full(local.len()));
            (Some(a_k), d)
        }
        None => (None, 0),
    };

    let mut x = x0.to_vec();
    let mut steps = Vec::new();
    while x != x_star {
        if steps.len() >= cap {
            return Err(Error::IterationCap {
                what: "diameter walk",
                cap,
            });
        }
        let a_k = a_k.as_ref().expect("x ≠ x* implies a nonempty kept set");
        let r: Vec<Rational> = local.iter().map(|&i| &x_star[i] - &x[i]).collect();
        let dec = conformal_decompose(a_k, &r)?;
        let mut best: Option<(Rational, &ElementaryVector)> = None;
        for part in &dec.parts {
            let mass = norm1_on(part.vector(), &local_n);
            if best.as_ref().is_none_or(|(bm, _)| mass > *bm) {
                best = Some((mass, part));
            }
        }
        let (_, h) = best.expect("nonzero residual has parts");
        let mut g = vec![Rational::from_integer(0.into()); n];
        for (k, &i) in local.iter().enumerate() {
            g[i] = h.vector()[k].clone();
        }
        let aug = step_along(None, &x, &g);
        let Bound::Finite(alpha) = aug.alpha else {
            return Err(Error::Invariant("decomposition part of a vertex difference is a ray".into()));
        };
        debug_assert!(!alpha.is_negative());
        x = aug.x;
        steps.push(WalkStep {
            direction: ElementaryVector::new_unchecked(g),
            alpha,
            oracle: OracleTag::Decomposition,
            phase: 1,
            iterate_after: x.clone(),
        });
    }

    let mut walk = DiameterWalk {
        trace: WalkTrace {
            start: x0.to_vec(),
            target: x_star.to_vec(),
            steps,
            status: WalkStatus::ReachedTarget,
            cap,
        },
        kappa_hat: kappa_hat.clone(),
        nonbasic,
        kept,
        kernel_dim,
        analysis: Vec::new(),
    };
    walk.analysis = analysis_sets(&walk, kappa_hat);
    Ok(walk)
}
