//! Support-Circuit, Ratio-Circuit and maximal augmentation.

use num_traits::{One, Signed, Zero};

use crate::circuits::{canonical_scaling, conformal_decompose, ElementaryVector};
use crate::error::{Error, Result};
use crate::instance::is_feasible;
use crate::linalg::{kernel_basis_on, rank};
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{dot, int, is_zero_vec, support, weighted_negative_part, Bound, Rational};
use crate::simplex::{solve_standard, SimplexStatus};

/// Dual solution of the minimum-ratio program: `s = c + Aᵀy`, `0 ≤ s ≤ λw`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub y: Vec<Rational>,
    pub s: Vec<Rational>,
    pub lambda: Rational,
}

impl DualCertificate {
    /// Checks `s = c + Aᵀy`, `s ≥ 0`, `λ ≥ 0` and `s ≤ λw` exactly.
    pub fn verify(&self, a: &Matrix, c: &[Rational], w: Option<&[Bound]>) -> bool {
        let aty = a.tr_mul_vec(&self.y);
        let consistent = self
            .s
            .iter()
            .zip(c.iter().zip(&aty))
            .all(|(s, (ci, ai))| *s == ci + ai);
        let bounded = w.is_none_or(|w| {
            self.s.iter().zip(w).all(|(s, wi)| match wi {
                Bound::Infinite => true,
                Bound::Finite(v) => *s <= &self.lambda * v,
            })
        });
        consistent && bounded && !self.lambda.is_negative() && self.s.iter().all(|v| !v.is_negative())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatioOutcome {
    /// Optimal elementary vector, scaled so `⟨w,g⁻⟩ = 1` (or the `w`-free
    /// direction when no finite weight is touched).
    Circuit(ElementaryVector),
    /// Every feasible `z` has `⟨c,z⟩ ≥ 0`; `λ = 0`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCircuitResult {
    pub outcome: RatioOutcome,
    pub dual: DualCertificate,
}

impl RatioCircuitResult {
    pub fn circuit(&self) -> Option<&ElementaryVector> {
        match &self.outcome {
            RatioOutcome::Circuit(g) => Some(g),
            RatioOutcome::Zero => None,
        }
    }
}

/// An elementary vector with support inside `supp(x)` meeting `s` and with
/// `⟨c,z⟩ ≤ 0`, or `None` when no circuit of `supp(x)` meets `s`.
pub fn support_circuit(a: &Matrix, c: &[Rational], x: &[Rational], s: &IndexSet) -> Option<ElementaryVector> {
    support_circuit_on(a, c, &support(x), s)
}

/// [`support_circuit`] with the admissible support given explicitly.
///
/// When `⟨c,z⟩ = 0` the orientation with a negative entry is preferred so
/// that the maximal step along `z` is finite.
pub fn support_circuit_on(a: &Matrix, c: &[Rational], within: &IndexSet, s: &IndexSet) -> Option<ElementaryVector> {
    let full_rank = rank(a, within);
    for j in s.intersection(within).iter() {
        if rank(a, &within.without(j)) != full_rank {
            continue;
        }
        // j is spanned by the rest; shrink greedily while it stays spanned.
        let mut circ = within.clone();
        for i in within.iter().filter(|&i| i != j) {
            let trial = circ.without(i);
            if rank(a, &trial) == rank(a, &trial.without(j)) {
                circ = trial;
            }
        }
        let basis = kernel_basis_on(a, &circ);
        debug_assert_eq!(basis.len(), 1);
        let mut z = canonical_scaling(&basis[0]);
        let cost = dot(c, &z);
        if cost.is_positive() || (cost.is_zero() && z.iter().all(|v| !v.is_negative())) {
            z = z.iter().map(|v| -v).collect();
        }
        return Some(ElementaryVector::new_unchecked(z));
    }
    None
}

/// Solves `min ⟨c,z⟩ s.t. Az = 0, ⟨w,z⁻⟩ ≤ 1` (coordinates with `w_i = ∞`
/// are sign-constrained `z_i ≥ 0`) and returns an elementary optimum with its
/// dual `(y, s, λ)`.
///
/// Internally: `min ⟨c,p⟩ − ⟨c,q⟩ s.t. Ap − Aq = 0, ⟨w,q⟩ + σ = 1`, with no
/// `q_i` where `w_i = ∞`. The simplex duals are `(y, λ)` directly.
pub fn ratio_circuit(a: &Matrix, c: &[Rational], w: &[Bound]) -> Result<RatioCircuitResult> {
    let (m, n) = (a.rows(), a.cols());
    if c.len() != n || w.len() != n {
        return Err(Error::dims("cost and weight vectors must have n entries"));
    }
    if w.iter().any(|v| matches!(v, Bound::Finite(x) if x.is_negative())) {
        return Err(Error::Precondition("ratio weights must be nonnegative".into()));
    }
    let q_cols: Vec<usize> = (0..n).filter(|&i| !w[i].is_infinite()).collect();
    let width = n + q_cols.len() + 1;
    let mut rows = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a.row(i).iter().cloned());
        row.extend(q_cols.iter().map(|&j| -&a[(i, j)]));
        row.push(Rational::zero());
        rows.push(row);
    }
    let mut budget = vec![Rational::zero(); n];
    budget.extend(q_cols.iter().map(|&j| w[j].finite().expect("finite").clone()));
    budget.push(Rational::one());
    rows.push(budget);
    let big = Matrix::from_rows(rows)?;
    let mut rhs = vec![Rational::zero(); m];
    rhs.push(Rational::one());
    let mut cost = c.to_vec();
    cost.extend(q_cols.iter().map(|&j| -&c[j]));
    cost.push(Rational::zero());

    let out = solve_standard(&big, &rhs, &cost);
    match out.status {
        SimplexStatus::Unbounded => return Err(Error::UnboundedRatioLp),
        SimplexStatus::Infeasible => return Err(Error::Invariant("ratio program has σ = 1 feasible".into())),
        SimplexStatus::Optimal => {}
    }
    let sol = out.x.expect("optimal");
    let ys = out.y.expect("optimal");
    let y = ys[..m].to_vec();
    let lambda = ys[m].clone();
    let aty = a.tr_mul_vec(&y);
    let s: Vec<Rational> = c.iter().zip(&aty).map(|(ci, ai)| ci + ai).collect();
    let dual = DualCertificate { y, s, lambda };
    let value = out.objective.expect("optimal");
    debug_assert_eq!(value, -&dual.lambda);

    if value.is_zero() {
        return Ok(RatioCircuitResult {
            outcome: RatioOutcome::Zero,
            dual,
        });
    }

    let mut z = sol[..n].to_vec();
    for (k, &j) in q_cols.iter().enumerate() {
        z[j] -= &sol[n + k];
    }
    let dec = conformal_decompose(a, &z)?;
    let mut best: Option<(Rational, ElementaryVector)> = None;
    for part in dec.parts {
        let wneg = weighted_negative_part(w, part.vector()).expect("parts conform to z");
        if wneg.is_zero() {
            // A w-free part with negative cost would be an unbounded ray.
            continue;
        }
        let ratio = dot(c, part.vector()) / &wneg;
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, part.scaled(&wneg.recip())));
        }
    }
    let (_, g) = best.ok_or_else(|| Error::Invariant("no decomposition part carries weight".into()))?;
    debug_assert_eq!(dot(c, g.vector()), -&dual.lambda);
    Ok(RatioCircuitResult {
        outcome: RatioOutcome::Circuit(g),
        dual,
    })
}

/// `w = 1/x` with `1/0 = ∞`.
pub fn inverse_weights(x: &[Rational]) -> Vec<Bound> {
    x.iter().map(Bound::reciprocal).collect()
}

pub fn unit_weights(n: usize) -> Vec<Bound> {
    vec![Bound::Finite(int(1)); n]
}

/// Result of a maximal step `x + αg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augmentation {
    pub x: Vec<Rational>,
    /// `Infinite` when nothing binds; `x` is then unchanged.
    pub alpha: Bound,
}

impl Augmentation {
    pub fn is_unbounded(&self) -> bool {
        self.alpha.is_infinite()
    }
}

/// Largest `α` keeping `0 ≤ x + αg ≤ u`.
pub fn augment_maximal(
    a: &Matrix,
    b: &[Rational],
    u: Option<&[Bound]>,
    x: &[Rational],
    g: &[Rational],
) -> Result<Augmentation> {
    if is_zero_vec(g) {
        return Err(Error::ZeroDirection);
    }
    if !is_zero_vec(&a.mul_vec(g)) {
        return Err(Error::NotInKernel);
    }
    if !is_feasible(a, b, u, x) {
        return Err(Error::InfeasibleStart("augmentation point is not feasible".into()));
    }
    Ok(step_along(u, x, g))
}

/// The ratio test behind [`augment_maximal`], without validation.
pub(crate) fn step_along(u: Option<&[Bound]>, x: &[Rational], g: &[Rational]) -> Augmentation {
    let mut alpha: Option<Rational> = None;
    for (i, gi) in g.iter().enumerate() {
        let limit = if gi.is_negative() {
            Some(&x[i] / -gi)
        } else if gi.is_positive() {
            match u.map(|u| &u[i]) {
                Some(Bound::Finite(ui)) => Some((ui - &x[i]) / gi),
                _ => None,
            }
        } else {
            None
        };
        if let Some(l) = limit {
            if alpha.as_ref().is_none_or(|a| l < *a) {
                alpha = Some(l);
            }
        }
    }
    match alpha {
        Some(alpha) => Augmentation {
            x: x.iter().zip(g).map(|(xi, gi)| xi + &alpha * gi).collect(),
            alpha: Bound::Finite(alpha),
        },
        None => Augmentation {
            x: x.to_vec(),
            alpha: Bound::Infinite,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{enumerate_elementary_vectors, is_elementary};
    use crate::rational::{frac, ints};

    #[test]
    fn support_circuit_single_row() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let c = ints(&[0, 0, 1]);
        let z = support_circuit(&a, &c, &ints(&[1, 1, 1]), &IndexSet::from([2])).unwrap();
        assert!(is_elementary(&a, z.vector()));
        assert!(z.circuit().contains(2));
        assert_eq!(dot(&c, z.vector()), int(-1));
    }

    #[test]
    fn support_circuit_none_inside_single_column() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let x = ints(&[1, 0, 0]);
        for s in 0..3 {
            assert!(support_circuit(&a, &ints(&[0, 0, 0]), &x, &IndexSet::from([s])).is_none());
        }
    }

    #[test]
    fn support_circuit_unique() {
        let a = Matrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]);
        let c = ints(&[1, 1, 1]);
        let z = support_circuit(&a, &c, &ints(&[1, 1, 1]), &IndexSet::from([0])).unwrap();
        assert!(z.vector() == ints(&[1, 1, -1]).as_slice() || z.vector() == ints(&[-1, -1, 1]).as_slice());
        assert!(dot(&c, z.vector()) <= int(0));
    }

    #[test]
    fn ratio_circuit_one_dimensional_kernel() {
        let a = Matrix::from_i64(&[&[1, 1]]);
        let r = ratio_circuit(&a, &ints(&[1, 0]), &unit_weights(2)).unwrap();
        assert_eq!(r.circuit().unwrap().vector(), ints(&[-1, 1]).as_slice());
        assert_eq!(r.dual.lambda, int(1));
        assert_eq!(r.dual.y, ints(&[0]));
        assert_eq!(r.dual.s, ints(&[1, 0]));
    }

    #[test]
    fn ratio_circuit_zero_for_row_space_costs() {
        let a = Matrix::from_i64(&[&[1, 2, 3]]);
        let r = ratio_circuit(&a, &ints(&[2, 4, 6]), &unit_weights(3)).unwrap();
        assert_eq!(r.outcome, RatioOutcome::Zero);
        assert_eq!(r.dual.lambda, int(0));
    }

    #[test]
    fn ratio_circuit_matches_brute_force() {
        let a = Matrix::from_i64(&[&[1, 2, -1, 0], &[0, 1, 1, 3]]);
        let c = ints(&[3, -1, 2, -2]);
        let w = vec![
            Bound::Finite(int(1)),
            Bound::Finite(frac(1, 2)),
            Bound::Infinite,
            Bound::Finite(int(2)),
        ];
        let r = ratio_circuit(&a, &c, &w).unwrap();
        assert!(r.dual.verify(&a, &c, Some(&w)));
        let mut best: Option<Rational> = None;
        for ev in enumerate_elementary_vectors(&a).unwrap() {
            for g in [ev.clone(), ev.negated()] {
                if let Some(wn) = weighted_negative_part(&w, g.vector()) {
                    if !wn.is_zero() {
                        let ratio = dot(&c, g.vector()) / wn;
                        best = Some(best.map_or(ratio.clone(), |b: Rational| b.min(ratio)));
                    }
                }
            }
        }
        let g = r.circuit().expect("negative ratio exists");
        let wn = weighted_negative_part(&w, g.vector()).unwrap();
        assert_eq!(wn, int(1));
        assert_eq!(dot(&c, g.vector()), best.unwrap());
        assert_eq!(dot(&c, g.vector()), -r.dual.lambda);
    }

    #[test]
    fn ratio_circuit_unbounded_ray() {
        let a = Matrix::from_i64(&[&[1, -1]]);
        let w = vec![Bound::Infinite, Bound::Infinite];
        assert_eq!(ratio_circuit(&a, &ints(&[-1, 0]), &w).unwrap_err(), Error::UnboundedRatioLp);
    }

    #[test]
    fn augment_single_binding_ratio() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let aug = augment_maximal(&a, &ints(&[3]), None, &ints(&[1, 1, 1]), &ints(&[0, 1, -1])).unwrap();
        assert_eq!(aug.x, ints(&[1, 2, 0]));
        assert_eq!(aug.alpha, Bound::Finite(int(1)));
    }

    #[test]
    fn augment_unbounded_and_zero() {
        let a = Matrix::from_i64(&[&[1, -1]]);
        let aug = augment_maximal(&a, &ints(&[0]), None, &ints(&[1, 1]), &ints(&[1, 1])).unwrap();
        assert!(aug.is_unbounded());
        assert_eq!(aug.x, ints(&[1, 1]));
        assert_eq!(
            augment_maximal(&a, &ints(&[0]), None, &ints(&[1, 1]), &ints(&[0, 0])).unwrap_err(),
            Error::ZeroDirection
        );
    }

    #[test]
    fn augment_capacitated() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let u = vec![Bound::Finite(int(2)); 3];
        let aug = augment_maximal(&a, &ints(&[3]), Some(&u), &ints(&[1, 1, 1]), &ints(&[0, 1, -1])).unwrap();
        assert_eq!(aug.alpha, Bound::Finite(int(1)));
        assert_eq!(aug.x, ints(&[1, 2, 0]));
    }

    #[test]
    fn enumerated_vectors_pass_elementarity() {
        let a = Matrix::from_i64(&[&[1, 2, 3]]);
        assert!(enumerate_elementary_vectors(&a)
            .unwrap()
            .iter()
            .all(|g| is_elementary(&a, g.vector())));
    }
}
