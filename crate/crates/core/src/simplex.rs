//! Dense two-phase tableau simplex in exact arithmetic with Bland's rule.
//!
//! This is the reference oracle used to validate the circuit algorithms and
//! the engine behind the Ratio-Circuit reformulation. Redundant equality rows
//! are detected in phase one and dropped.

use num_traits::{Signed, Zero};

use crate::instance::LpInstance;
use crate::linalg::solve;
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexOutcome {
    pub status: SimplexStatus,
    pub x: Option<Vec<Rational>>,
    /// Dual multipliers with `s = c + Aᵀy ≥ 0` at optimality.
    pub y: Option<Vec<Rational>>,
    pub s: Option<Vec<Rational>>,
    pub basis: Option<IndexSet>,
    pub objective: Option<Rational>,
}

impl SimplexOutcome {
    fn status_only(status: SimplexStatus) -> Self {
        SimplexOutcome {
            status,
            x: None,
            y: None,
            s: None,
            basis: None,
            objective: None,
        }
    }
}

/// `min ⟨c,x⟩ s.t. Ax = b, x ≥ 0` for a validated instance.
pub fn simplex_solve(inst: &LpInstance) -> SimplexOutcome {
    solve_standard(&inst.a, &inst.b, &inst.c)
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.t[row][col].recip();
        for v in self.t[row].iter_mut() {
            *v *= &inv;
        }
        let prow = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, p) in r.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[Rational], allowed: usize) -> Vec<Rational> {
        (0..allowed)
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() && !cost[bj].is_zero() {
                        r -= &cost[bj] * &self.t[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false on
    /// unboundedness.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> Result<(), usize> {
        loop {
            let rc = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| rc[j].is_negative() && !self.basis.contains(&j)) else {
                return Ok(());
            };
            let rhs = self.cols;
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return Err(enter),
            }
        }
    }
}

/// Solves `min ⟨c,x⟩ s.t. Ax = b, x ≥ 0` without requiring full row rank.
pub fn solve_standard(a: &Matrix, b: &[Rational], c: &[Rational]) -> SimplexOutcome {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Phase one: artificials n..n+m, rows sign-normalized so b ≥ 0.
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rational> = a
            .row(i)
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        row.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        cols: n + m,
    };
    let mut phase1_cost = vec![Rational::zero(); n + m];
    for v in phase1_cost[n..].iter_mut() {
        *v = Rational::from_integer(1.into());
    }
    tab.optimize(&phase1_cost, n + m)
        .expect("phase one objective is bounded below");
    let infeas: Rational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| tab.t[i][n + m].clone())
        .sum();
    if infeas.is_positive() {
        return SimplexOutcome::status_only(SimplexStatus::Infeasible);
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant.
    let mut kept_rows: Vec<usize> = (0..m).collect();
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
                kept_rows.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // Phase two over the original columns only.
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if tab.optimize(&cost, n).is_err() {
        return SimplexOutcome::status_only(SimplexStatus::Unbounded);
    }

    let mut x = vec![Rational::zero(); n];
    for (row, &j) in tab.basis.iter().enumerate() {
        x[j] = tab.t[row][n + m].clone();
    }
    let basis: IndexSet = tab.basis.iter().copied().collect();

    // Duals from the final basis: A_Bᵀ π = c_B on the kept rows, then y = -π
    // so that s = c + Aᵀy.
    let mut y = vec![Rational::zero(); m];
    if !kept_rows.is_empty() {
        let ak = a.select_rows(&kept_rows).expect("nonempty");
        let ab = ak.select_columns(&tab.basis).expect("nonempty basis");
        let cb: Vec<Rational> = tab.basis.iter().map(|&j| c[j].clone()).collect();
        let pi = solve(&ab.transpose(), &cb).expect("basis matrix is invertible");
        for (k, &r) in kept_rows.iter().enumerate() {
            y[r] = -pi[k].clone();
        }
    }
    let aty = a.tr_mul_vec(&y);
    let s: Vec<Rational> = c.iter().zip(&aty).map(|(ci, ai)| ci + ai).collect();
    let objective = dot(c, &x);
    SimplexOutcome {
        status: SimplexStatus::Optimal,
        x: Some(x),
        y: Some(y),
        s: Some(s),
        basis: Some(basis),
        objective: Some(objective),
    }
}
