use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::LpInstance;
use crate::linalg::{kernel_basis, matrix_rank, solve};
use crate::matrix::Matrix;
use crate::oracles::{step_along, Augmentation};
use crate::rational::{is_nonnegative, sub, Bound, Rational};

/// `P = {x : Ax = b, Bx ≤ d}` paired with its slack image
/// `Q = {s ≥ 0 : s ∈ W + r}`, `W = B·ker(A)`.
///
/// `ψ: Q → P` solves `[A;B]x = (b; d − s)` and is inverted by `s = d − Bx`.
/// Both maps are affine bijections, elementary vectors of `W` correspond to
/// those of `ker(A)` through `h = −Bg`, and a maximal step along `h` from `s`
/// lands on `s'` with `ψ(s') = aug_P(ψ(s), g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralForm {
    pub a_eq: Option<Matrix>,
    pub b_ineq: Matrix,
    pub b: Vec<Rational>,
    pub d: Vec<Rational>,
    /// `M = [A 0; B I]`
    pub m_mat: Matrix,
    /// `q = (b; d)`
    pub q: Vec<Rational>,
    /// `Cs = Cs₀, s ≥ 0` with the rows of `C` spanning `W⊥`. `None` when
    /// `W` is all of `ℝᵏ` (no equations needed).
    pub q_instance: Option<LpInstance>,
    /// A point of `W + r`, the image of one solution of `Ax = b`.
    pub offset: Vec<Rational>,
    stacked: Matrix,
}

pub fn general_form_reduce(
    a_eq: Option<&Matrix>,
    b_ineq: &Matrix,
    b: &[Rational],
    d: &[Rational],
) -> Result<GeneralForm> {
    let n = b_ineq.cols();
    let k = b_ineq.rows();
    if d.len() != k {
        return Err(Error::dims("d must have one entry per row of B"));
    }
    let stacked = match a_eq {
        Some(a) => {
            if a.cols() != n || b.len() != a.rows() {
                return Err(Error::dims("A and B need the same column count, b one entry per row of A"));
            }
            a.vstack(b_ineq)
        }
        None => {
            if !b.is_empty() {
                return Err(Error::dims("b given without A"));
            }
            b_ineq.clone()
        }
    };
    if matrix_rank(&stacked) != n {
        return Err(Error::LinealitySpace);
    }

    let slack_block = Matrix::identity(k);
    let m_mat = match a_eq {
        Some(a) => a
            .hstack(&Matrix::zeros(a.rows(), k))
            .vstack(&b_ineq.hstack(&slack_block)),
        None => b_ineq.hstack(&slack_block),
    };
    let mut q = b.to_vec();
    q.extend(d.iter().cloned());

    let (x_p, kernel) = match a_eq {
        Some(a) => (solve(a, b).ok_or(Error::NoLinearSolution)?, kernel_basis(a)),
        None => (vec![Rational::zero(); n], (0..n).map(|j| unit(n, j)).collect()),
    };
    let offset = sub(d, &b_ineq.mul_vec(&x_p));

    // W⊥ = ker((BK)ᵀ).
    let c_rows: Vec<Vec<Rational>> = if kernel.is_empty() {
        (0..k).map(|i| unit(k, i)).collect()
    } else {
        let bk_cols: Vec<Vec<Rational>> = kernel.iter().map(|v| b_ineq.mul_vec(v)).collect();
        kernel_basis(&Matrix::from_columns(&bk_cols)?.transpose())
    };
    let q_instance = if c_rows.is_empty() {
        None
    } else {
        let c_mat = Matrix::from_rows(c_rows)?;
        let rhs = c_mat.mul_vec(&offset);
        Some(LpInstance::new(c_mat, rhs, vec![Rational::zero(); k], None)?)
    };

    Ok(GeneralForm {
        a_eq: a_eq.cloned(),
        b_ineq: b_ineq.clone(),
        b: b.to_vec(),
        d: d.to_vec(),
        m_mat,
        q,
        q_instance,
        offset,
        stacked,
    })
}

fn unit(n: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[j] = Rational::from_integer(1.into());
    v
}

impl GeneralForm {
    pub fn n(&self) -> usize {
        self.b_ineq.cols()
    }

    /// Number of inequalities, the dimension of the slack space.
    pub fn k(&self) -> usize {
        self.b_ineq.rows()
    }

    fn solve_stacked(&self, top: Vec<Rational>, bottom: Vec<Rational>) -> Option<Vec<Rational>> {
        let mut rhs = top;
        rhs.extend(bottom);
        solve(&self.stacked, &rhs)
    }

    /// `ψ(s)`; fails when `s ∉ W + r`.
    pub fn psi(&self, s: &[Rational]) -> Result<Vec<Rational>> {
        if s.len() != self.k() {
            return Err(Error::dims("slack vector length must equal k"));
        }
        self.solve_stacked(self.b.clone(), sub(&self.d, s))
            .ok_or_else(|| Error::InvalidInput("slack vector is not in the affine image W + r".into()))
    }

    /// `s = d − Bx`
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        sub(&self.d, &self.b_ineq.mul_vec(x))
    }

    /// `g` with `Ag = 0`, `Bg = −h`; fails when `h ∉ W`.
    pub fn lift_direction(&self, h: &[Rational]) -> Result<Vec<Rational>> {
        let zeros = vec![Rational::zero(); self.b.len()];
        let neg: Vec<Rational> = h.iter().map(|v| -v).collect();
        self.solve_stacked(zeros, neg).ok_or(Error::NotInKernel)
    }

    /// `h = −Bg`
    pub fn project_direction(&self, g: &[Rational]) -> Vec<Rational> {
        self.b_ineq.mul_vec(g).into_iter().map(|v| -v).collect()
    }

    pub fn in_p(&self, x: &[Rational]) -> bool {
        let eq_ok = self.a_eq.as_ref().is_none_or(|a| a.mul_vec(x) == self.b);
        eq_ok && is_nonnegative(&self.project(x))
    }

    pub fn in_q(&self, s: &[Rational]) -> bool {
        is_nonnegative(s) && self.psi(s).is_ok()
    }

    /// Inequalities tight at `x`.
    pub fn binding(&self, x: &[Rational]) -> Vec<usize> {
        let s = self.project(x);
        (0..s.len()).filter(|&i| s[i].is_zero()).collect()
    }

    /// Maximal step in `Q` along `h ∈ W`.
    pub fn augment_q(&self, s: &[Rational], h: &[Rational]) -> Result<Augmentation> {
        if !self.in_q(s) {
            return Err(Error::InfeasibleStart("slack vector outside Q".into()));
        }
        self.lift_direction(h)?;
        Ok(step_along(None, s, h))
    }

    /// Maximal step in `P` along `g ∈ ker(A)`, limited by the rows of `B`
    /// with `(Bg)_i > 0`.
    pub fn augment_p(&self, x: &[Rational], g: &[Rational]) -> Result<Augmentation> {
        if !self.in_p(x) {
            return Err(Error::InfeasibleStart("point outside P".into()));
        }
        if let Some(a) = &self.a_eq {
            if a.mul_vec(g).iter().any(|v| !v.is_zero()) {
                return Err(Error::NotInKernel);
            }
        }
        let bg = self.b_ineq.mul_vec(g);
        let s = self.project(x);
        let mut alpha: Option<Rational> = None;
        for i in 0..bg.len() {
            if bg[i].is_positive() {
                let r = &s[i] / &bg[i];
                if alpha.as_ref().is_none_or(|a| r < *a) {
                    alpha = Some(r);
                }
            }
        }
        Ok(match alpha {
            Some(a) => Augmentation {
                x: x.iter().zip(g).map(|(xi, gi)| xi + &a * gi).collect(),
                alpha: Bound::Finite(a),
            },
            None => Augmentation {
                x: x.to_vec(),
                alpha: Bound::Infinite,
            },
        })
    }
}
