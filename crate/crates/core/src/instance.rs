use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix_rank;
use crate::matrix::Matrix;
use crate::rational::{Bound, Rational};

/// `min ⟨c,x⟩ s.t. Ax = b, 0 ≤ x ≤ u` with `rk(A) = m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    pub a: Matrix,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub u: Option<Vec<Bound>>,
}

impl LpInstance {
    /// Validates dimensions, full row rank and positivity of finite bounds.
    pub fn new(a: Matrix, b: Vec<Rational>, c: Vec<Rational>, u: Option<Vec<Bound>>) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if b.len() != m {
            return Err(Error::dims(format!("b has length {} but A has {m} rows", b.len())));
        }
        if c.len() != n {
            return Err(Error::dims(format!("c has length {} but A has {n} columns", c.len())));
        }
        if let Some(u) = &u {
            if u.len() != n {
                return Err(Error::dims(format!("u has length {} but A has {n} columns", u.len())));
            }
            if u.iter().any(|v| matches!(v, Bound::Finite(x) if !x.is_positive())) {
                return Err(Error::InvalidInput("finite upper bounds must be positive".into()));
            }
        }
        let rank = matrix_rank(&a);
        if rank != m {
            return Err(Error::RankDeficient { rank, rows: m });
        }
        Ok(LpInstance { a, b, c, u })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn upper(&self, i: usize) -> Bound {
        self.u.as_ref().map_or(Bound::Infinite, |u| u[i].clone())
    }

    pub fn objective(&self, x: &[Rational]) -> Rational {
        crate::rational::dot(&self.c, x)
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        is_feasible(&self.a, &self.b, self.u.as_deref(), x)
    }

    /// Uncapacitated equivalent: one slack column and one row
    /// `x_i + s_i = u_i` per finite bound. The first `n` coordinates of a
    /// point of the result are a point of `self`.
    pub fn to_standard_form(&self) -> LpInstance {
        let Some(u) = &self.u else { return self.clone() };
        let (m, n) = (self.m(), self.n());
        let capped: Vec<(usize, &Rational)> = u
            .iter()
            .enumerate()
            .filter_map(|(i, b)| match b {
                Bound::Finite(v) => Some((i, v)),
                Bound::Infinite => None,
            })
            .collect();
        let k = capped.len();
        let mut rows: Vec<Vec<Rational>> = (0..m)
            .map(|r| {
                let mut row = self.a.row(r).to_vec();
                row.resize(n + k, Rational::zero());
                row
            })
            .collect();
        let mut b = self.b.clone();
        for (j, (i, v)) in capped.iter().enumerate() {
            let mut row = vec![Rational::zero(); n + k];
            row[*i] = Rational::from_integer(1.into());
            row[n + j] = Rational::from_integer(1.into());
            rows.push(row);
            b.push((*v).clone());
        }
        let mut c = self.c.clone();
        c.resize(n + k, Rational::zero());
        let a = Matrix::from_rows(rows).expect("rows have equal length");
        // The new rows are independent of each other and of A's rows, which
        // have no entries in the slack columns.
        LpInstance { a, b, c, u: None }
    }

    /// `x` followed by its slacks `u_i − x_i`, in the column order of
    /// [`to_standard_form`](Self::to_standard_form).
    pub fn with_slacks(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = x.to_vec();
        if let Some(u) = &self.u {
            out.extend(u.iter().zip(x).filter_map(|(b, xi)| match b {
                Bound::Finite(v) => Some(v - xi),
                Bound::Infinite => None,
            }));
        }
        out
    }
}

/// `Ax = b` and `0 ≤ x ≤ u`, exactly.
pub fn is_feasible(a: &Matrix, b: &[Rational], u: Option<&[Bound]>, x: &[Rational]) -> bool {
    if x.len() != a.cols() || x.iter().any(Signed::is_negative) {
        return false;
    }
    if let Some(u) = u {
        if x.iter().zip(u).any(|(xi, ui)| matches!(ui, Bound::Finite(v) if xi > v)) {
            return false;
        }
    }
    a.mul_vec(x).iter().zip(b).all(|(l, r)| (l - r).is_zero())
}
