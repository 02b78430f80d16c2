use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::LpInstance;
use crate::linalg::solve;
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{int, Rational};

/// `min ⟨1,z⟩ s.t. Ay − Az = b, y, z ≥ 0` with a feasible start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxLp {
    pub instance: LpInstance,
    pub start: Vec<Rational>,
    /// The `z` block, `{n, …, 2n−1}`.
    pub z_block: IndexSet,
}

impl AuxLp {
    /// `y − z`, a point with `Ax = b`.
    pub fn recover(&self, v: &[Rational]) -> Vec<Rational> {
        let n = v.len() / 2;
        (0..n).map(|i| &v[i] - &v[n + i]).collect()
    }
}

pub fn build_aux_lp(a: &Matrix, b: &[Rational]) -> Result<AuxLp> {
    let n = a.cols();
    let x = solve(a, b).ok_or(Error::NoLinearSolution)?;
    let big = a.hstack(&a.negated());
    let mut c = vec![Rational::zero(); n];
    c.extend((0..n).map(|_| int(1)));
    let mut start: Vec<Rational> = x.iter().map(|v| if v.is_positive() { v.clone() } else { Rational::zero() }).collect();
    start.extend(x.iter().map(|v| if v.is_negative() { -v } else { Rational::zero() }));
    Ok(AuxLp {
        instance: LpInstance::new(big, b.to_vec(), c, None)?,
        start,
        z_block: (n..2 * n).collect(),
    })
}
