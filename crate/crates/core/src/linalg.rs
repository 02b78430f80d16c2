//! Exact elimination and the linear-algebra primitives built on it.
//!
//! Pivots are chosen by smallest bit size within the current column to keep
//! coefficient growth down. Results never depend on that choice.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{
    floor_log2, norm2_sq, pow2, bit_size, is_zero_vec, scale, sub, Rational,
};

/// Row-reduced echelon form of `rows` (each of length `ncols`).
/// Returns the reduced rows and the pivot column of each nonzero row.
pub(crate) fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m)
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| bit_size(&rows[i][col]))
        else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r][col..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (rows, pivots)
}

fn column_rows(a: &Matrix, cols: &[usize]) -> Vec<Vec<Rational>> {
    (0..a.rows())
        .map(|i| cols.iter().map(|&j| a[(i, j)].clone()).collect())
        .collect()
}

/// `rk(A_S)`
pub fn rank(a: &Matrix, s: &IndexSet) -> usize {
    if s.is_empty() {
        return 0;
    }
    rref(column_rows(a, s.as_slice()), s.len()).1.len()
}

pub fn matrix_rank(a: &Matrix) -> usize {
    rank(a, &IndexSet::full(a.cols()))
}

/// `cl(S) = {i : rk(S ∪ {i}) = rk(S)}`
pub fn closure(a: &Matrix, s: &IndexSet) -> IndexSet {
    let base = rank(a, s);
    (0..a.cols())
        .filter(|&i| s.contains(i) || rank(a, &s.with(i)) == base)
        .collect()
}

/// Exact basis of `ker(A)`; `n - rk(A)` vectors, empty when the kernel is
/// trivial.
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Rational>> {
    let n = a.cols();
    let (r, pivots) = rref(a.row_vecs(), n);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// Kernel basis of the column submatrix `A_S`, expressed in full coordinates.
pub fn kernel_basis_on(a: &Matrix, s: &IndexSet) -> Vec<Vec<Rational>> {
    let Some(sub) = a.select_columns(s.as_slice()) else {
        return Vec::new();
    };
    kernel_basis(&sub)
        .into_iter()
        .map(|k| {
            let mut v = vec![Rational::zero(); a.cols()];
            for (pos, j) in s.iter().enumerate() {
                v[j] = k[pos].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b` (free variables set to zero), or `None` when
/// the system is inconsistent.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(b.len(), a.rows());
    let n = a.cols();
    let rows = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (r, pivots) = rref(rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[row][n].clone();
    }
    Some(x)
}

/// `x` with `x_B = A_B⁻¹ b` and zeros elsewhere. Feasibility is not checked.
pub fn basic_solution(a: &Matrix, b: &[Rational], basis: &IndexSet) -> Result<Vec<Rational>> {
    if basis.len() != a.rows() || basis.max().is_some_and(|j| j >= a.cols()) {
        return Err(Error::SingularBasis);
    }
    let ab = a.select_columns(basis.as_slice()).ok_or(Error::SingularBasis)?;
    if matrix_rank(&ab) != a.rows() {
        return Err(Error::SingularBasis);
    }
    let xb = solve(&ab, b).ok_or(Error::SingularBasis)?;
    let mut x = vec![Rational::zero(); a.cols()];
    for (k, j) in basis.iter().enumerate() {
        x[j] = xb[k].clone();
    }
    Ok(x)
}

/// Orthogonal projection onto `ker(A)`: `c - Aᵀ(AAᵀ)⁻¹Ac`.
pub fn project_to_kernel(a: &Matrix, c: &[Rational]) -> Vec<Rational> {
    let at = a.transpose();
    let m = a.rows();
    let mut gram = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = a.row(i).iter().zip(a.row(j)).map(|(x, y)| x * y).sum();
        }
    }
    let rhs = a.mul_vec(c);
    // AAᵀy = Ac is consistent even with dependent rows.
    let y = solve(&gram, &rhs).expect("normal equations are consistent");
    sub(c, &at.mul_vec(&y))
}

/// Scales `c` by a power of two so that `‖c‖₂² ∈ [1, 4)`. Returns the scaled
/// vector and the factor `2^k`.
pub fn scale_to_unit_band(c: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
    if is_zero_vec(c) {
        return Err(Error::ZeroVector);
    }
    let nsq = norm2_sq(c);
    // ‖2^k c‖² = 4^k ‖c‖²; pick k = -floor(log4 ‖c‖²).
    let k = -floor_log2(&nsq).div_euclid(2);
    let factor = pow2(k);
    Ok((scale(c, &factor), factor))
}

/// Indices of a maximal set of linearly independent rows.
pub fn independent_rows(a: &Matrix) -> Vec<usize> {
    rref(column_rows(&a.transpose(), &(0..a.rows()).collect::<Vec<_>>()), a.rows()).1
}

/// Greedily extends an independent set `s` to a column basis of `A`.
pub fn extend_to_basis(a: &Matrix, s: &IndexSet) -> IndexSet {
    let target = matrix_rank(a);
    let mut basis = s.clone();
    let mut r = rank(a, &basis);
    for j in 0..a.cols() {
        if r == target {
            break;
        }
        if basis.contains(j) {
            continue;
        }
        let cand = basis.with(j);
        let rc = rank(a, &cand);
        if rc > r {
            basis = cand;
            r = rc;
        }
    }
    basis
}
