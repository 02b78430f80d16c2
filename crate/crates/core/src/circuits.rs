//! Elementary vectors, circuit enumeration, the circuit imbalance measure and
//! conformal circuit decompositions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, kernel_basis_on, rank};
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{conforms_to, is_zero_vec, scale, support, Rational};

/// Default column cap for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

/// A support-minimal nonzero vector of `ker(A)` together with its circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryVector {
    g: Vec<Rational>,
    circuit: IndexSet,
}

impl ElementaryVector {
    /// Wraps `g` without checking elementarity; callers that construct from
    /// arbitrary input should use [`ElementaryVector::checked`].
    pub(crate) fn new_unchecked(g: Vec<Rational>) -> Self {
        let circuit = support(&g);
        ElementaryVector { g, circuit }
    }

    pub fn checked(a: &Matrix, g: Vec<Rational>) -> Result<Self> {
        let ev = Self::new_unchecked(g);
        if !is_elementary(a, &ev.g) {
            return Err(Error::InvalidInput("vector is not elementary".into()));
        }
        Ok(ev)
    }

    pub fn vector(&self) -> &[Rational] {
        &self.g
    }

    pub fn into_vector(self) -> Vec<Rational> {
        self.g
    }

    pub fn circuit(&self) -> &IndexSet {
        &self.circuit
    }

    pub fn scaled(&self, s: &Rational) -> ElementaryVector {
        ElementaryVector {
            g: scale(&self.g, s),
            circuit: self.circuit.clone(),
        }
    }

    pub fn negated(&self) -> ElementaryVector {
        self.scaled(&-Rational::one())
    }

    /// `max |g_j / g_i|` over the circuit.
    pub fn imbalance(&self) -> Rational {
        let abs: Vec<Rational> = self.circuit.iter().map(|i| self.g[i].abs()).collect();
        let hi = abs.iter().max().cloned().unwrap_or_else(Rational::one);
        let lo = abs.iter().min().cloned().unwrap_or_else(Rational::one);
        hi / lo
    }

    /// Coprime integer representative with positive first nonzero entry.
    pub fn canonical(&self) -> ElementaryVector {
        ElementaryVector {
            g: canonical_scaling(&self.g),
            circuit: self.circuit.clone(),
        }
    }
}

/// Rank test for support minimality: `C = supp(g)` must satisfy
/// `rk(C) = |C| - 1` and `rk(C \ {i}) = |C| - 1` for all `i ∈ C`, and `g`
/// must lie in the kernel.
pub fn is_elementary(a: &Matrix, g: &[Rational]) -> bool {
    if g.len() != a.cols() || is_zero_vec(g) || !is_zero_vec(&a.mul_vec(g)) {
        return false;
    }
    let c = support(g);
    let k = c.len();
    rank(a, &c) == k - 1 && c.iter().all(|i| rank(a, &c.without(i)) == k - 1)
}

/// Clears denominators to coprime integers; the first nonzero entry becomes
/// positive.
pub fn canonical_scaling(v: &[Rational]) -> Vec<Rational> {
    let Some(first) = v.iter().find(|x| !x.is_zero()) else {
        return v.to_vec();
    };
    let lcm = v
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if first.is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd * &sign))
        .collect()
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Every circuit of the linear matroid of `A` with its canonical elementary
/// vector, ordered by support size and then lexicographically by support.
pub fn enumerate_elementary_vectors(a: &Matrix) -> Result<Vec<ElementaryVector>> {
    enumerate_elementary_vectors_capped(a, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_elementary_vectors_capped(a: &Matrix, cap: usize) -> Result<Vec<ElementaryVector>> {
    let n = a.cols();
    check_cap(n, cap)?;
    let max_size = (rank(a, &IndexSet::full(n)) + 1).min(n);
    let mut out = Vec::new();
    for size in 1..=max_size {
        for_each_subset(n, size, |cols| {
            let s: IndexSet = cols.iter().copied().collect();
            let k = kernel_basis_on(a, &s);
            if k.len() == 1 && support(&k[0]) == s {
                out.push(ElementaryVector::new_unchecked(canonical_scaling(&k[0])));
            }
        });
    }
    Ok(out)
}

/// Calls `f` with every `size`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size == 0 || size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let Some(i) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Circuit imbalance estimate `κ̂ ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaEstimate {
    pub value: Rational,
    pub exact: bool,
}

fn kappa_of(evs: &[ElementaryVector]) -> Rational {
    evs.iter()
        .map(ElementaryVector::imbalance)
        .max()
        .unwrap_or_else(Rational::one)
}

/// Exact `κ_A` by enumeration. A trivial kernel yields 1.
pub fn kappa_exact(a: &Matrix) -> Result<KappaEstimate> {
    Ok(KappaEstimate {
        value: kappa_of(&enumerate_elementary_vectors(a)?),
        exact: true,
    })
}

/// Imbalance of the row space `Im(Aᵀ)`, computed as the imbalance of
/// `ker(K)` where the rows of `K` span `ker(A)`.
pub fn kappa_dual(a: &Matrix) -> Result<KappaEstimate> {
    check_cap(a.cols(), DEFAULT_ENUMERATION_CAP)?;
    let basis = kernel_basis(a);
    if basis.is_empty() {
        // Im(Aᵀ) is the whole space; its elementary vectors are unit vectors.
        return Ok(KappaEstimate {
            value: Rational::one(),
            exact: true,
        });
    }
    let k = Matrix::from_rows(basis)?;
    Ok(KappaEstimate {
        value: kappa_of(&enumerate_elementary_vectors(&k)?),
        exact: true,
    })
}

/// A conformal circuit decomposition `x = Σ parts`, every part `⊑ x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalDecomposition {
    pub parts: Vec<ElementaryVector>,
    pub target: Vec<Rational>,
}

/// Finds an elementary vector of `ker(A)` sign-compatible with `r` whose
/// support lies inside `supp(r)`.
///
/// Peels `v = r`: while `supp(v)` carries a kernel of dimension ≥ 2, pick a
/// kernel vector `h` not parallel to `v` and move `v - θh` until the first
/// coordinate hits zero. Signs never flip, the support shrinks, and the loop
/// stops at a one-dimensional kernel, i.e. a circuit.
pub fn sign_compatible_circuit(a: &Matrix, r: &[Rational]) -> Vec<Rational> {
    let mut v = r.to_vec();
    loop {
        let s = support(&v);
        let basis = kernel_basis_on(a, &s);
        debug_assert!(!basis.is_empty(), "residual left the kernel");
        if basis.len() <= 1 {
            return v;
        }
        let h = basis
            .iter()
            .find(|h| !parallel(h, &v))
            .expect("a kernel of dimension >= 2 has a non-parallel vector");
        // θ* = min over {h_i/v_i > 0} of v_i/h_i, after orienting h.
        let has_positive = s.iter().any(|i| (&h[i] / &v[i]).is_positive());
        let h: Vec<Rational> = if has_positive {
            h.clone()
        } else {
            h.iter().map(|x| -x).collect()
        };
        let theta = s
            .iter()
            .filter(|&i| (&h[i] / &v[i]).is_positive())
            .map(|i| &v[i] / &h[i])
            .min()
            .expect("oriented so a positive ratio exists");
        for i in s.iter() {
            v[i] -= &theta * &h[i];
        }
    }
}

fn parallel(h: &[Rational], v: &[Rational]) -> bool {
    let Some(p) = v.iter().position(|x| !x.is_zero()) else {
        return true;
    };
    let ratio = &h[p] / &v[p];
    h.iter().zip(v).all(|(hi, vi)| *hi == &ratio * vi)
}

/// Conformal circuit decomposition of `x ∈ ker(A)`. Each round extracts a
/// sign-compatible elementary vector of the residual, scales it maximally and
/// subtracts it, zeroing at least one coordinate; the number of parts is at
/// most `min(dim ker(A), |supp(x)|)`.
pub fn conformal_decompose(a: &Matrix, x: &[Rational]) -> Result<ConformalDecomposition> {
    if x.len() != a.cols() {
        return Err(Error::dims("vector length must match matrix columns"));
    }
    if !is_zero_vec(&a.mul_vec(x)) {
        return Err(Error::NotInKernel);
    }
    let mut residual = x.to_vec();
    let mut parts = Vec::new();
    while !is_zero_vec(&residual) {
        let h = canonical_scaling(&sign_compatible_circuit(a, &residual));
        let h: Vec<Rational> = match support(&h).iter().next() {
            Some(i) if (&h[i] * &residual[i]).is_negative() => h.iter().map(|v| -v).collect(),
            _ => h,
        };
        let alpha = support(&h)
            .iter()
            .map(|i| &residual[i] / &h[i])
            .min()
            .expect("nonempty circuit");
        let part = scale(&h, &alpha);
        for (r, p) in residual.iter_mut().zip(&part) {
            *r -= p;
        }
        debug_assert!(conforms_to(&part, x));
        parts.push(ElementaryVector::new_unchecked(part));
    }
    Ok(ConformalDecomposition {
        parts,
        target: x.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ints};

    fn vectors(evs: &[ElementaryVector]) -> Vec<Vec<Rational>> {
        evs.iter().map(|e| e.vector().to_vec()).collect()
    }

    #[test]
    fn enumerates_circuits_of_all_ones_row() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let evs = enumerate_elementary_vectors(&a).unwrap();
        assert_eq!(
            vectors(&evs),
            vec![ints(&[1, -1, 0]), ints(&[1, 0, -1]), ints(&[0, 1, -1])]
        );
        for e in &evs {
            assert!(is_elementary(&a, e.vector()));
        }
    }

    #[test]
    fn identity_has_no_circuits() {
        assert!(enumerate_elementary_vectors(&Matrix::identity(2)).unwrap().is_empty());
    }

    #[test]
    fn enumerates_circuits_of_one_two_three() {
        let a = Matrix::from_i64(&[&[1, 2, 3]]);
        let evs = enumerate_elementary_vectors(&a).unwrap();
        assert_eq!(
            vectors(&evs),
            vec![ints(&[2, -1, 0]), ints(&[3, 0, -1]), ints(&[0, 3, -2])]
        );
    }

    #[test]
    fn zero_column_is_a_loop_circuit() {
        let a = Matrix::from_i64(&[&[1, 0, 1]]);
        let evs = enumerate_elementary_vectors(&a).unwrap();
        assert!(vectors(&evs).contains(&ints(&[0, 1, 0])));
    }

    #[test]
    fn enumeration_cap() {
        let a = Matrix::zeros(1, 5);
        assert_eq!(
            enumerate_elementary_vectors_capped(&a, 4),
            Err(Error::TooLarge { n: 5, cap: 4 })
        );
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_exact(&Matrix::from_i64(&[&[1, 2]])).unwrap().value, int(2));
        assert_eq!(kappa_exact(&Matrix::from_i64(&[&[1, 2, 3]])).unwrap().value, int(3));
        assert_eq!(kappa_dual(&Matrix::from_i64(&[&[1, 2]])).unwrap().value, int(2));
        // node-arc incidence of the digraph 1->2, 2->3, 1->3 (one row dropped)
        let inc = Matrix::from_i64(&[&[1, 0, 1], &[-1, 1, 0]]);
        assert_eq!(kappa_exact(&inc).unwrap().value, int(1));
        assert_eq!(kappa_dual(&inc).unwrap().value, int(1));
    }

    #[test]
    fn decomposing_an_elementary_vector_returns_it() {
        let a = Matrix::from_i64(&[&[1, 2, 3]]);
        let d = conformal_decompose(&a, &ints(&[2, -1, 0])).unwrap();
        assert_eq!(vectors(&d.parts), vec![ints(&[2, -1, 0])]);
    }

    #[test]
    fn decomposes_into_two_conformal_circuits() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        let x = ints(&[2, -1, -1]);
        let d = conformal_decompose(&a, &x).unwrap();
        let mut got = vectors(&d.parts);
        got.sort();
        assert_eq!(got, vec![ints(&[1, -1, 0]), ints(&[1, 0, -1])]);
    }

    #[test]
    fn decompose_rejects_non_kernel_vectors() {
        let a = Matrix::from_i64(&[&[1, 1, 1]]);
        assert_eq!(conformal_decompose(&a, &ints(&[1, 0, 0])), Err(Error::NotInKernel));
    }

    #[test]
    fn canonical_scaling_clears_denominators() {
        use crate::rational::frac;
        let v = vec![frac(-1, 2), int(0), frac(3, 4)];
        assert_eq!(canonical_scaling(&v), ints(&[2, 0, -3]));
    }

    #[test]
    fn subset_iteration_is_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(3, 3, |_| count += 1);
        assert_eq!(count, 1);
    }
}
