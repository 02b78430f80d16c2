//! Exact scalars and the handful of vector helpers used everywhere.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Nothing in this crate ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::IndexSet;

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zeros(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

/// Parses `"p/q"`, `"-p"` or `"p"`. The result is reduced.
pub fn parse_rational(token: &str) -> Option<Rational> {
    let token = token.trim();
    if token.is_empty() {
        return None;
    }
    match token.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => BigInt::from_str(token).ok().map(Rational::from_integer),
    }
}

/// Total bit length of numerator and denominator; the pivot heuristic prefers
/// small entries.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// `floor(log2(r))` for `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "floor_log2 of non-positive value");
    let mut e = r.numer().bits() as i64 - r.denom().bits() as i64;
    // 2^(e-1) < r < 2^(e+1); settle the boundary exactly.
    while pow2(e) > *r {
        e -= 1;
    }
    while pow2(e + 1) <= *r {
        e += 1;
    }
    e
}

/// `ceil(log2(r))` for `r > 0`.
pub fn ceil_log2(r: &Rational) -> i64 {
    let f = floor_log2(r);
    if pow2(f) == *r {
        f
    } else {
        f + 1
    }
}

pub fn ceil_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

pub fn ceil_to_usize(r: &Rational) -> usize {
    r.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A value in `R ∪ {+∞}`, used for upper bounds and ratio weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(Rational),
    Infinite,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Bound::Infinite)
    }

    /// `1/x` with the convention `1/0 = ∞`.
    pub fn reciprocal(x: &Rational) -> Bound {
        if x.is_zero() {
            Bound::Infinite
        } else {
            Bound::Finite(x.recip())
        }
    }
}

impl From<Rational> for Bound {
    fn from(v: Rational) -> Self {
        Bound::Finite(v)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
            (Bound::Infinite, _) => Ordering::Greater,
            (_, Bound::Infinite) => Ordering::Less,
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
        })
    }
}

// ---- vector helpers -------------------------------------------------------

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

/// `x + alpha * g`
pub fn axpy(x: &[Rational], alpha: &Rational, g: &[Rational]) -> Vec<Rational> {
    x.iter().zip(g).map(|(xi, gi)| xi + alpha * gi).collect()
}

pub fn norm1(a: &[Rational]) -> Rational {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[Rational]) -> Rational {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

pub fn norm2_sq(a: &[Rational]) -> Rational {
    a.iter().map(|x| x * x).sum()
}

/// `‖a_S‖₁`
pub fn norm1_on(a: &[Rational], s: &IndexSet) -> Rational {
    s.iter().map(|i| a[i].abs()).sum()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn support(a: &[Rational]) -> IndexSet {
    a.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub fn is_nonnegative(a: &[Rational]) -> bool {
    a.iter().all(|v| !v.is_negative())
}

/// `y ⊑ x`: sign-compatible and dominated coordinate-wise.
pub fn conforms_to(y: &[Rational], x: &[Rational]) -> bool {
    y.iter().zip(x).all(|(yi, xi)| {
        if yi.is_zero() {
            return true;
        }
        yi.signum() == xi.signum() && yi.abs() <= xi.abs()
    })
}

/// Negative part `z⁻ = max(0, -z)`.
pub fn negative_part(z: &[Rational]) -> Vec<Rational> {
    z.iter()
        .map(|v| if v.is_negative() { -v } else { Rational::zero() })
        .collect()
}

/// `⟨w, z⁻⟩` with the convention `∞ · 0 = 0`; `None` when an infinite weight
/// meets a negative coordinate.
pub fn weighted_negative_part(w: &[Bound], z: &[Rational]) -> Option<Rational> {
    let mut total = Rational::zero();
    for (wi, zi) in w.iter().zip(z) {
        if zi.is_negative() {
            match wi {
                Bound::Finite(v) => total += v * (-zi),
                Bound::Infinite => return None,
            }
        }
    }
    Some(total)
}

pub fn format_vec(v: &[Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn format_vec_csv(v: &[Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_in_lowest_terms() {
        assert_eq!(parse_rational("1/3"), Some(frac(1, 3)));
        assert_eq!(parse_rational("4/-6"), Some(frac(-2, 3)));
        assert_eq!(parse_rational("-7"), Some(int(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn log2_is_exact_at_powers() {
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(floor_log2(&int(9)), 3);
        assert_eq!(floor_log2(&frac(1, 8)), -3);
        assert_eq!(floor_log2(&frac(1, 7)), -3);
        assert_eq!(ceil_log2(&int(8)), 3);
        assert_eq!(ceil_log2(&int(9)), 4);
        assert_eq!(ceil_log2(&frac(3, 2)), 1);
    }

    #[test]
    fn ceil_sqrt_small_values() {
        let expect = [0, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(ceil_sqrt(n), *e, "n = {n}");
        }
    }

    #[test]
    fn conformality() {
        assert!(conforms_to(&ints(&[1, 0, -1]), &ints(&[2, -1, -1])));
        assert!(!conforms_to(&ints(&[1, 1, 0]), &ints(&[2, -1, -1])));
        assert!(!conforms_to(&ints(&[3, 0, 0]), &ints(&[2, -1, -1])));
    }

    #[test]
    fn weighted_negative_part_respects_infinite_weights() {
        let w = vec![Bound::Infinite, Bound::Finite(int(2))];
        assert_eq!(weighted_negative_part(&w, &ints(&[1, -3])), Some(int(6)));
        assert_eq!(weighted_negative_part(&w, &ints(&[-1, 3])), None);
    }

    #[test]
    fn reciprocal_roundtrip() {
        for (p, q) in [(1, 2), (-3, 7), (5, 1)] {
            let a = frac(p, q);
            assert_eq!(&a * a.recip(), Rational::one());
        }
    }
}
