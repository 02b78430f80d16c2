//! Seeded random instances with two known vertices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::capacitated::Partition;
use crate::circuits::for_each_subset;
use crate::error::{Error, Result};
use crate::instance::{is_feasible, LpInstance};
use crate::linalg::{basic_solution, matrix_rank};
use crate::matrix::{IndexSet, Matrix};
use crate::rational::{int, is_nonnegative, Bound, Rational};

const RETRIES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Generic,
    TotallyUnimodular,
    Capacitated,
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(InstanceKind::Generic),
            "tu" => Ok(InstanceKind::TotallyUnimodular),
            "cap" => Ok(InstanceKind::Capacitated),
            other => Err(Error::InvalidInput(format!("unknown instance kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub instance: LpInstance,
    /// A vertex to start walks from.
    pub start: Vec<Rational>,
    /// Basis of the target vertex (standard form).
    pub target_basis: IndexSet,
    pub target: Vec<Rational>,
    /// Target partition, capacitated instances only.
    pub partition: Option<Partition>,
}

/// Deterministic in `(kind, n, m, seed)`.
pub fn generate_instance(kind: InstanceKind, n: usize, m: usize, seed: u64) -> Result<GeneratedInstance> {
    if m == 0 || n <= m {
        return Err(Error::InvalidInput("need n > m ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRIES {
        let a = match kind {
            InstanceKind::TotallyUnimodular => incidence_matrix(&mut rng, n, m),
            _ => small_integer_matrix(&mut rng, n, m),
        };
        if matrix_rank(&a) != m {
            continue;
        }
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let found = match kind {
            InstanceKind::Capacitated => capacitated_pair(&mut rng, &a, c),
            _ => standard_pair(&mut rng, &a, c),
        };
        if let Some(g) = found {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed { attempts: RETRIES })
}

fn small_integer_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..m)
            .map(|_| (0..n).map(|_| int(rng.gen_range(-5..=5))).collect())
            .collect();
        let a = Matrix::from_rows(rows).expect("m, n ≥ 1");
        // Zero columns make trivial loops; skip them.
        if (0..n).all(|j| a.column(j).iter().any(|v| *v != int(0))) {
            return a;
        }
    }
}

/// Node-arc incidence matrix on `m + 1` nodes with one row dropped: a random
/// spanning tree plus `n − m` random extra arcs.
fn incidence_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix {
    let nodes = m + 1;
    let mut arcs = Vec::with_capacity(n);
    for v in 1..nodes {
        let p = rng.gen_range(0..v);
        arcs.push(if rng.gen_bool(0.5) { (p, v) } else { (v, p) });
    }
    while arcs.len() < n {
        let s = rng.gen_range(0..nodes);
        let t = rng.gen_range(0..nodes);
        if s != t {
            arcs.push((s, t));
        }
    }
    arcs.shuffle(rng);
    let mut a = Matrix::zeros(m, n);
    for (j, &(s, t)) in arcs.iter().enumerate() {
        if s < m {
            a[(s, j)] = int(1);
        }
        if t < m {
            a[(t, j)] = int(-1);
        }
    }
    a
}

fn random_basis(rng: &mut ChaCha8Rng, a: &Matrix) -> Option<IndexSet> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<usize> = (0..n).collect();
    for _ in 0..50 {
        cols.shuffle(rng);
        let b: IndexSet = cols[..m].iter().copied().collect();
        if crate::linalg::rank(a, &b) == m {
            return Some(b);
        }
    }
    None
}

fn all_bases(a: &Matrix) -> Vec<IndexSet> {
    let mut out = Vec::new();
    for_each_subset(a.cols(), a.rows(), |s| {
        let b: IndexSet = s.iter().copied().collect();
        if crate::linalg::rank(a, &b) == a.rows() {
            out.push(b);
        }
    });
    out
}

fn standard_pair(rng: &mut ChaCha8Rng, a: &Matrix, c: Vec<Rational>) -> Option<GeneratedInstance> {
    let b1 = random_basis(rng, a)?;
    let mut x1 = vec![int(0); a.cols()];
    for i in b1.iter() {
        x1[i] = int(rng.gen_range(1..=5));
    }
    let b = a.mul_vec(&x1);
    let mut bases = all_bases(a);
    bases.shuffle(rng);
    let (target_basis, target) = bases.into_iter().find_map(|basis| {
        let x = basic_solution(a, &b, &basis).ok()?;
        (is_nonnegative(&x) && x != x1).then_some((basis, x))
    })?;
    let instance = LpInstance::new(a.clone(), b, c, None).ok()?;
    Some(GeneratedInstance {
        instance,
        start: x1,
        target_basis,
        target,
        partition: None,
    })
}

fn random_partition(rng: &mut ChaCha8Rng, a: &Matrix) -> Option<Partition> {
    let n = a.cols();
    let basis = random_basis(rng, a)?;
    let (mut lower, mut upper) = (IndexSet::new(), IndexSet::new());
    for i in basis.complement(n).iter() {
        if rng.gen_bool(0.5) {
            lower.insert(i);
        } else {
            upper.insert(i);
        }
    }
    Partition::new(n, basis, lower, upper).ok()
}

fn capacitated_pair(rng: &mut ChaCha8Rng, a: &Matrix, c: Vec<Rational>) -> Option<GeneratedInstance> {
    let n = a.cols();
    let u: Vec<Bound> = (0..n).map(|_| Bound::Finite(int(rng.gen_range(2..=6)))).collect();
    // Start vertex: pick its partition and interior basic values, then set b.
    let p0 = random_partition(rng, a)?;
    let mut x0 = vec![int(0); n];
    for i in p0.basis.iter() {
        let ui = u[i].finite().expect("finite").clone();
        x0[i] = int(rng.gen_range(1..ui.to_integer().try_into().unwrap_or(2i64)));
    }
    for i in p0.upper.iter() {
        x0[i] = u[i].finite().expect("finite").clone();
    }
    let b = a.mul_vec(&x0);
    for _ in 0..2000 {
        let p = random_partition(rng, a)?;
        let Ok(x) = p.vertex(a, &b, &u) else { continue };
        if x != x0 && is_feasible(a, &b, Some(&u), &x) {
            let instance = LpInstance::new(a.clone(), b, c, Some(u)).ok()?;
            return Some(GeneratedInstance {
                instance,
                start: x0,
                target_basis: p.basis.clone(),
                target: x,
                partition: Some(p),
            });
        }
    }
    None
}
