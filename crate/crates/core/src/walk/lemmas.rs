//! Runtime versions of the diameter-walk lemmas.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::DiameterWalk;
use crate::matrix::IndexSet;
use crate::rational::{int, norm1_on, norm_inf, sub, Rational};

/// `L_t`, `T_t = [n] \ L_t` and `R_t` at one iterate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisSets {
    pub l: IndexSet,
    pub t: IndexSet,
    pub r: IndexSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaKind {
    /// `x⁽ᵗ⁺¹⁾ ≥ 0`. `Ax = b` is kept by construction, steps being kernel
    /// vectors.
    Feasibility,
    /// Some coordinate decreased by the step sits at zero afterwards.
    Maximality,
    /// `‖x_N⁽ᵗ⁺¹⁾‖₁ ≤ (1 − 1/d)‖x_N⁽ᵗ⁾‖₁`.
    Decay,
    /// `|x_i⁽ᵗ⁺¹⁾ − x_i⁽ᵗ⁾| ≤ d·|x*_i − x_i⁽ᵗ⁾|`.
    Movement,
    LMonotone,
    LInBasis,
    RMonotone,
    /// `‖x⁽ᵗ⁾ − x*‖∞ ≤ κ̂‖x_N⁽ᵗ⁾‖₁`; can fail only when `κ̂ < κ_A`.
    Proximity,
    /// `L_t ⊆ supp(x⁽ᵗ⁾)`; can fail only when `κ̂ < κ_A`.
    LInSupport,
}

impl LemmaKind {
    /// Findings of these kinds are diagnostics about the estimate, not bugs.
    pub fn kappa_dependent(self) -> bool {
        matches!(self, LemmaKind::Proximity | LemmaKind::LInSupport)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub step: usize,
    pub kind: LemmaKind,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}: {:?}: {}", self.step, self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LemmaReport {
    pub findings: Vec<Finding>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.findings.is_empty()
    }

    /// No findings other than estimate diagnostics.
    pub fn structural_ok(&self) -> bool {
        self.findings.iter().all(|f| f.kind.kappa_dependent())
    }

    pub fn first(&self) -> Option<&Finding> {
        self.findings.first()
    }
}

/// `L_t = {i : x*_i > ñκ̂‖x_N⁽ᵗ⁾‖₁}` (ñ the kept column count) and
/// `R_t = {i : x_i⁽ᵗ⁾ ≤ d·x*_i}` for every iterate.
pub fn analysis_sets(walk: &DiameterWalk, kappa_hat: &Rational) -> Vec<AnalysisSets> {
    let x_star = &walk.trace.target;
    let n = x_star.len();
    let n_kept = int(walk.kept.len() as i64);
    let d = int(walk.kernel_dim as i64);
    walk.trace
        .iterates()
        .map(|x| {
            let thr = &n_kept * kappa_hat * norm1_on(x, &walk.nonbasic);
            let l: IndexSet = (0..n).filter(|&i| x_star[i] > thr).collect();
            let t = l.complement(n);
            let r: IndexSet = (0..n).filter(|&i| x[i] <= &d * &x_star[i]).collect();
            AnalysisSets { l, t, r }
        })
        .collect()
}

/// Checks every lemma on every step and reports all violations, in order.
pub fn check_trace_lemmas(walk: &DiameterWalk, kappa_hat: &Rational) -> LemmaReport {
    let mut findings = Vec::new();
    let mut push = |step: usize, kind: LemmaKind, detail: String| findings.push(Finding { step, kind, detail });
    let x_star = &walk.trace.target;
    let d = int(walk.kernel_dim as i64);
    let sets = analysis_sets(walk, kappa_hat);
    let basis = walk.nonbasic.complement(x_star.len());
    let iterates: Vec<&[Rational]> = walk.trace.iterates().collect();

    for (t, x) in iterates.iter().enumerate() {
        let xn = norm1_on(x, &walk.nonbasic);
        let dev = norm_inf(&sub(x, x_star));
        if dev > kappa_hat * &xn {
            push(t, LemmaKind::Proximity, format!("‖x − x*‖∞ = {dev} > κ̂·‖x_N‖₁ = {}", kappa_hat * &xn));
        }
        let l = &sets[t].l;
        if !l.is_subset(&basis) {
            push(t, LemmaKind::LInBasis, format!("L = {l} leaves the basis"));
        }
        if let Some(i) = l.iter().find(|&i| x[i].is_zero()) {
            push(t, LemmaKind::LInSupport, format!("x_{} = 0 but {} ∈ L", i + 1, i + 1));
        }
    }

    for (t, step) in walk.trace.steps.iter().enumerate() {
        let (x, y) = (iterates[t], iterates[t + 1]);
        let g = step.direction.vector();
        if y.iter().any(Signed::is_negative) {
            push(t, LemmaKind::Feasibility, "negative coordinate".into());
        }
        if !g.iter().zip(y).any(|(gi, yi)| gi.is_negative() && yi.is_zero()) {
            push(t, LemmaKind::Maximality, "no decreasing coordinate reached zero".into());
        }
        let (before, after) = (norm1_on(x, &walk.nonbasic), norm1_on(y, &walk.nonbasic));
        if !d.is_zero() {
            let bound = (Rational::one() - d.recip()) * &before;
            if after > bound {
                push(t, LemmaKind::Decay, format!("‖x_N‖₁ went {before} → {after}, bound {bound}"));
            }
        }
        if let Some(i) = (0..x.len()).find(|&i| (&y[i] - &x[i]).abs() > &d * (&x_star[i] - &x[i]).abs()) {
            push(t, LemmaKind::Movement, format!("coordinate {} moved too far", i + 1));
        }
        if !sets[t].l.is_subset(&sets[t + 1].l) {
            push(t, LemmaKind::LMonotone, format!("L shrank {} → {}", sets[t].l, sets[t + 1].l));
        }
        if !sets[t].r.is_subset(&sets[t + 1].r) {
            push(t, LemmaKind::RMonotone, format!("R shrank {} → {}", sets[t].r, sets[t + 1].r));
        }
    }
    LemmaReport { findings }
}
