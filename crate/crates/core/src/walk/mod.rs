//! Circuit walks between vertices, their traces, and the lemma checks run
//! against those traces.

mod capacitated;
mod diameter;
mod generate;
mod lemmas;

pub use capacitated::{capacitated_walk, CapacitatedWalk, Partition, Reformulation, SupportStepCheck};
pub use diameter::{diameter_cap, diameter_walk, DiameterWalk};
pub use generate::{generate_instance, GeneratedInstance, InstanceKind};
pub use lemmas::{analysis_sets, check_trace_lemmas, AnalysisSets, Finding, LemmaKind, LemmaReport};

use std::fmt;

use crate::circuits::ElementaryVector;
use crate::rational::Rational;

/// Which rule produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleTag {
    Decomposition,
    SupportCircuit,
    RatioCircuit,
}

impl fmt::Display for OracleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleTag::Decomposition => "decomposition",
            OracleTag::SupportCircuit => "support-circuit",
            OracleTag::RatioCircuit => "ratio-circuit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkStep {
    pub direction: ElementaryVector,
    pub alpha: Rational,
    pub oracle: OracleTag,
    /// 1 for single-phase walks; 1 or 2 in the capacitated walk.
    pub phase: usize,
    pub iterate_after: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkStatus {
    ReachedTarget,
}

/// A circuit walk `x⁽⁰⁾, x⁽¹⁾, …` with `x⁽ᵗ⁺¹⁾ = x⁽ᵗ⁾ + α⁽ᵗ⁾g⁽ᵗ⁾`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub start: Vec<Rational>,
    pub target: Vec<Rational>,
    pub steps: Vec<WalkStep>,
    pub status: WalkStatus,
    pub cap: usize,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `x⁽ᵗ⁾` for `t = 0..=len`.
    pub fn iterates(&self) -> impl Iterator<Item = &[Rational]> + '_ {
        std::iter::once(self.start.as_slice()).chain(self.steps.iter().map(|s| s.iterate_after.as_slice()))
    }

    pub fn last(&self) -> &[Rational] {
        self.steps.last().map_or(&self.start, |s| &s.iterate_after)
    }

    /// Every step satisfies `x⁽ᵗ⁺¹⁾ = x⁽ᵗ⁾ + αg` exactly.
    pub fn is_linked(&self) -> bool {
        let mut prev = self.start.as_slice();
        for s in &self.steps {
            let expected = crate::rational::axpy(prev, &s.alpha, s.direction.vector());
            if expected != s.iterate_after {
                return false;
            }
            prev = &s.iterate_after;
        }
        true
    }
}
