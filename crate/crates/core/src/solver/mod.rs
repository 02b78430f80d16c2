//! Phase-I feasibility, variable fixing, the outer optimizer and the
//! general-form reduction.

mod aux;
mod feasibility;
mod fixing;
mod general_form;
mod optimize;
mod params;

pub use aux::{build_aux_lp, AuxLp};
pub use feasibility::{feasibility, feasibility_with_doubling, FeasibilityOutcome, FeasibilityReport, FeasibilityRun};
pub use fixing::{big_slack_exists, fixing_set, variable_fixing, FixingOutcome, FixingRun, PhaseRecord};
pub use general_form::{general_form_reduce, GeneralForm};
pub use optimize::{optimize, solve_from_scratch, OptimizeReport, OptimizeStatus, Round, SolveOutcome};
pub use params::{ln_upper, t_is_fixed_point, SolverParams};

use std::fmt;

use crate::rational::Rational;
use crate::walk::OracleTag;

/// One augmentation inside a solver run, for traces and CSV export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverStep {
    pub iteration: usize,
    pub phase: usize,
    pub oracle: OracleTag,
    pub alpha: Rational,
    /// `‖x_N‖₁` in feasibility, `⟨c̃,x⟩` in variable fixing.
    pub potential: Rational,
    pub l_size: usize,
    pub l_rank: usize,
    pub x_after: Vec<Rational>,
}

/// A Ratio-Circuit step with `w = 1/x`, kept for the decay check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioStep {
    pub cost: Vec<Rational>,
    pub before: Vec<Rational>,
    pub after: Vec<Rational>,
}

/// Why a run concluded that `κ̂` is too small.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KappaFailure {
    RatioBudget,
    SupportBudget,
    PhaseBudget,
    EmptyFixingSet,
    NoBigSlack,
    /// An oracle returned an elementary vector with imbalance above `κ̂`,
    /// which proves `κ̂ < κ_A`.
    ImbalanceWitness,
    /// The fixed columns excluded every optimum; caught by the final
    /// optimality check.
    WrongFixing,
}

impl fmt::Display for KappaFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KappaFailure::RatioBudget => "ratio-circuit budget exceeded",
            KappaFailure::SupportBudget => "support-circuit budget exceeded",
            KappaFailure::PhaseBudget => "more than m+1 phases",
            KappaFailure::EmptyFixingSet => "empty fixing set",
            KappaFailure::NoBigSlack => "no big dual slack",
            KappaFailure::ImbalanceWitness => "circuit imbalance above the estimate",
            KappaFailure::WrongFixing => "final optimality check failed",
        })
    }
}

/// Work done by one run at a given estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptStats {
    pub kappa_hat: Rational,
    pub ratio_calls: usize,
    pub support_calls: usize,
    pub failure: Option<KappaFailure>,
}

impl AttemptStats {
    pub fn calls(&self) -> usize {
        self.ratio_calls + self.support_calls
    }
}
