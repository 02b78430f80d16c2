//! Guessing the circuit imbalance: start at `κ̂ = n` and square on failure.

use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

pub const DEFAULT_MAX_SQUARINGS: usize = 30;

#[derive(Debug, Clone)]
pub struct DoublingOutcome<T> {
    pub value: T,
    /// The estimate that produced `value`.
    pub kappa_hat: Rational,
    /// Every estimate tried, in order; the last one succeeded.
    pub attempts: Vec<Rational>,
}

/// Runs `runner` with `κ̂ = n, n², n⁴, …` until it returns `Ok(Some(_))`.
/// `Ok(None)` signals a sound failure (only possible when `κ̂ < κ_A`); errors
/// propagate immediately.
pub fn kappa_doubling_run<T>(
    n: usize,
    max_squarings: usize,
    mut runner: impl FnMut(&Rational) -> Result<Option<T>>,
) -> Result<DoublingOutcome<T>> {
    let mut kappa = int(n.max(1) as i64);
    let mut attempts = Vec::new();
    for _ in 0..=max_squarings {
        attempts.push(kappa.clone());
        if let Some(value) = runner(&kappa)? {
            return Ok(DoublingOutcome {
                value,
                kappa_hat: kappa,
                attempts,
            });
        }
        let next = &kappa * &kappa;
        // n = 1 would otherwise square to itself forever.
        kappa = if next == kappa { &next + Rational::one() } else { next };
    }
    Err(Error::EstimateCeiling {
        doublings: max_squarings,
    })
}
