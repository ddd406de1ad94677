//! Closed-form inverse Laplace transforms of fractional rational symbols as
//! series of three-parameter Mittag-Leffler functions.
//!
//! Expanding the denominator in a geometric (or multinomial) series around its
//! dominant power and inverting term by term with
//! L{t^{β−1} E^δ_{α,β}(−c t^α)} = s^{αδ−β}/(s^α + c)^δ gives an outer series in
//! the expansion order whose blocks are finite sums. The outer series is the
//! definition used here; its convergence is monitored numerically.

mod compositions;
mod general;
mod three_term;

use num_complex::Complex64;
use thiserror::Error;

use crate::ml::{self, MlError, PrabhakarOrder};
use crate::summation::NeumaierSum;

pub use compositions::{composition_count, enumerate_compositions, Compositions};
pub use general::{invert_general, invert_general_preset, GeneralPreset, MultiTermSymbol};
pub use three_term::{invert_three_term, invert_three_term_preset, invert_two_term, RhoPreset, ThreeTermSymbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InversionError {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("outer series not converged after {outer_terms} blocks (partial value {partial})")]
    NonConvergent { outer_terms: usize, partial: f64 },
    #[error("{count} compositions needed at order m = {m}, above the cap")]
    CombinatorialBlowup { m: u32, count: u64 },
    #[error(transparent)]
    Ml(#[from] MlError),
}

/// Series truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Relative stopping tolerance for the outer series.
    pub tol: f64,
    /// Cap on the outer index (r or m).
    pub max_outer: usize,
    /// Cap on the total number of Mittag-Leffler evaluations.
    pub max_total_terms: usize,
    /// An outer block whose Σ|terms| exceeds this multiple of max(1, first block) trips the guard.
    pub divergence_guard: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_outer: 60,
            max_total_terms: 1_000_000,
            divergence_guard: 1e8,
        }
    }
}

impl Truncation {
    pub fn with_tol(tol: f64) -> Result<Self, InversionError> {
        let t = Self { tol, ..Self::default() };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), InversionError> {
        if !(1e-14..=1e-3).contains(&self.tol) {
            return Err(InversionError::InvalidTruncation(format!("tol {} outside [1e-14, 1e-3]", self.tol)));
        }
        if self.max_outer == 0 || self.max_total_terms == 0 {
            return Err(InversionError::InvalidTruncation("term caps must be positive".into()));
        }
        if !(self.divergence_guard.is_finite() && self.divergence_guard > 0.0) {
            return Err(InversionError::InvalidTruncation(format!(
                "divergence guard {} must be positive",
                self.divergence_guard
            )));
        }
        Ok(())
    }

    /// Tolerance handed to each Mittag-Leffler evaluation.
    pub(crate) fn ml_tol(&self) -> f64 {
        (self.tol * 1e-3).max(1e-15)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainFlag {
    InsideGuard,
    GuardViolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResult {
    pub value: f64,
    /// Absolute error estimate: tail blocks, Mittag-Leffler errors and rounding.
    pub est_error: f64,
    pub outer_terms_used: usize,
    /// Mittag-Leffler evaluations performed.
    pub ml_evaluations: usize,
    /// True when the stop rule fired and est_error ≤ tol·max(1, |value|).
    pub converged: bool,
    pub domain_flag: DomainFlag,
}

/// Consecutive small outer blocks required by the stop rule.
const SMALL_RUN: usize = 2;

/// Running state of an outer series Σ_r block_r.
pub(crate) struct OuterSeries {
    trunc: Truncation,
    sum: NeumaierSum,
    abs_sum: f64,
    ml_error: f64,
    first_block: Option<f64>,
    tail: [f64; SMALL_RUN],
    small: usize,
    blocks: usize,
    evaluations: usize,
}

pub(crate) enum Step {
    Continue,
    Done(InversionResult),
}

impl OuterSeries {
    pub fn new(trunc: Truncation) -> Self {
        Self {
            trunc,
            sum: NeumaierSum::new(),
            abs_sum: 0.0,
            ml_error: 0.0,
            first_block: None,
            tail: [0.0; SMALL_RUN],
            small: 0,
            blocks: 0,
            evaluations: 0,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Add one outer block given its value, Σ|terms| and Σ|coef|·(ML error).
    pub fn push(&mut self, block: f64, abs_terms: f64, ml_error: f64, evaluations: usize) -> Step {
        self.sum.add(block);
        self.abs_sum += abs_terms;
        self.ml_error += ml_error;
        self.evaluations += evaluations;
        self.blocks += 1;
        self.tail[(self.blocks - 1) % SMALL_RUN] = block.abs();
        // the guard watches Σ|terms| so that cancellation inside a block counts too
        let size = abs_terms.max(block.abs());
        let scale = *self.first_block.get_or_insert(size);

        if size > self.trunc.divergence_guard * scale.max(1.0) || !block.is_finite() {
            return Step::Done(self.result(false, DomainFlag::GuardViolated));
        }
        let partial = self.sum.value().abs();
        // the tail of SMALL_RUN blocks takes at most half the certified bound
        if block.abs() <= self.trunc.tol * partial / (2 * SMALL_RUN) as f64 {
            self.small += 1;
            if self.small >= SMALL_RUN {
                let est = self.estimate();
                let converged = est <= self.trunc.tol * partial.max(1.0);
                return Step::Done(self.result(converged, DomainFlag::InsideGuard));
            }
        } else {
            self.small = 0;
        }
        Step::Continue
    }

    fn estimate(&self) -> f64 {
        let tail: f64 = self.tail.iter().sum();
        tail + self.ml_error + 4.0 * f64::EPSILON * self.abs_sum
    }

    fn result(&self, converged: bool, domain_flag: DomainFlag) -> InversionResult {
        InversionResult {
            value: self.sum.value(),
            est_error: self.estimate(),
            outer_terms_used: self.blocks,
            ml_evaluations: self.evaluations,
            converged,
            domain_flag,
        }
    }

    /// Outcome once the outer cap is exhausted without the stop rule firing.
    pub fn exhausted(&self) -> InversionError {
        InversionError::NonConvergent {
            outer_terms: self.blocks,
            partial: self.sum.value(),
        }
    }
}

/// t^{power} E^{gamma}_{alpha, beta}(z) with its absolute error estimate.
pub(crate) fn ml_term(alpha: f64, beta: f64, gamma: f64, z: f64, t_power: f64, tol: f64) -> Result<(f64, f64), InversionError> {
    let order = PrabhakarOrder::new(alpha, beta, gamma)?;
    let r = ml::eval_prabhakar(order, Complex64::new(z, 0.0), tol)?;
    Ok((t_power * r.value.re, t_power * r.est_error))
}

pub(crate) fn check_time(t: f64) -> Result<(), InversionError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(InversionError::InvalidTime(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_validation() {
        assert!(Truncation::default().validate().is_ok());
        assert!(Truncation::with_tol(1e-16).is_err());
        let t = Truncation {
            max_outer: 0,
            ..Truncation::default()
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn outer_series_stop_rule_needs_two_small_blocks() {
        let mut s = OuterSeries::new(Truncation::default());
        assert!(matches!(s.push(1.0, 1.0, 0.0, 1), Step::Continue));
        assert!(matches!(s.push(1e-14, 1e-14, 0.0, 1), Step::Continue));
        match s.push(1e-15, 1e-15, 0.0, 1) {
            Step::Done(r) => {
                assert!(r.converged);
                assert_eq!(r.outer_terms_used, 3);
                assert_eq!(r.domain_flag, DomainFlag::InsideGuard);
            }
            Step::Continue => panic!("stop rule did not fire"),
        }
    }

    #[test]
    fn outer_series_guard() {
        let mut s = OuterSeries::new(Truncation::default());
        assert!(matches!(s.push(2.0, 2.0, 0.0, 1), Step::Continue));
        match s.push(-1e9, 1e9, 0.0, 1) {
            Step::Done(r) => {
                assert!(!r.converged);
                assert_eq!(r.domain_flag, DomainFlag::GuardViolated);
            }
            Step::Continue => panic!("guard did not trip"),
        }
    }
}
