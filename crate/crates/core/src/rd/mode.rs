//! Closed-form solution of a single Fourier mode.
//!
//! With D(s) = Σ_j a_j s^{α_j} + c the transformed mode equation gives
//!
//! N*(k, s) = f̂ Σ_j a_j s^{α_j−1}/D(s) + φ̂(k, s)/D(s),
//!
//! so the mode is f̂ times a sum of inversions with ρ = α_j, plus the time
//! convolution of φ̂ with the ρ = 1 inversion (the kernel). Every inversion is
//! one of the outer Mittag-Leffler series in `inversion`.

use num_complex::Complex64;

use super::problem::{ModeCoefficient, TimeOperator};
use super::RdError;
use crate::inversion::{
    invert_general, invert_three_term, GeneralPreset, InversionError, InversionResult, MultiTermSymbol, RhoPreset,
    ThreeTermSymbol, Truncation,
};
use crate::quadrature::gauss_legendre;

/// Series family used to assemble the mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeFormula {
    /// Binomial double series in (r, l), at most three distinct orders.
    ThreeTerm,
    /// Multinomial series over compositions, any number of orders.
    MultiTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOptions {
    pub trunc: Truncation,
    /// Gauss-Legendre nodes of the source convolution rule.
    pub source_nodes: usize,
    /// Also apply the rule with half the nodes and charge the difference.
    pub source_doubling: bool,
}

impl Default for ModeOptions {
    fn default() -> Self {
        Self {
            trunc: Truncation {
                tol: 1e-10,
                max_outer: 400,
                ..Truncation::default()
            },
            source_nodes: 64,
            source_doubling: true,
        }
    }
}

impl ModeOptions {
    pub fn validate(&self) -> Result<(), RdError> {
        self.trunc.validate()?;
        if self.source_nodes < 2 || (self.source_doubling && !self.source_nodes.is_multiple_of(2)) {
            return Err(RdError::InvalidProblem(format!(
                "source rule needs at least 2 nodes, even when doubling is on (got {})",
                self.source_nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeValue {
    pub value: Complex64,
    pub est_error: f64,
    /// Every inversion involved met its stop rule and tolerance.
    pub converged: bool,
    /// Largest outer index used by any inversion.
    pub outer_terms: usize,
    /// |I_n − I_{n/2}| of the source rule, when a source and doubling are present.
    pub source_quadrature_delta: Option<f64>,
}

/// One inversion (or weighted sum of inversions) at one time.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Part {
    pub value: f64,
    pub est_error: f64,
    pub converged: bool,
    pub outer_terms: usize,
    pub failure: Option<String>,
}

impl Part {
    fn zero() -> Self {
        Self {
            value: 0.0,
            est_error: 0.0,
            converged: true,
            outer_terms: 0,
            failure: None,
        }
    }

    fn accumulate(&mut self, weight: f64, r: Result<InversionResult, InversionError>) {
        match r {
            Ok(r) => {
                self.value += weight * r.value;
                self.est_error += weight.abs() * r.est_error;
                self.converged &= r.converged;
                self.outer_terms = self.outer_terms.max(r.outer_terms_used);
            }
            Err(InversionError::NonConvergent { outer_terms, partial }) => {
                // the partial sum is kept so the field stays inspectable; its error is unknown
                self.value += weight * partial;
                self.est_error = f64::INFINITY;
                self.converged = false;
                self.outer_terms = self.outer_terms.max(outer_terms);
                self.failure.get_or_insert_with(|| format!("outer series not converged after {outer_terms} blocks"));
            }
            Err(e) => {
                self.value = f64::NAN;
                self.est_error = f64::INFINITY;
                self.converged = false;
                self.failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
}

/// Normalized time operator bound to a series family.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TimeSymbol {
    terms: Vec<(f64, f64)>,
    formula: ModeFormula,
}

impl TimeSymbol {
    pub fn new(op: &TimeOperator) -> Result<Self, RdError> {
        let formula = match op {
            TimeOperator::Triple { .. } => ModeFormula::ThreeTerm,
            TimeOperator::General(_) => ModeFormula::MultiTerm,
        };
        Ok(Self {
            terms: op.normalized()?,
            formula,
        })
    }

    pub fn leading_order(&self) -> f64 {
        self.terms[0].1
    }

    /// Σ_j a_j L⁻¹[s^{α_j−1}/D](t): the mode for f̂ = 1 and no source.
    pub fn relaxation(&self, c: f64, t: f64, trunc: &Truncation) -> Part {
        let mut part = Part::zero();
        match self.formula {
            ModeFormula::ThreeTerm => {
                let lead = self.terms[0].0;
                let presets: &[RhoPreset] = match self.terms.len() {
                    1 => &[RhoPreset::Alpha],
                    2 => &[RhoPreset::Alpha, RhoPreset::Beta],
                    _ => &[RhoPreset::Alpha, RhoPreset::Gamma, RhoPreset::Beta],
                };
                for (&(coef, _), &preset) in self.terms.iter().zip(presets) {
                    let r = self.three_term(preset, c).and_then(|s| invert_three_term(&s, t, trunc));
                    part.accumulate(coef / lead, r);
                }
            }
            ModeFormula::MultiTerm => {
                for (w, &(coef, order)) in self.terms.iter().enumerate() {
                    let sym = match w {
                        0 => MultiTermSymbol::with_preset(GeneralPreset::Alpha1, c, &self.terms),
                        1 => MultiTermSymbol::with_preset(GeneralPreset::Alpha2, c, &self.terms),
                        _ => MultiTermSymbol::new(order, c, &self.terms),
                    };
                    part.accumulate(coef, sym.and_then(|s| invert_general(&s, t, trunc)));
                }
            }
        }
        part
    }

    /// L⁻¹[1/D](t), the source kernel.
    pub fn kernel(&self, c: f64, t: f64, trunc: &Truncation) -> Part {
        let mut part = Part::zero();
        match self.formula {
            ModeFormula::ThreeTerm => {
                let r = self.three_term(RhoPreset::One, c).and_then(|s| invert_three_term(&s, t, trunc));
                part.accumulate(1.0 / self.terms[0].0, r);
            }
            ModeFormula::MultiTerm => {
                let r = MultiTermSymbol::with_preset(GeneralPreset::One, c, &self.terms).and_then(|s| invert_general(&s, t, trunc));
                part.accumulate(1.0, r);
            }
        }
        part
    }

    /// s^{ρ−1}/(s^α + a s^β + b s^γ + c) after dividing by the leading coefficient;
    /// the middle order goes to γ and the smallest to β.
    fn three_term(&self, preset: RhoPreset, c: f64) -> Result<ThreeTermSymbol, InversionError> {
        let (lead, o1) = self.terms[0];
        match self.terms[..] {
            [_] => ThreeTermSymbol::with_preset(preset, o1, o1 / 3.0, 2.0 * o1 / 3.0, 0.0, 0.0, c / lead),
            [_, (a2, o2)] => ThreeTermSymbol::with_preset(preset, o1, o2, 0.5 * (o1 + o2), a2 / lead, 0.0, c / lead),
            [_, (a2, o2), (a3, o3)] => ThreeTermSymbol::with_preset(preset, o1, o3, o2, a3 / lead, a2 / lead, c / lead),
            _ => Err(InversionError::InvalidSymbol(format!(
                "the three-term formula takes at most three orders, got {}",
                self.terms.len()
            ))),
        }
    }
}

/// Nodes and weights for ∫₀ᵗ g(ξ) ψ(t − ξ) dξ with g(ξ) ~ ξ^{α−1} at the origin.
///
/// ξ = t u^{1/α} turns ξ^{α−1} dξ into (t^α/α) du, after which Gauss-Legendre
/// on u ∈ [0, 1] sees a bounded integrand.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SourceRule {
    pub fine: Vec<(f64, f64)>,
    pub coarse: Option<Vec<(f64, f64)>>,
}

impl SourceRule {
    pub fn new(t: f64, alpha: f64, nodes: usize, doubling: bool) -> Self {
        let rule = |n: usize| -> Vec<(f64, f64)> {
            let (x, w) = gauss_legendre(n);
            x.iter()
                .zip(&w)
                .map(|(&x, &w)| {
                    let u = 0.5 * (x + 1.0);
                    let xi = t * u.powf(1.0 / alpha);
                    (xi, 0.5 * w * t / alpha * u.powf(1.0 / alpha - 1.0))
                })
                .collect()
        };
        Self {
            fine: rule(nodes),
            coarse: doubling.then(|| rule(nodes / 2)),
        }
    }

    /// Every ξ at which the kernel is needed: fine nodes first, then coarse.
    pub fn all_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.fine.iter().chain(self.coarse.iter().flatten()).map(|&(xi, _)| xi)
    }
}

/// Kernel values of one mode on a source rule.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KernelTable {
    /// w_q g(ξ_q) on the fine nodes, then the coarse ones.
    pub weighted: Vec<f64>,
    /// |w_q| times the error estimate of g(ξ_q).
    pub weighted_error: Vec<f64>,
    pub fine_len: usize,
    pub part: Part,
}

impl KernelTable {
    pub fn new(symbol: &TimeSymbol, c: f64, rule: &SourceRule, trunc: &Truncation) -> Self {
        let weights = rule.fine.iter().chain(rule.coarse.iter().flatten()).map(|&(_, w)| w);
        let mut part = Part::zero();
        let mut weighted = Vec::new();
        let mut weighted_error = Vec::new();
        for (xi, w) in rule.all_nodes().zip(weights) {
            let g = symbol.kernel(c, xi, trunc);
            weighted.push(w * g.value);
            weighted_error.push(w.abs() * g.est_error);
            part.converged &= g.converged;
            part.outer_terms = part.outer_terms.max(g.outer_terms);
            if part.failure.is_none() {
                part.failure = g.failure;
            }
        }
        Self {
            weighted,
            weighted_error,
            fine_len: rule.fine.len(),
            part,
        }
    }

    /// (fine value, its error, coarse − fine difference) for source values laid
    /// out like the rule's nodes.
    pub fn apply(&self, phi: &[Complex64]) -> (Complex64, f64, Option<f64>) {
        let (fine_w, coarse_w) = self.weighted.split_at(self.fine_len);
        let (fine_phi, coarse_phi) = phi.split_at(self.fine_len);
        let fine: Complex64 = fine_w.iter().zip(fine_phi).map(|(w, p)| w * p).sum();
        let err: f64 = self.weighted_error[..self.fine_len]
            .iter()
            .zip(fine_phi)
            .map(|(e, p)| e * p.norm())
            .sum();
        let delta = (!coarse_w.is_empty()).then(|| {
            let coarse: Complex64 = coarse_w.iter().zip(coarse_phi).map(|(w, p)| w * p).sum();
            (coarse - fine).norm()
        });
        (fine, err, delta)
    }
}

/// Mode solution for any time operator; the operator's variant picks the series family.
pub fn mode_solution(op: &TimeOperator, mode: &ModeCoefficient, t: f64, opts: &ModeOptions) -> Result<ModeValue, RdError> {
    opts.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(RdError::InvalidTimes(format!("time {t} must be positive")));
    }
    if !mode.c.is_finite() {
        return Err(RdError::InvalidProblem(format!("mode constant {} is not finite", mode.c)));
    }
    let symbol = TimeSymbol::new(op)?;
    let relax = symbol.relaxation(mode.c, t, &opts.trunc);
    if let Some(e) = hard_failure(&relax) {
        return Err(e);
    }
    let mut value = mode.f_hat * relax.value;
    let mut est_error = mode.f_hat.norm() * relax.est_error;
    let mut converged = relax.converged;
    let mut outer_terms = relax.outer_terms;
    let mut source_quadrature_delta = None;

    if let Some(phi_hat) = &mode.phi_hat {
        let rule = SourceRule::new(t, symbol.leading_order(), opts.source_nodes, opts.source_doubling);
        let table = KernelTable::new(&symbol, mode.c, &rule, &opts.trunc);
        if let Some(e) = hard_failure(&table.part) {
            return Err(e);
        }
        let phi: Vec<Complex64> = rule.all_nodes().map(|xi| phi_hat(t - xi)).collect();
        let (conv, err, delta) = table.apply(&phi);
        value += conv;
        est_error += err + delta.unwrap_or(0.0);
        converged &= table.part.converged;
        outer_terms = outer_terms.max(table.part.outer_terms);
        source_quadrature_delta = delta;
    }
    Ok(ModeValue {
        value,
        est_error,
        converged,
        outer_terms,
        source_quadrature_delta,
    })
}

fn hard_failure(part: &Part) -> Option<RdError> {
    part.failure.as_ref().map(|msg| RdError::ModeFailure(msg.clone()))
}

/// Mode of D^α N + a D^β N + b D^γ N with the double-series family.
pub fn mode_solution_three_term(
    mode: &ModeCoefficient,
    orders: (f64, f64, f64),
    coeffs: (f64, f64),
    t: f64,
    opts: &ModeOptions,
) -> Result<ModeValue, RdError> {
    let op = TimeOperator::Triple {
        alpha: orders.0,
        beta: orders.1,
        gamma: orders.2,
        a: coeffs.0,
        b: coeffs.1,
    };
    mode_solution(&op, mode, t, opts)
}

/// Mode of Σ_j a_j D^{α_j} N with the multinomial family; `terms` holds (a_j, α_j).
pub fn mode_solution_multi_term(mode: &ModeCoefficient, terms: &[(f64, f64)], t: f64, opts: &ModeOptions) -> Result<ModeValue, RdError> {
    mode_solution(&TimeOperator::General(terms.to_vec()), mode, t, opts)
}
