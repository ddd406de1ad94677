//! s^{ρ−1}/(s^α + a s^β + b s^γ + c) with α > γ > β ≥ 0:
//!
//! Σ_r (−1)^r Σ_{l≤r} C(r,l) a^l b^{r−l} t^e E^{r+1}_{α,e+1}(−c t^α),
//! e = (α−γ)r + (γ−β)l + α − ρ.

use num_complex::Complex64;

use super::{check_time, ml_term, InversionError, InversionResult, OuterSeries, Step, Truncation};
use crate::special::binomial;
use crate::summation::NeumaierSum;

/// Normalized three-term symbol.
///
/// Construction merges degenerate terms: a zero exponent moves its coefficient
/// into c, a term sharing the leading exponent α is folded into the leading
/// coefficient (which is then divided out and kept as `prefactor`), and β = γ
/// merges a and b. A term whose coefficient is zero has its exponent replaced by
/// a placeholder, since it no longer enters the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeTermSymbol {
    rho: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: f64,
    b: f64,
    c: f64,
    prefactor: f64,
    // α − ρ, kept separately so presets can supply it exactly
    offset: f64,
}

impl ThreeTermSymbol {
    pub fn new(rho: f64, alpha: f64, beta: f64, gamma: f64, a: f64, b: f64, c: f64) -> Result<Self, InversionError> {
        let invalid = |msg: String| Err(InversionError::InvalidSymbol(msg));
        for (name, v) in [("rho", rho), ("alpha", alpha), ("beta", beta), ("gamma", gamma), ("a", a), ("b", b), ("c", c)] {
            if !v.is_finite() {
                return invalid(format!("{name} = {v} is not finite"));
            }
        }
        if rho <= 0.0 {
            return invalid(format!("rho = {rho} must be positive"));
        }
        if alpha <= 0.0 {
            return invalid(format!("alpha = {alpha} must be positive"));
        }
        if beta < 0.0 || gamma < 0.0 {
            return invalid(format!("exponents beta = {beta}, gamma = {gamma} must be nonnegative"));
        }
        if alpha - rho + 1.0 <= 0.0 {
            return invalid(format!("rho = {rho} must be below alpha + 1 = {}", alpha + 1.0));
        }

        let (mut beta, mut gamma, mut a, mut b, mut c) = (beta, gamma, a, b, c);
        let mut lead = 1.0;
        if a != 0.0 && beta == 0.0 {
            c += a;
            a = 0.0;
        }
        if b != 0.0 && gamma == 0.0 {
            c += b;
            b = 0.0;
        }
        if a != 0.0 && beta == alpha {
            lead += a;
            a = 0.0;
        }
        if b != 0.0 && gamma == alpha {
            lead += b;
            b = 0.0;
        }
        if a != 0.0 && beta > alpha {
            return invalid(format!("beta = {beta} exceeds alpha = {alpha}"));
        }
        if b != 0.0 && gamma > alpha {
            return invalid(format!("gamma = {gamma} exceeds alpha = {alpha}"));
        }
        if a != 0.0 && b != 0.0 {
            if gamma == beta {
                a += b;
                b = 0.0;
            } else if gamma < beta {
                return invalid(format!("ordering alpha > gamma > beta violated: gamma = {gamma} < beta = {beta}"));
            }
        }
        match (a != 0.0, b != 0.0) {
            (false, false) => {
                beta = alpha / 3.0;
                gamma = 2.0 * alpha / 3.0;
            }
            (false, true) => beta = gamma / 2.0,
            (true, false) => gamma = (alpha + beta) / 2.0,
            (true, true) => {}
        }
        if lead == 0.0 {
            return invalid("leading coefficient vanishes after merging".into());
        }
        Ok(Self {
            rho,
            alpha,
            beta,
            gamma,
            a: a / lead,
            b: b / lead,
            c: c / lead,
            prefactor: 1.0 / lead,
            offset: alpha - rho,
        })
    }

    /// Symbol whose ρ is fixed by `preset` in terms of the given exponents.
    pub fn with_preset(preset: RhoPreset, alpha: f64, beta: f64, gamma: f64, a: f64, b: f64, c: f64) -> Result<Self, InversionError> {
        let (rho, offset) = match preset {
            RhoPreset::One => (1.0, alpha - 1.0),
            RhoPreset::Alpha => (alpha, 0.0),
            RhoPreset::Beta => (beta, alpha - beta),
            RhoPreset::Gamma => (gamma, alpha - gamma),
            RhoPreset::AlphaPlusBeta => (alpha + beta, -beta),
        };
        let mut sym = Self::new(rho, alpha, beta, gamma, a, b, c)?;
        sym.offset = offset;
        Ok(sym)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// The symbol itself at complex s (principal powers).
    pub fn laplace_value(&self, s: Complex64) -> Complex64 {
        let ls = s.ln();
        let pow = |e: f64| (e * ls).exp();
        let den = pow(self.alpha) + self.a * pow(self.beta) + self.b * pow(self.gamma) + self.c;
        self.prefactor * pow(self.rho - 1.0) / den
    }
}

/// Named choices of the numerator exponent ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RhoPreset {
    One,
    Alpha,
    Beta,
    Gamma,
    AlphaPlusBeta,
}

impl RhoPreset {
    pub const ALL: [RhoPreset; 5] = [
        RhoPreset::One,
        RhoPreset::Alpha,
        RhoPreset::Beta,
        RhoPreset::Gamma,
        RhoPreset::AlphaPlusBeta,
    ];

    pub fn rho(&self, alpha: f64, beta: f64, gamma: f64) -> f64 {
        match self {
            RhoPreset::One => 1.0,
            RhoPreset::Alpha => alpha,
            RhoPreset::Beta => beta,
            RhoPreset::Gamma => gamma,
            RhoPreset::AlphaPlusBeta => alpha + beta,
        }
    }
}

/// Inverse Laplace transform of the three-term symbol at time t.
pub fn invert_three_term(sym: &ThreeTermSymbol, t: f64, trunc: &Truncation) -> Result<InversionResult, InversionError> {
    trunc.validate()?;
    check_time(t)?;
    let ThreeTermSymbol {
        alpha,
        beta,
        gamma,
        a,
        b,
        c,
        prefactor,
        offset,
        ..
    } = *sym;
    let z = -c * t.powf(alpha);
    let ln_t = t.ln();
    let ml_tol = trunc.ml_tol();
    let mut outer = OuterSeries::new(*trunc);

    for r in 0..trunc.max_outer {
        let (l_lo, l_hi) = match (a != 0.0, b != 0.0) {
            (_, false) => (r, r),
            (false, true) => (0, 0),
            (true, true) => (0, r),
        };
        let evaluations = l_hi - l_lo + 1;
        if outer.evaluations() + evaluations > trunc.max_total_terms {
            return Err(InversionError::CombinatorialBlowup {
                m: r as u32,
                count: evaluations as u64,
            });
        }
        let mut block = NeumaierSum::new();
        let mut abs_terms = 0.0;
        let mut ml_error = 0.0;
        for l in l_lo..=l_hi {
            let coef = binomial(r as u32, l as u32) * a.powi(l as i32) * b.powi((r - l) as i32);
            if coef == 0.0 {
                continue;
            }
            let e = (alpha - gamma) * r as f64 + (gamma - beta) * l as f64 + offset;
            let (v, err) = ml_term(alpha, e + 1.0, r as f64 + 1.0, z, (e * ln_t).exp(), ml_tol)?;
            let term = coef * v;
            block.add(term);
            abs_terms += term.abs();
            ml_error += coef.abs() * err;
        }
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let step = outer.push(
            prefactor * sign * block.value(),
            prefactor.abs() * abs_terms,
            prefactor.abs() * ml_error,
            evaluations,
        );
        if let Step::Done(result) = step {
            return Ok(result);
        }
    }
    Err(outer.exhausted())
}

/// s^{ρ−1}/(s^α + a s^β + b): the three-term series with the middle term removed.
pub fn invert_two_term(rho: f64, alpha: f64, beta: f64, a: f64, b: f64, t: f64, trunc: &Truncation) -> Result<InversionResult, InversionError> {
    let sym = ThreeTermSymbol::new(rho, alpha, beta, alpha, a, 0.0, b)?;
    invert_three_term(&sym, t, trunc)
}

/// Three-term inversion with ρ fixed by a preset.
#[allow(clippy::too_many_arguments)]
pub fn invert_three_term_preset(
    preset: RhoPreset,
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: f64,
    b: f64,
    c: f64,
    t: f64,
    trunc: &Truncation,
) -> Result<InversionResult, InversionError> {
    let sym = ThreeTermSymbol::with_preset(preset, alpha, beta, gamma, a, b, c)?;
    invert_three_term(&sym, t, trunc)
}
