//! s^{ρ−1}/(a₀ + a₁s^{α₁} + a₂s^{α₂} + … + a_{n+1}s^{α_{n+1}}), α₁ > α₂ > … > 0:
//!
//! (1/a₁) Σ_m (−1)^m Σ_{r₁+…+r_n=m} m!/(r₁!…r_n!) Π_j (a_{j+1}/a₁)^{r_j}
//!        t^{A−ρ} E^{m+1}_{α₁,A−ρ+1}(−(a₀/a₁) t^{α₁}),
//! A = α₁(1+m) − Σ_j α_{j+1} r_j.

use num_complex::Complex64;

use super::{
    check_time, composition_count, ml_term, Compositions, InversionError, InversionResult, OuterSeries, Step, Truncation,
};
use crate::special::multinomial;
use crate::summation::NeumaierSum;

/// Multi-term symbol. Terms after the first with a zero coefficient are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTermSymbol {
    rho: f64,
    a0: f64,
    terms: Vec<(f64, f64)>,
    // α₁ − ρ
    offset: f64,
}

impl MultiTermSymbol {
    /// `terms` lists (a_j, α_j) for j = 1..n+1, dominant exponent first.
    pub fn new(rho: f64, a0: f64, terms: &[(f64, f64)]) -> Result<Self, InversionError> {
        let invalid = |msg: String| Err(InversionError::InvalidSymbol(msg));
        if terms.is_empty() {
            return invalid("at least one power term is required".into());
        }
        if !(rho.is_finite() && rho > 0.0) {
            return invalid(format!("rho = {rho} must be positive"));
        }
        if !a0.is_finite() {
            return invalid(format!("a0 = {a0} is not finite"));
        }
        for (j, &(a, e)) in terms.iter().enumerate() {
            if !(a.is_finite() && e.is_finite() && e > 0.0) {
                return invalid(format!("term {}: coefficient {a}, exponent {e} must be finite with a positive exponent", j + 1));
            }
            if j > 0 && e >= terms[j - 1].1 {
                return invalid(format!(
                    "exponents must strictly decrease: alpha_{} = {e} is not below {}",
                    j + 1,
                    terms[j - 1].1
                ));
            }
        }
        let (a1, alpha1) = terms[0];
        if a1 == 0.0 {
            return invalid("leading coefficient a_1 must be nonzero".into());
        }
        if alpha1 - rho + 1.0 <= 0.0 {
            return invalid(format!("rho = {rho} must be below alpha_1 + 1 = {}", alpha1 + 1.0));
        }
        let mut kept = vec![terms[0]];
        kept.extend(terms[1..].iter().copied().filter(|&(a, _)| a != 0.0));
        Ok(Self {
            rho,
            a0,
            terms: kept,
            offset: alpha1 - rho,
        })
    }

    /// Symbol whose ρ is fixed by `preset` in terms of the leading exponents.
    pub fn with_preset(preset: GeneralPreset, a0: f64, terms: &[(f64, f64)]) -> Result<Self, InversionError> {
        let alpha1 = terms.first().map(|t| t.1).unwrap_or(f64::NAN);
        let alpha2 = terms.get(1).map(|t| t.1);
        let need2 = || alpha2.ok_or_else(|| InversionError::InvalidSymbol(format!("preset {preset:?} needs a second term")));
        let (rho, offset) = match preset {
            GeneralPreset::One => (1.0, alpha1 - 1.0),
            GeneralPreset::Alpha1 => (alpha1, 0.0),
            GeneralPreset::Alpha2 => {
                let a2 = need2()?;
                (a2, alpha1 - a2)
            }
            GeneralPreset::Alpha1PlusAlpha2 => {
                let a2 = need2()?;
                (alpha1 + a2, -a2)
            }
        };
        let mut sym = Self::new(rho, a0, terms)?;
        sym.offset = offset;
        Ok(sym)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }
    /// (a_j, α_j) pairs, zero coefficients removed.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn laplace_value(&self, s: Complex64) -> Complex64 {
        let ls = s.ln();
        let mut den = Complex64::new(self.a0, 0.0);
        for &(a, e) in &self.terms {
            den += a * (e * ls).exp();
        }
        ((self.rho - 1.0) * ls).exp() / den
    }
}

/// Named choices of ρ for the general symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneralPreset {
    One,
    Alpha1,
    Alpha2,
    Alpha1PlusAlpha2,
}

impl GeneralPreset {
    pub const ALL: [GeneralPreset; 4] = [
        GeneralPreset::One,
        GeneralPreset::Alpha1,
        GeneralPreset::Alpha2,
        GeneralPreset::Alpha1PlusAlpha2,
    ];
}

/// Inverse Laplace transform of the general symbol at time t.
pub fn invert_general(sym: &MultiTermSymbol, t: f64, trunc: &Truncation) -> Result<InversionResult, InversionError> {
    trunc.validate()?;
    check_time(t)?;
    let (a1, alpha1) = sym.terms[0];
    let ratios: Vec<f64> = sym.terms[1..].iter().map(|&(a, _)| a / a1).collect();
    let exps: Vec<f64> = sym.terms[1..].iter().map(|&(_, e)| e).collect();
    let n = ratios.len();
    let z = -(sym.a0 / a1) * t.powf(alpha1);
    let ln_t = t.ln();
    let ml_tol = trunc.ml_tol();
    let scale = 1.0 / a1;
    let mut outer = OuterSeries::new(*trunc);

    for m in 0..trunc.max_outer as u32 {
        let mut block = NeumaierSum::new();
        let mut abs_terms = 0.0;
        let mut ml_error = 0.0;
        let mut evaluations = 0;
        if m == 0 || n > 0 {
            let count = if n == 0 { 1 } else { composition_count(m, n) };
            if outer.evaluations() as u64 + count > trunc.max_total_terms as u64 {
                return Err(InversionError::CombinatorialBlowup { m, count });
            }
            let parts = if n == 0 { vec![vec![]] } else { Compositions::new(m, n).collect() };
            for r in parts {
                let mut coef = multinomial(&r);
                let mut lowered = 0.0;
                for j in 0..n {
                    coef *= ratios[j].powi(r[j] as i32);
                    lowered += exps[j] * f64::from(r[j]);
                }
                // A − ρ
                let e = sym.offset + alpha1 * f64::from(m) - lowered;
                let (v, err) = ml_term(alpha1, e + 1.0, f64::from(m) + 1.0, z, (e * ln_t).exp(), ml_tol)?;
                let term = coef * v;
                block.add(term);
                abs_terms += term.abs();
                ml_error += coef.abs() * err;
                evaluations += 1;
            }
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let step = outer.push(
            scale * sign * block.value(),
            scale.abs() * abs_terms,
            scale.abs() * ml_error,
            evaluations,
        );
        if let Step::Done(result) = step {
            return Ok(result);
        }
    }
    Err(outer.exhausted())
}

/// General inversion with ρ fixed by a preset.
pub fn invert_general_preset(
    preset: GeneralPreset,
    a0: f64,
    terms: &[(f64, f64)],
    t: f64,
    trunc: &Truncation,
) -> Result<InversionResult, InversionError> {
    let sym = MultiTermSymbol::with_preset(preset, a0, terms)?;
    invert_general(&sym, t, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::{invert_three_term, ThreeTermSymbol};
    use crate::ml::{eval_wiman, PrabhakarOrder};
    use approx::assert_relative_eq;

    fn tr() -> Truncation {
        Truncation::default()
    }

    #[test]
    fn single_term_is_classical_relaxation() {
        // (1/a₁) t^{α₁−1} E_{α₁,α₁}(−(a₀/a₁) t^{α₁})
        let (a0, a1, alpha1, t) = (1.5, 2.0, 0.7, 0.9);
        let sym = MultiTermSymbol::new(1.0, a0, &[(a1, alpha1)]).unwrap();
        let r = invert_general(&sym, t, &tr()).unwrap();
        let e = eval_wiman(alpha1, alpha1, Complex64::new(-(a0 / a1) * t.powf(alpha1), 0.0), 1e-15).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, t.powf(alpha1 - 1.0) * e.value.re / a1, max_relative = 1e-14);
    }

    #[test]
    fn two_terms_reduce_to_three_term_series() {
        let (a0, a1, a2, al1, al2) = (0.8, 1.6, 0.4, 0.9, 0.35);
        for &rho in &[1.0, 0.9, 0.35] {
            for &t in &[0.1, 0.7, 1.5] {
                let g = MultiTermSymbol::new(rho, a0, &[(a1, al1), (a2, al2)]).unwrap();
                let s = ThreeTermSymbol::new(rho, al1, al2, 0.5, a2 / a1, 0.0, a0 / a1).unwrap();
                let x = invert_general(&g, t, &tr()).unwrap().value;
                let y = invert_three_term(&s, t, &tr()).unwrap().value / a1;
                assert_relative_eq!(x, y, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn three_terms_match_full_three_term_series() {
        let (rho, al, be, ga, a, b, c) = (0.9, 0.9, 0.3, 0.6, 1.0, 1.0, 1.0);
        let g = MultiTermSymbol::new(rho, c, &[(1.0, al), (b, ga), (a, be)]).unwrap();
        let s = ThreeTermSymbol::new(rho, al, be, ga, a, b, c).unwrap();
        // the outer series needs about 110 blocks at t = 2
        let trunc = Truncation { max_outer: 400, ..tr() };
        for &t in &[0.1, 0.5, 1.0, 2.0] {
            let x = invert_general(&g, t, &trunc).unwrap();
            let y = invert_three_term(&s, t, &trunc).unwrap();
            assert!((x.value - y.value).abs() <= 1e-11 + x.est_error + y.est_error);
        }
    }

    #[test]
    fn scaling_the_symbol_scales_the_inverse() {
        let terms = [(1.0, 0.9), (0.5, 0.5), (0.25, 0.3)];
        let doubled: Vec<(f64, f64)> = terms.iter().map(|&(a, e)| (2.0 * a, e)).collect();
        let x = invert_general(&MultiTermSymbol::new(1.0, 1.0, &terms).unwrap(), 0.7, &tr()).unwrap().value;
        let y = invert_general(&MultiTermSymbol::new(1.0, 2.0, &doubled).unwrap(), 0.7, &tr()).unwrap().value;
        assert_relative_eq!(y, 0.5 * x, max_relative = 1e-15);
    }

    #[test]
    fn mass_identity_without_constant() {
        // Σ_ω a_ω L^{-1}{s^{α_ω−1}/P(s)} = L^{-1}{1/s} = 1 when a₀ = 0
        let terms = [(1.0, 0.8), (0.6, 0.5), (0.3, 0.2)];
        for &t in &[0.05, 0.5, 2.0] {
            let mut total = 0.0;
            for &(a, e) in &terms {
                let sym = MultiTermSymbol::new(e, 0.0, &terms).unwrap();
                total += a * invert_general(&sym, t, &tr()).unwrap().value;
            }
            assert!((total - 1.0).abs() < 1e-10, "t={t}: {total}");
        }
    }

    #[test]
    fn zero_coefficients_are_dropped_and_blowup_reported() {
        let sym = MultiTermSymbol::new(1.0, 1.0, &[(1.0, 0.9), (0.0, 0.5), (0.2, 0.3)]).unwrap();
        assert_eq!(sym.terms().len(), 2);
        let many: Vec<(f64, f64)> = (0..8).map(|j| (1.0, 0.9 - 0.1 * j as f64)).collect();
        let sym = MultiTermSymbol::new(1.0, 1.0, &many).unwrap();
        let trunc = Truncation {
            max_total_terms: 500,
            ..tr()
        };
        assert!(matches!(
            invert_general(&sym, 2.0, &trunc),
            Err(InversionError::CombinatorialBlowup { .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(MultiTermSymbol::new(1.0, 1.0, &[]).is_err());
        assert!(MultiTermSymbol::new(1.0, 1.0, &[(0.0, 0.9)]).is_err());
        assert!(MultiTermSymbol::new(1.0, 1.0, &[(1.0, 0.5), (1.0, 0.7)]).is_err());
        assert!(MultiTermSymbol::new(1.0, 1.0, &[(1.0, 0.5), (1.0, 0.5)]).is_err());
        assert!(MultiTermSymbol::new(2.0, 1.0, &[(1.0, 0.5)]).is_err());
        assert!(MultiTermSymbol::with_preset(GeneralPreset::Alpha2, 1.0, &[(1.0, 0.5)]).is_err());
        let _ = PrabhakarOrder::new(1.0, 1.0, 1.0).unwrap();
    }
}
