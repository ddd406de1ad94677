//! Problem description for
//!
//! Σ_j a_j D^{α_j} N = −ν² (−Δ)^{η/2} N + ξ² N + φ(x, t),  N(x, 0) = f(x),
//!
//! with Caputo time derivatives and the space operator acting as the real
//! symbol −ν²|k|^η on each Fourier mode. Orders above 1 assume zero initial slope.

use std::sync::Arc;

use num_complex::Complex64;

use super::RdError;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ProfileSpectrum = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type SourceField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SourceSpectrum = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
/// φ̂(k, ·) of one mode as a function of time.
pub type ModeSource = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Left-hand time operator.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeOperator {
    /// D^α + a D^β + b D^γ.
    Triple { alpha: f64, beta: f64, gamma: f64, a: f64, b: f64 },
    /// Σ_j a_j D^{α_j}, given as (a_j, α_j) pairs in any order.
    General(Vec<(f64, f64)>),
}

impl TimeOperator {
    /// (coefficient, order) pairs with strictly decreasing orders, equal orders
    /// merged and zero coefficients dropped. The first coefficient is nonzero.
    pub fn normalized(&self) -> Result<Vec<(f64, f64)>, RdError> {
        let raw = match self {
            TimeOperator::Triple { alpha, beta, gamma, a, b } => vec![(1.0, *alpha), (*a, *beta), (*b, *gamma)],
            TimeOperator::General(terms) => terms.clone(),
        };
        if raw.is_empty() {
            return Err(RdError::InvalidProblem("at least one time order is required".into()));
        }
        for &(c, o) in &raw {
            if !c.is_finite() {
                return Err(RdError::InvalidProblem(format!("time coefficient {c} is not finite")));
            }
            if !(o.is_finite() && o > 0.0 && o <= 2.0) {
                return Err(RdError::InvalidProblem(format!("time order {o} outside (0, 2]")));
            }
        }
        let mut sorted = raw;
        sorted.sort_by(|x, y| y.1.total_cmp(&x.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (c, o) in sorted {
            match merged.last_mut() {
                Some(last) if last.1 == o => last.0 += c,
                _ => merged.push((c, o)),
            }
        }
        merged.retain(|&(c, _)| c != 0.0);
        if merged.is_empty() {
            return Err(RdError::InvalidProblem("every time coefficient vanishes".into()));
        }
        Ok(merged)
    }

    pub fn leading_order(&self) -> Result<f64, RdError> {
        Ok(self.normalized()?[0].1)
    }
}

#[derive(Clone)]
pub enum InitialCondition {
    /// f̂ ≡ 1, applied spectrally.
    DiracDelta,
    /// Real profile sampled on the grid and transformed discretely.
    Sampled(Profile),
    /// Exact spectrum f̂(k) = ∫ f(x) e^{ikx} dx, with the profile itself when known.
    Spectrum { spectrum: ProfileSpectrum, profile: Option<Profile> },
}

impl std::fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialCondition::DiracDelta => write!(f, "DiracDelta"),
            InitialCondition::Sampled(_) => write!(f, "Sampled(<fn>)"),
            InitialCondition::Spectrum { profile, .. } => {
                write!(f, "Spectrum {{ profile: {} }}", if profile.is_some() { "<fn>" } else { "None" })
            }
        }
    }
}

/// Exogenous source term φ.
#[derive(Clone)]
pub enum Source {
    /// φ(x, t), sampled on the grid at every time the convolution needs.
    Sampled(SourceField),
    /// φ̂(k, t) given directly.
    Spectrum(SourceSpectrum),
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Sampled(_) => write!(f, "Sampled(<fn>)"),
            Source::Spectrum(_) => write!(f, "Spectrum(<fn>)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RdProblem {
    pub time: TimeOperator,
    /// η, the power of |k| in the space symbol.
    pub space_order: f64,
    /// ν².
    pub diffusion: f64,
    /// ξ², held constant.
    pub reaction: f64,
    pub initial: InitialCondition,
    pub source: Option<Source>,
}

impl RdProblem {
    /// Source-free problem with Dirac initial data.
    pub fn fundamental(time: TimeOperator, space_order: f64, diffusion: f64, reaction: f64) -> Self {
        Self {
            time,
            space_order,
            diffusion,
            reaction,
            initial: InitialCondition::DiracDelta,
            source: None,
        }
    }

    pub fn validate(&self) -> Result<(), RdError> {
        self.time.normalized()?;
        if !(self.space_order.is_finite() && self.space_order > 0.0) {
            return Err(RdError::InvalidProblem(format!("space order {} must be positive", self.space_order)));
        }
        if !(self.diffusion.is_finite() && self.diffusion >= 0.0) {
            return Err(RdError::InvalidProblem(format!("diffusion {} must be nonnegative", self.diffusion)));
        }
        if !(self.reaction.is_finite() && self.reaction >= 0.0) {
            return Err(RdError::InvalidProblem(format!("reaction {} must be nonnegative", self.reaction)));
        }
        Ok(())
    }

    /// c(k) = ν²|k|^η − ξ²; equals −ξ² at k = 0.
    pub fn mode_constant(&self, k: f64) -> f64 {
        let k = k.abs();
        let spatial = if k == 0.0 { 0.0 } else { self.diffusion * k.powf(self.space_order) };
        spatial - self.reaction
    }
}

/// Data of one Fourier mode.
#[derive(Clone)]
pub struct ModeCoefficient {
    pub k: f64,
    /// Real mode constant c = ν²|k|^η − ξ².
    pub c: f64,
    pub f_hat: Complex64,
    pub phi_hat: Option<ModeSource>,
}

impl std::fmt::Debug for ModeCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeCoefficient")
            .field("k", &self.k)
            .field("c", &self.c)
            .field("f_hat", &self.f_hat)
            .field("phi_hat", &self.phi_hat.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl ModeCoefficient {
    pub fn new(k: f64, c: f64, f_hat: Complex64) -> Self {
        Self { k, c, f_hat, phi_hat: None }
    }

    /// The mode of `problem` at wavenumber k with spectrum value f_hat.
    pub fn of_problem(problem: &RdProblem, k: f64, f_hat: Complex64) -> Self {
        Self::new(k, problem.mode_constant(k), f_hat)
    }

    pub fn with_source(mut self, phi_hat: ModeSource) -> Self {
        self.phi_hat = Some(phi_hat);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_sorts_merges_and_drops() {
        let op = TimeOperator::Triple {
            alpha: 0.5,
            beta: 0.9,
            gamma: 0.5,
            a: 2.0,
            b: 1.0,
        };
        assert_eq!(op.normalized().unwrap(), vec![(2.0, 0.9), (2.0, 0.5)]);
        let op = TimeOperator::General(vec![(0.0, 0.3), (1.5, 0.7)]);
        assert_eq!(op.normalized().unwrap(), vec![(1.5, 0.7)]);
        assert!(TimeOperator::General(vec![]).normalized().is_err());
        assert!(TimeOperator::General(vec![(1.0, 2.5)]).normalized().is_err());
        assert!(TimeOperator::General(vec![(1.0, 0.5), (-1.0, 0.5)]).normalized().is_err());
    }

    #[test]
    fn mode_constant_at_zero_is_minus_reaction() {
        let p = RdProblem::fundamental(TimeOperator::General(vec![(1.0, 0.5)]), 1.5, 2.0, 0.25);
        assert_eq!(p.mode_constant(0.0), -0.25);
        assert!((p.mode_constant(-2.0) - (2.0 * 2f64.powf(1.5) - 0.25)).abs() < 1e-15);
        assert!(p.validate().is_ok());
        let bad = RdProblem { diffusion: -1.0, ..p };
        assert!(bad.validate().is_err());
    }
}
