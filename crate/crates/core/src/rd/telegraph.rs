//! Fractional telegraph equation
//!
//! D^{2α} N + a D^α N = ν² ∂²N + ξ² N,  N(x, 0) = δ(x),  N_t(x, 0) = 0.
//!
//! With b = ν²k² − ξ² and λ, μ the roots of y² + a y + b, each mode is
//!
//! N*(k, t) = ½[(1 + a/d) E_α(λt^α) + (1 − a/d) E_α(μt^α)],  d = λ − μ = √(a² − 4b).
//!
//! When the roots coincide the bracket is replaced by its limit
//! E_α(λt^α) + (a/2) t^α E²_{α,α+1}(λt^α).

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{assemble, check_times, ModeDiagnostic, SolutionTable};
use super::grid::SpectralGrid;
use super::RdError;
use crate::ml::{eval_mittag_leffler, eval_prabhakar, PrabhakarOrder};

/// |a² − 4b| at or below this times max(1, a²) counts as coincident roots.
/// The two-root form loses about ε/√|a² − 4b| there while the confluent form is
/// off by O(|a² − 4b|); the crossover sits near ε^{2/3}.
pub const CONFLUENT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphParams {
    /// Damping a.
    pub damping: f64,
    pub nu: f64,
    pub xi: f64,
    /// α in (0, 1]; the leading order is 2α.
    pub alpha: f64,
}

impl TelegraphParams {
    pub fn validate(&self) -> Result<(), RdError> {
        for (name, v) in [("damping", self.damping), ("nu", self.nu), ("xi", self.xi)] {
            if !v.is_finite() {
                return Err(RdError::InvalidProblem(format!("{name} = {v} is not finite")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(RdError::InvalidProblem(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        Ok(())
    }

    /// b = ν²k² − ξ².
    pub fn mode_constant(&self, k: f64) -> f64 {
        self.nu * self.nu * k * k - self.xi * self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphMode {
    pub value: f64,
    pub est_error: f64,
    pub converged: bool,
    pub confluent: bool,
}

/// Algebraic arrangement of the two-root bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TelegraphForm {
    /// ½[(1 + a/d) E_α(λt^α) + (1 − a/d) E_α(μt^α)].
    Weighted,
    /// [(λ + a) E_α(λt^α) − (μ + a) E_α(μt^α)] / d.
    RootDifference,
}

/// N*(k, t) for f̂ = 1; `tol` is handed to each Mittag-Leffler evaluation.
pub fn telegraph_mode(params: &TelegraphParams, k: f64, t: f64, tol: f64) -> Result<TelegraphMode, RdError> {
    telegraph_mode_with_form(params, k, t, tol, TelegraphForm::Weighted)
}

pub fn telegraph_mode_with_form(params: &TelegraphParams, k: f64, t: f64, tol: f64, form: TelegraphForm) -> Result<TelegraphMode, RdError> {
    params.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(RdError::InvalidTimes(format!("time {t} must be positive")));
    }
    let a = params.damping;
    let alpha = params.alpha;
    let b = params.mode_constant(k);
    let disc = a * a - 4.0 * b;
    let ta = t.powf(alpha);

    if disc.abs() <= CONFLUENT_THRESHOLD * (a * a).max(1.0) {
        let z = Complex64::new(-0.5 * a * ta, 0.0);
        let e1 = eval_mittag_leffler(alpha, z, tol)?;
        let e2 = eval_prabhakar(PrabhakarOrder::new(alpha, alpha + 1.0, 2.0)?, z, tol)?;
        let w = 0.5 * a * ta;
        let value = e1.value.re + w * e2.value.re;
        let scale = e1.value.norm() + (w * e2.value).norm();
        // the neglected O(a² − 4b) term is below the threshold times the scale
        let est_error = e1.est_error + w.abs() * e2.est_error + (4.0 * f64::EPSILON + disc.abs()) * scale;
        return Ok(TelegraphMode {
            value,
            est_error,
            converged: est_error <= tol * scale.max(1.0),
            confluent: true,
        });
    }

    let d = Complex64::new(disc, 0.0).sqrt();
    let lambda = 0.5 * (-a + d);
    let mu = 0.5 * (-a - d);
    let e1 = eval_mittag_leffler(alpha, lambda * ta, tol)?;
    let e2 = eval_mittag_leffler(alpha, mu * ta, tol)?;
    let (w1, w2) = match form {
        TelegraphForm::Weighted => (0.5 * (1.0 + a / d), 0.5 * (1.0 - a / d)),
        TelegraphForm::RootDifference => ((lambda + a) / d, -(mu + a) / d),
    };
    let value = w1 * e1.value + w2 * e2.value;
    let scale = (w1 * e1.value).norm() + (w2 * e2.value).norm();
    let est_error = w1.norm() * e1.est_error + w2.norm() * e2.est_error + 8.0 * f64::EPSILON * scale;
    Ok(TelegraphMode {
        value: value.re,
        est_error,
        converged: est_error <= tol * scale.max(1.0),
        confluent: false,
    })
}

/// Fundamental solution on the grid at each requested time.
pub fn telegraph_solution(params: &TelegraphParams, grid: &SpectralGrid, times: &[f64], tol: f64) -> Result<SolutionTable, RdError> {
    telegraph_solution_with_form(params, grid, times, tol, TelegraphForm::Weighted)
}

pub fn telegraph_solution_with_form(
    params: &TelegraphParams,
    grid: &SpectralGrid,
    times: &[f64],
    tol: f64,
    form: TelegraphForm,
) -> Result<SolutionTable, RdError> {
    params.validate()?;
    check_times(times)?;
    let magnitudes = grid.distinct_magnitudes();
    let slices: Vec<(Vec<f64>, _)> = times
        .par_iter()
        .map(|&t| {
            let modes: Vec<(f64, ModeDiagnostic)> = magnitudes
                .par_iter()
                .map(|&k| match telegraph_mode_with_form(params, k, t, tol, form) {
                    Ok(m) => (
                        m.value,
                        ModeDiagnostic {
                            k,
                            converged: m.converged,
                            est_error: m.est_error,
                            outer_terms: 0,
                            confluent: m.confluent,
                            failure: None,
                        },
                    ),
                    Err(e) => (
                        f64::NAN,
                        ModeDiagnostic {
                            k,
                            converged: false,
                            est_error: f64::INFINITY,
                            outer_terms: 0,
                            confluent: false,
                            failure: Some(e.to_string()),
                        },
                    ),
                })
                .collect();
            let spectrum: Vec<Complex64> = (0..grid.mode_count())
                .map(|slot| Complex64::new(modes[grid.magnitude_index(slot)].0, 0.0))
                .collect();
            let errors: Vec<f64> = (0..grid.mode_count())
                .map(|slot| modes[grid.magnitude_index(slot)].1.est_error)
                .collect();
            let diag = modes.into_iter().map(|(_, d)| d).collect();
            assemble(grid, &spectrum, &errors, diag, None, 1e-8)
        })
        .collect();
    let (values, diagnostics) = slices.into_iter().unzip();
    Ok(SolutionTable {
        grid: grid.clone(),
        times: times.to_vec(),
        values,
        diagnostics,
        oracle_delta: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{solve_fode, FodeProblem, FractionalTerm};
    use crate::rd::mode::{mode_solution_three_term, ModeOptions};
    use crate::rd::problem::ModeCoefficient;

    fn params(damping: f64, nu: f64, xi: f64, alpha: f64) -> TelegraphParams {
        TelegraphParams { damping, nu, xi, alpha }
    }

    /// u'' + a u' + b u = 0, u(0) = 1, u'(0) = 0.
    fn damped_wave(a: f64, b: f64, t: f64) -> f64 {
        let disc = Complex64::new(a * a - 4.0 * b, 0.0).sqrt();
        let l = 0.5 * (-a + disc);
        let m = 0.5 * (-a - disc);
        ((m * (l * t).exp() - l * (m * t).exp()) / (m - l)).re
    }

    #[test]
    fn classical_limit() {
        for &(a, k) in &[(3.0, 1.0), (1.0, 2.0), (0.5, 0.3), (0.0, 1.5)] {
            for &t in &[0.2, 1.0, 2.5] {
                let v = telegraph_mode(&params(a, 1.0, 0.0, 1.0), k, t, 1e-14).unwrap();
                assert!(!v.confluent);
                let exact = damped_wave(a, k * k, t);
                assert!((v.value - exact).abs() < 1e-10, "a={a} k={k} t={t}: {} vs {exact}", v.value);
            }
        }
    }

    #[test]
    fn zero_mode_is_one() {
        for &alpha in &[0.4, 0.9, 1.0] {
            let v = telegraph_mode(&params(1.3, 1.0, 0.0, alpha), 0.0, 1.7, 1e-14).unwrap();
            assert!((v.value - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn confluent_mode_matches_fode_oracle() {
        // a = 2, b = 1: a² = 4b exactly
        let p = params(2.0, 1.0, 0.0, 0.9);
        for &t in &[0.5, 1.0] {
            let v = telegraph_mode(&p, 1.0, t, 1e-14).unwrap();
            assert!(v.confluent);
            let fp = FodeProblem::homogeneous(
                vec![
                    FractionalTerm { order: 1.8, coef: Complex64::new(1.0, 0.0) },
                    FractionalTerm { order: 0.9, coef: Complex64::new(2.0, 0.0) },
                ],
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                t,
                4000,
            );
            let oracle = solve_fode(&fp).unwrap().at(t).re;
            assert!((v.value - oracle).abs() < 1e-4, "t={t}: {} vs {oracle}", v.value);
        }
    }

    #[test]
    fn confluent_form_is_continuous() {
        // a² − 4b = ±1e-6 on either side of the coincident point
        let alpha = 0.7;
        let at = |k: f64| telegraph_mode(&params(2.0, 1.0, 0.0, alpha), k, 1.3, 1e-14).unwrap();
        let mid = at(1.0);
        let below = at((1.0f64 - 2.5e-7).sqrt());
        let above = at((1.0f64 + 2.5e-7).sqrt());
        assert!(mid.confluent && !below.confluent && !above.confluent);
        assert!((mid.value - below.value).abs() < 1e-6);
        assert!((mid.value - above.value).abs() < 1e-6);
    }

    #[test]
    fn agrees_with_three_term_series() {
        // D^{2α} + a D^α with c = ν²k² − ξ² is the three-term symbol with b = 0
        let (a, nu, xi, alpha) = (1.5, 0.8, 0.3, 0.6);
        let p = params(a, nu, xi, alpha);
        let opts = ModeOptions::default();
        for &k in &[0.0, 0.5, 1.2, 3.0] {
            let c = p.mode_constant(k);
            let mode = ModeCoefficient::new(k, c, Complex64::new(1.0, 0.0));
            let s = mode_solution_three_term(&mode, (2.0 * alpha, alpha, alpha), (a, 0.0), 0.9, &opts).unwrap();
            let v = telegraph_mode(&p, k, 0.9, 1e-14).unwrap();
            assert!((s.value.re - v.value).abs() < 1e-10, "k={k}: {} vs {}", s.value.re, v.value);
        }
    }

    #[test]
    fn both_forms_assemble_the_same_field() {
        let grid = SpectralGrid::new(15.0, 128).unwrap();
        for &(a, alpha) in &[(1.0, 0.7), (3.0, 0.9), (0.4, 1.0)] {
            let p = params(a, 1.0, 0.2, alpha);
            let x = telegraph_solution_with_form(&p, &grid, &[0.8], 1e-14, TelegraphForm::Weighted).unwrap();
            let y = telegraph_solution_with_form(&p, &grid, &[0.8], 1e-14, TelegraphForm::RootDifference).unwrap();
            assert!(x.max_abs_difference(&y).unwrap()[0] < 1e-12);
        }
    }

    #[test]
    fn field_mass_and_realness() {
        let grid = SpectralGrid::new(20.0, 256).unwrap();
        let table = telegraph_solution(&params(1.0, 1.0, 0.0, 0.5), &grid, &[0.5, 1.5], 1e-13).unwrap();
        for m in 0..2 {
            assert!((table.mass(m) - 1.0).abs() < 1e-10);
            let d = &table.diagnostics[m];
            assert!(d.imaginary_residue <= 1e-10 * d.peak);
            assert!(d.converged);
        }
    }
}
