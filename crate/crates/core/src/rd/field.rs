//! Field assembly: every mode at every requested time, then one inverse
//! transform per time.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::SpectralGrid;
use super::mode::{KernelTable, ModeOptions, Part, SourceRule, TimeSymbol};
use super::problem::{InitialCondition, RdProblem, Source};
use super::RdError;
use crate::oracles::{solve_fode, FodeProblem, FractionalTerm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub mode: ModeOptions,
    /// Nyquist content above this fraction of the spectral peak marks the grid too coarse.
    pub coarse_threshold: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: ModeOptions::default(),
            coarse_threshold: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeDiagnostic {
    /// |k|; one entry per distinct magnitude j = 0..=N/2.
    pub k: f64,
    pub converged: bool,
    pub est_error: f64,
    pub outer_terms: usize,
    /// Set when the telegraph roots coincided and the confluent form was used.
    pub confluent: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDiagnostics {
    pub modes: Vec<ModeDiagnostic>,
    pub converged: bool,
    /// (1/2L) Σ_j (error of mode j): bounds the pointwise effect of mode errors.
    pub est_error: f64,
    /// max_i |Im N(x_i)| after the inverse transform.
    pub imaginary_residue: f64,
    /// max_i |Re N(x_i)|.
    pub peak: f64,
    /// |Ñ| at the Nyquist slot over max_j |Ñ_j|.
    pub nyquist_ratio: f64,
    pub grid_too_coarse: bool,
    /// Largest source-rule doubling difference over all modes.
    pub source_quadrature_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub grid: SpectralGrid,
    pub times: Vec<f64>,
    /// values[m][i] = N(x_i, t_m).
    pub values: Vec<Vec<f64>>,
    pub diagnostics: Vec<FieldDiagnostics>,
    /// Largest |N − N_oracle| per time, once compared.
    pub oracle_delta: Option<Vec<f64>>,
}

impl SolutionTable {
    pub fn converged(&self) -> bool {
        self.diagnostics.iter().all(|d| d.converged)
    }

    pub fn grid_too_coarse(&self) -> bool {
        self.diagnostics.iter().any(|d| d.grid_too_coarse)
    }

    /// Σ_i N(x_i, t_m) Δx.
    pub fn mass(&self, m: usize) -> f64 {
        self.values[m].iter().sum::<f64>() * self.grid.spacing()
    }

    /// Largest pointwise difference per time against a table on the same grid and times.
    pub fn max_abs_difference(&self, other: &SolutionTable) -> Result<Vec<f64>, RdError> {
        if self.grid != other.grid || self.times != other.times {
            return Err(RdError::InvalidGrid("tables differ in grid or times".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .collect())
    }

    pub fn with_oracle(mut self, oracle: &SolutionTable) -> Result<Self, RdError> {
        self.oracle_delta = Some(self.max_abs_difference(oracle)?);
        Ok(self)
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<(), RdError> {
    if times.is_empty() {
        return Err(RdError::InvalidTimes("no times requested".into()));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(RdError::InvalidTimes(format!("time {t} must be positive and finite")));
    }
    Ok(())
}

/// f̂ on every storage slot.
pub(crate) fn initial_spectrum(initial: &InitialCondition, grid: &SpectralGrid) -> Vec<Complex64> {
    match initial {
        InitialCondition::DiracDelta => vec![Complex64::new(1.0, 0.0); grid.mode_count()],
        InitialCondition::Sampled(f) => {
            let samples: Vec<Complex64> = grid.nodes().iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
            grid.forward(&samples)
        }
        InitialCondition::Spectrum { spectrum, .. } => grid.wavenumbers().iter().map(|&k| spectrum(k)).collect(),
    }
}

/// φ̂ at time τ on every storage slot.
pub(crate) fn source_spectrum(source: &Source, grid: &SpectralGrid, tau: f64) -> Vec<Complex64> {
    match source {
        Source::Sampled(phi) => {
            let samples: Vec<Complex64> = grid.nodes().iter().map(|&x| Complex64::new(phi(x, tau), 0.0)).collect();
            grid.forward(&samples)
        }
        Source::Spectrum(phi) => grid.wavenumbers().iter().map(|&k| phi(k, tau)).collect(),
    }
}

/// Per-slot spectrum with its error, turned into a field and its diagnostics.
pub(crate) fn assemble(
    grid: &SpectralGrid,
    spectrum: &[Complex64],
    slot_errors: &[f64],
    modes: Vec<ModeDiagnostic>,
    source_quadrature_delta: Option<f64>,
    coarse_threshold: f64,
) -> (Vec<f64>, FieldDiagnostics) {
    let field = grid.inverse(spectrum);
    let values: Vec<f64> = field.iter().map(|v| v.re).collect();
    let imaginary_residue = field.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let peak = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let spectral_peak = spectrum.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let nyquist_ratio = if spectral_peak > 0.0 {
        spectrum[grid.nyquist_slot()].norm() / spectral_peak
    } else {
        0.0
    };
    let est_error = slot_errors.iter().sum::<f64>() / (2.0 * grid.half_width());
    let converged = modes.iter().all(|m| m.converged);
    let diagnostics = FieldDiagnostics {
        modes,
        converged,
        est_error,
        imaginary_residue,
        peak,
        nyquist_ratio,
        grid_too_coarse: nyquist_ratio > coarse_threshold,
        source_quadrature_delta,
    };
    (values, diagnostics)
}

fn diagnostic(k: f64, part: &Part) -> ModeDiagnostic {
    ModeDiagnostic {
        k,
        converged: part.converged,
        est_error: part.est_error,
        outer_terms: part.outer_terms,
        confluent: false,
        failure: part.failure.clone(),
    }
}

/// Closed-form field at each requested time.
///
/// Modes that fail keep their partial value (or NaN) and are reported in the
/// diagnostics; only invalid input is an error.
pub fn solve_field(problem: &RdProblem, grid: &SpectralGrid, times: &[f64], opts: &SolveOptions) -> Result<SolutionTable, RdError> {
    problem.validate()?;
    opts.mode.validate()?;
    check_times(times)?;
    let symbol = TimeSymbol::new(&problem.time)?;
    let f_hat = initial_spectrum(&problem.initial, grid);
    let magnitudes = grid.distinct_magnitudes();
    let trunc = opts.mode.trunc;

    let slices: Vec<(Vec<f64>, FieldDiagnostics)> = times
        .par_iter()
        .map(|&t| {
            let rule = problem
                .source
                .as_ref()
                .map(|_| SourceRule::new(t, symbol.leading_order(), opts.mode.source_nodes, opts.mode.source_doubling));
            // phi[q][slot] at τ = t − ξ_q
            let phi: Option<Vec<Vec<Complex64>>> = match (&problem.source, &rule) {
                (Some(source), Some(rule)) => {
                    let nodes: Vec<f64> = rule.all_nodes().collect();
                    Some(nodes.par_iter().map(|xi| source_spectrum(source, grid, t - xi)).collect())
                }
                _ => None,
            };
            let per_mode: Vec<(Part, Option<KernelTable>)> = magnitudes
                .par_iter()
                .map(|&k| {
                    let c = problem.mode_constant(k);
                    let relax = symbol.relaxation(c, t, &trunc);
                    let table = rule.as_ref().map(|r| KernelTable::new(&symbol, c, r, &trunc));
                    (relax, table)
                })
                .collect();

            let mut spectrum = Vec::with_capacity(grid.mode_count());
            let mut slot_errors = Vec::with_capacity(grid.mode_count());
            let mut delta_max: Option<f64> = None;
            for slot in 0..grid.mode_count() {
                let (relax, table) = &per_mode[grid.magnitude_index(slot)];
                let mut v = f_hat[slot] * relax.value;
                let mut err = f_hat[slot].norm() * relax.est_error;
                if let (Some(table), Some(phi)) = (table, &phi) {
                    let column: Vec<Complex64> = phi.iter().map(|row| row[slot]).collect();
                    let (conv, conv_err, delta) = table.apply(&column);
                    v += conv;
                    err += conv_err + delta.unwrap_or(0.0);
                    if let Some(d) = delta {
                        delta_max = Some(delta_max.map_or(d, |m| m.max(d)));
                    }
                }
                spectrum.push(v);
                slot_errors.push(err);
            }
            let modes = magnitudes
                .iter()
                .zip(&per_mode)
                .map(|(&k, (relax, table))| {
                    let mut d = diagnostic(k, relax);
                    if let Some(table) = table {
                        d.converged &= table.part.converged;
                        d.outer_terms = d.outer_terms.max(table.part.outer_terms);
                        if d.failure.is_none() {
                            d.failure = table.part.failure.clone();
                        }
                    }
                    d
                })
                .collect();
            assemble(grid, &spectrum, &slot_errors, modes, delta_max, opts.coarse_threshold)
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

/// The same assembly with every mode taken from the fractional ODE oracle.
///
/// Each distinct |k| is solved on [0, t] with `steps` uniform steps; only
/// source-free problems are accepted.
pub fn oracle_field(problem: &RdProblem, grid: &SpectralGrid, times: &[f64], steps: usize) -> Result<SolutionTable, RdError> {
    problem.validate()?;
    check_times(times)?;
    if problem.source.is_some() {
        return Err(RdError::Unsupported("the oracle assembly handles source-free problems only".into()));
    }
    let terms: Vec<FractionalTerm> = problem
        .time
        .normalized()?
        .into_iter()
        .map(|(coef, order)| FractionalTerm {
            order,
            coef: Complex64::new(coef, 0.0),
        })
        .collect();
    let f_hat = initial_spectrum(&problem.initial, grid);
    let magnitudes = grid.distinct_magnitudes();
    let mut values = Vec::with_capacity(times.len());
    let mut diagnostics = Vec::with_capacity(times.len());
    for &t in times {
        let modes: Vec<Result<Complex64, RdError>> = magnitudes
            .par_iter()
            .map(|&k| {
                let p = FodeProblem::homogeneous(
                    terms.clone(),
                    Complex64::new(problem.mode_constant(k), 0.0),
                    Complex64::new(1.0, 0.0),
                    t,
                    steps,
                );
                Ok(solve_fode(&p)?.at(t))
            })
            .collect();
        let modes = modes.into_iter().collect::<Result<Vec<_>, _>>()?;
        let spectrum: Vec<Complex64> = (0..grid.mode_count())
            .map(|slot| f_hat[slot] * modes[grid.magnitude_index(slot)])
            .collect();
        let slot_errors = vec![0.0; grid.mode_count()];
        let mode_diag = magnitudes
            .iter()
            .map(|&k| ModeDiagnostic {
                k,
                converged: true,
                est_error: 0.0,
                outer_terms: 0,
                confluent: false,
                failure: None,
            })
            .collect();
        let (v, d) = assemble(grid, &spectrum, &slot_errors, mode_diag, None, f64::INFINITY);
        values.push(v);
        diagnostics.push(d);
    }
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
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::rd::problem::TimeOperator;

    fn heat() -> RdProblem {
        RdProblem::fundamental(
            TimeOperator::Triple {
                alpha: 1.0,
                beta: 0.5,
                gamma: 0.5,
                a: 0.0,
                b: 0.0,
            },
            2.0,
            1.0,
            0.0,
        )
    }

    #[test]
    fn heat_kernel() {
        let grid = SpectralGrid::new(20.0, 1024).unwrap();
        let times = [0.1, 0.25, 1.0];
        let table = solve_field(&heat(), &grid, &times, &SolveOptions::default()).unwrap();
        assert!(table.converged());
        assert!(!table.grid_too_coarse());
        for (m, &t) in times.iter().enumerate() {
            let worst = grid
                .nodes()
                .iter()
                .zip(&table.values[m])
                .map(|(&x, &v)| (v - (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "t = {t}: {worst}");
            assert!((table.mass(m) - 1.0).abs() < 1e-8);
            let d = &table.diagnostics[m];
            assert!(d.imaginary_residue <= 1e-10 * d.peak);
        }
    }

    #[test]
    fn coarse_grid_is_flagged_not_fatal() {
        let grid = SpectralGrid::new(20.0, 32).unwrap();
        let table = solve_field(&heat(), &grid, &[0.01], &SolveOptions::default()).unwrap();
        assert!(table.grid_too_coarse());
        assert!(table.diagnostics[0].nyquist_ratio > 1e-8);
    }

    #[test]
    fn sampled_and_spectral_initial_data_agree() {
        let grid = SpectralGrid::new(15.0, 256).unwrap();
        let profile: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|x: f64| (-x * x).exp());
        let spectrum: Arc<dyn Fn(f64) -> Complex64 + Send + Sync> =
            Arc::new(|k: f64| Complex64::new(PI.sqrt() * (-k * k / 4.0).exp(), 0.0));
        let op = TimeOperator::General(vec![(1.0, 0.8), (0.4, 0.3)]);
        let mut p = RdProblem::fundamental(op, 1.7, 0.6, 0.1);
        p.initial = InitialCondition::Sampled(profile.clone());
        let a = solve_field(&p, &grid, &[0.5], &SolveOptions::default()).unwrap();
        p.initial = InitialCondition::Spectrum {
            spectrum,
            profile: Some(profile),
        };
        let b = solve_field(&p, &grid, &[0.5], &SolveOptions::default()).unwrap();
        assert!(a.converged());
        assert!(a.max_abs_difference(&b).unwrap()[0] < 1e-13);
    }

    #[test]
    fn invalid_times() {
        let grid = SpectralGrid::new(5.0, 16).unwrap();
        assert!(solve_field(&heat(), &grid, &[], &SolveOptions::default()).is_err());
        assert!(solve_field(&heat(), &grid, &[0.5, -1.0], &SolveOptions::default()).is_err());
    }
}
