//! Green's-function assembly of the same solution:
//!
//! N(x, t) = ∫ G₁(x − y, t) f(y) dy + ∫₀ᵗ ∫ G₂(x − y, ξ) φ(y, t − ξ) dy dξ,
//!
//! with G₁(x, t) = (1/π) ∫₀^K cos(kx) M(k, t) dk for the relaxation multiplier M
//! and G₂ likewise from the source kernel. K is the grid's Nyquist wavenumber,
//! so the band-limited kernels convolved on the grid reproduce what the spectral
//! assembly computes, through an independent order of operations.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::field::{check_times, initial_spectrum, FieldDiagnostics, ModeDiagnostic, SolutionTable};
use super::grid::SpectralGrid;
use super::mode::{ModeOptions, Part, SourceRule, TimeSymbol};
use super::problem::{InitialCondition, RdProblem, Source};
use super::RdError;
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    pub mode: ModeOptions,
    /// Gauss-Legendre nodes per panel of the k integral.
    pub panel_nodes: usize,
    /// Panels per period of cos(kx) at the largest offset 2L.
    pub panels_per_period: usize,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self {
            mode: ModeOptions {
                source_doubling: false,
                ..ModeOptions::default()
            },
            panel_nodes: 8,
            panels_per_period: 2,
        }
    }
}

/// Composite Gauss-Legendre rule on [0, K].
fn wavenumber_rule(grid: &SpectralGrid, opts: &GreenOptions) -> Vec<(f64, f64)> {
    let cutoff = PI * (grid.mode_count() / 2) as f64 / grid.half_width();
    let periods = cutoff * 2.0 * grid.half_width() / (2.0 * PI);
    let panels = (opts.panels_per_period as f64 * periods).ceil().max(1.0) as usize;
    let (x, w) = gauss_legendre(opts.panel_nodes);
    let h = cutoff / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let left = p as f64 * h;
            x.iter().zip(&w).map(move |(&x, &w)| (left + 0.5 * h * (x + 1.0), 0.5 * h * w))
        })
        .collect()
}

/// G(mΔx) for m = 0..N from multiplier values on the k rule; G is even.
fn kernel_on_offsets(grid: &SpectralGrid, rule: &[(f64, f64)], multiplier: &[f64]) -> Vec<f64> {
    let dx = grid.spacing();
    (0..grid.mode_count())
        .into_par_iter()
        .map(|m| {
            let x = m as f64 * dx;
            rule.iter()
                .zip(multiplier)
                .map(|(&(k, w), &v)| w * (k * x).cos() * v)
                .sum::<f64>()
                / PI
        })
        .collect()
}

/// Δx Σ_m G(x_i − x_m) g(x_m).
fn convolve(g: &[f64], samples: &[f64], dx: f64) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|m| g[i.abs_diff(m)] * samples[m]).sum::<f64>() * dx)
        .collect()
}

fn fold(parts: &[Part], rule: &[(f64, f64)]) -> (Vec<ModeDiagnostic>, f64) {
    let diag = rule
        .iter()
        .zip(parts)
        .map(|(&(k, _), p)| ModeDiagnostic {
            k,
            converged: p.converged,
            est_error: p.est_error,
            outer_terms: p.outer_terms,
            confluent: false,
            failure: p.failure.clone(),
        })
        .collect();
    let err = rule.iter().zip(parts).map(|(&(_, w), p)| w * p.est_error).sum::<f64>() / PI;
    (diag, err)
}

/// Solution assembled from G₁ and G₂ convolved on the grid.
///
/// Needs the initial profile in x (Dirac data gives N = G₁ directly) and a
/// sampled source.
pub fn green_route(problem: &RdProblem, grid: &SpectralGrid, times: &[f64], opts: &GreenOptions) -> Result<SolutionTable, RdError> {
    problem.validate()?;
    opts.mode.validate()?;
    check_times(times)?;
    if opts.panel_nodes == 0 || opts.panels_per_period == 0 {
        return Err(RdError::InvalidProblem("the wavenumber rule needs positive node and panel counts".into()));
    }
    let profile: Option<Vec<f64>> = match &problem.initial {
        InitialCondition::DiracDelta => None,
        InitialCondition::Sampled(f) | InitialCondition::Spectrum { profile: Some(f), .. } => {
            Some(grid.nodes().iter().map(|&x| f(x)).collect())
        }
        InitialCondition::Spectrum { profile: None, .. } => {
            return Err(RdError::Unsupported("the Green route needs the initial profile in x".into()));
        }
    };
    let source = match &problem.source {
        None => None,
        Some(Source::Sampled(phi)) => Some(phi.clone()),
        Some(Source::Spectrum(_)) => {
            return Err(RdError::Unsupported("the Green route needs the source in x".into()));
        }
    };
    let symbol = TimeSymbol::new(&problem.time)?;
    let rule = wavenumber_rule(grid, opts);
    let trunc = opts.mode.trunc;
    let dx = grid.spacing();
    let nodes = grid.nodes();
    let n = grid.mode_count();
    let f_hat = initial_spectrum(&problem.initial, grid);
    let f_mass = profile.as_ref().map_or(1.0, |p| p.iter().map(|v| v.abs()).sum::<f64>() * dx);

    let mut values = Vec::with_capacity(times.len());
    let mut diagnostics = Vec::with_capacity(times.len());
    for &t in times {
        let parts: Vec<Part> = rule
            .par_iter()
            .map(|&(k, _)| symbol.relaxation(problem.mode_constant(k), t, &trunc))
            .collect();
        let multiplier: Vec<f64> = parts.iter().map(|p| p.value).collect();
        let g1 = kernel_on_offsets(grid, &rule, &multiplier);
        let mut field = match &profile {
            // x_i sits (i − N/2)Δx from the origin
            None => (0..n).map(|i| g1[i.abs_diff(n / 2)]).collect(),
            Some(p) => convolve(&g1, p, dx),
        };
        let (mut modes, g1_err) = fold(&parts, &rule);
        let mut est_error = g1_err * f_mass;

        if let Some(phi) = &source {
            let time_rule = SourceRule::new(t, symbol.leading_order(), opts.mode.source_nodes, false);
            for &(xi, w) in &time_rule.fine {
                let kparts: Vec<Part> = rule
                    .par_iter()
                    .map(|&(k, _)| symbol.kernel(problem.mode_constant(k), xi, &trunc))
                    .collect();
                let kvals: Vec<f64> = kparts.iter().map(|p| p.value).collect();
                let g2 = kernel_on_offsets(grid, &rule, &kvals);
                let samples: Vec<f64> = nodes.iter().map(|&x| phi(x, t - xi)).collect();
                let conv = convolve(&g2, &samples, dx);
                for (v, c) in field.iter_mut().zip(&conv) {
                    *v += w * c;
                }
                let (kdiag, kerr) = fold(&kparts, &rule);
                est_error += w.abs() * kerr * samples.iter().map(|v| v.abs()).sum::<f64>() * dx;
                for (d, kd) in modes.iter_mut().zip(kdiag) {
                    d.converged &= kd.converged;
                    d.outer_terms = d.outer_terms.max(kd.outer_terms);
                    if d.failure.is_none() {
                        d.failure = kd.failure;
                    }
                }
            }
        }

        let peak = field.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let nyq = grid.nyquist_slot();
        let last = *multiplier.last().unwrap_or(&0.0);
        let spectral_peak = multiplier
            .iter()
            .map(|m| m.abs())
            .fold(0.0, f64::max)
            * f_hat.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let nyquist_ratio = if spectral_peak > 0.0 {
            (f_hat[nyq] * last).norm() / spectral_peak
        } else {
            0.0
        };
        let converged = modes.iter().all(|m| m.converged);
        diagnostics.push(FieldDiagnostics {
            modes,
            converged,
            est_error,
            imaginary_residue: 0.0,
            peak,
            nyquist_ratio,
            grid_too_coarse: nyquist_ratio > 1e-8,
            source_quadrature_delta: None,
        });
        values.push(field);
    }
    Ok(SolutionTable {
        grid: grid.clone(),
        times: times.to_vec(),
        values,
        diagnostics,
        oracle_delta: None,
    })
}
