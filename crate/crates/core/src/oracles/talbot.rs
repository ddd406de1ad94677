//! Inverse Laplace transform along Weideman's optimized cotangent contour
//!
//! s(θ) = μ (−0.6122 + 0.5017 θ cot(0.6407 θ) + 0.2645 i θ),  θ ∈ (−π, π),
//!
//! with the midpoint rule in θ. The contour wraps the negative real axis, so
//! branch cuts there are fine; every singularity must lie inside it.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::OracleError;

const SIGMA: f64 = -0.6122;
const MU: f64 = 0.5017;
const ALPHA: f64 = 0.6407;
const NU: f64 = 0.2645;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalbotConfig {
    /// Quadrature nodes on the full contour; even and at least 16.
    pub node_count: usize,
    /// Largest accepted change between node_count/2 and node_count nodes,
    /// relative to max(1, |f(t)|).
    pub precision_target: f64,
    /// Contour scale μ; None picks node_count / t.
    pub contour_scale: Option<f64>,
}

impl Default for TalbotConfig {
    fn default() -> Self {
        Self {
            node_count: 48,
            precision_target: 1e-8,
            contour_scale: None,
        }
    }
}

impl TalbotConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.node_count < 16 || !self.node_count.is_multiple_of(2) {
            return Err(OracleError::InvalidConfig(format!(
                "node_count {} must be even and at least 16",
                self.node_count
            )));
        }
        if !(self.precision_target.is_finite() && self.precision_target > 0.0) {
            return Err(OracleError::InvalidConfig(format!(
                "precision_target {} must be positive",
                self.precision_target
            )));
        }
        if let Some(mu) = self.contour_scale {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(OracleError::InvalidConfig(format!("contour_scale {mu} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalbotEstimate {
    pub value: Complex64,
    /// |f_N − f_{N/2}|, the self-check difference.
    pub difference: f64,
}

/// Midpoint rule with `n` nodes; the scale is tied to the full node count so
/// that the half rule uses the same contour.
fn contour_sum<F>(f: &mut F, t: f64, n: usize, mu: f64) -> Complex64
where
    F: FnMut(Complex64) -> Complex64,
{
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = -PI + (k as f64 + 0.5) * h;
        let (s, ds) = node(theta, mu);
        acc += (s * t).exp() * f(s) * ds;
    }
    acc * h / Complex64::new(0.0, 2.0 * PI)
}

fn node(theta: f64, mu: f64) -> (Complex64, Complex64) {
    let at = ALPHA * theta;
    // θ cot(αθ) → 1/α at θ = 0; the midpoint rule never hits θ = 0 exactly
    let cot = at.cos() / at.sin();
    let s = mu * Complex64::new(SIGMA + MU * theta * cot, NU * theta);
    let ds = mu * Complex64::new(MU * (cot - at / (at.sin() * at.sin())), NU);
    (s, ds)
}

/// Invert a Laplace transform F at time t, with the self-check against half the nodes.
pub fn talbot_invert<F>(mut f: F, t: f64, cfg: &TalbotConfig) -> Result<TalbotEstimate, OracleError>
where
    F: FnMut(Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(OracleError::InvalidConfig(format!("time {t} must be positive")));
    }
    let n = cfg.node_count;
    let full = contour_sum(&mut f, t, n, cfg.contour_scale.unwrap_or(n as f64 / t));
    let half = contour_sum(&mut f, t, n / 2, cfg.contour_scale.map_or(n as f64 / (2.0 * t), |mu| mu / 2.0));
    let difference = (full - half).norm();
    if !(full.re.is_finite() && full.im.is_finite()) || difference > cfg.precision_target * full.norm().max(1.0) {
        return Err(OracleError::OracleNotConverged {
            difference,
            target: cfg.precision_target,
        });
    }
    Ok(TalbotEstimate { value: full, difference })
}

/// Inversion of a transform that is real on the real axis. F(s̄) = conj F(s) halves
/// the work and the result is real.
pub fn talbot_invert_real<F>(mut f: F, t: f64, cfg: &TalbotConfig) -> Result<f64, OracleError>
where
    F: FnMut(Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(OracleError::InvalidConfig(format!("time {t} must be positive")));
    }
    let n = cfg.node_count;
    let half_sum = |f: &mut F, nodes: usize, mu: f64| -> f64 {
        let h = 2.0 * PI / nodes as f64;
        // nodes come in conjugate pairs; sum the upper half and take 2·Im/(2π)
        let mut acc = 0.0;
        for k in nodes / 2..nodes {
            let theta = -PI + (k as f64 + 0.5) * h;
            let (s, ds) = node(theta, mu);
            acc += ((s * t).exp() * f(s) * ds).im;
        }
        acc * h / PI
    };
    let full = half_sum(&mut f, n, cfg.contour_scale.unwrap_or(n as f64 / t));
    let half = half_sum(&mut f, n / 2, cfg.contour_scale.map_or(n as f64 / (2.0 * t), |mu| mu / 2.0));
    let difference = (full - half).abs();
    if !full.is_finite() || difference > cfg.precision_target * full.abs().max(1.0) {
        return Err(OracleError::OracleNotConverged {
            difference,
            target: cfg.precision_target,
        });
    }
    Ok(full)
}
