//! Algebraic asymptotic expansion for large |z| away from the exponential sector:
//!
//! E^γ_{α,β}(z) ~ Σ_k (−1)^k (γ)_k/k! · (−z)^{−γ−k} / Γ(β − α(γ+k)),
//!
//! valid when every exponential contribution e^{s*} from the roots of s^α = z is
//! negligible. The series is divergent; it is cut at its smallest term.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::special::{ln_gamma, rgamma};
use crate::summation::ComplexSum;

const MAX_TERMS: usize = 400;

#[derive(Debug, Clone, Copy)]
pub(crate) struct AsymptoticOutcome {
    pub value: Complex64,
    pub error: f64,
    pub terms: usize,
}

/// Bound on |1/Γ(x)|; for x < 0 the reflection formula gives Γ(1−x)/π.
fn rgamma_envelope(x: f64) -> f64 {
    if x > 0.0 {
        rgamma(x).abs()
    } else {
        (ln_gamma(1.0 - x) - PI.ln()).exp()
    }
}

/// Size of the exponentially small part: each principal root s* of s^α = z adds
/// a term of order e^{s*} s*^{γ−β} α^{−γ}, bounded here by
/// |e^{s*}|·(1+|s*|)^{|γ−β|+1}·max(1, α^{−γ}); zero when no root lies on the principal sheet.
fn exponential_part(alpha: f64, beta: f64, gamma: f64, z: Complex64) -> f64 {
    let theta = z.arg();
    let k_min = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let k_max = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let radius = z.norm().powf(1.0 / alpha);
    let power = (gamma - beta).abs() + 1.0;
    let ln_front = power * (1.0 + radius).ln() + (-gamma * alpha.ln()).max(0.0);
    (k_min..=k_max)
        .map(|k| {
            let s = Complex64::from_polar(radius, (theta + 2.0 * PI * k as f64) / alpha);
            (s.re + ln_front).exp()
        })
        .fold(0.0, f64::max)
}

pub(crate) fn expand(alpha: f64, beta: f64, gamma: f64, z: Complex64) -> Option<AsymptoticOutcome> {
    let w = -z;
    let lw = w.ln();
    let inv_w = 1.0 / w;
    // coefficient (−1)^k (γ)_k/k! · w^{−γ−k}, advanced by recurrence
    let mut coef = (-gamma * lw).exp();
    let mut acc = ComplexSum::new();
    let mut last_env = f64::INFINITY;
    let mut error = 0.0;
    let mut terms = 0;
    let mut abs_sum = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let arg = beta - alpha * (gamma + kf);
        let term = coef * rgamma(arg);
        // near a pole of Γ a term can be small by accident, so convergence is
        // judged on the envelope of |1/Γ| instead of the term itself
        let env = coef.norm() * rgamma_envelope(arg);
        if env > last_env && k > 1 {
            // divergence sets in: the error is of the order of the smallest term
            error = last_env;
            break;
        }
        last_env = env;
        acc.add(term);
        abs_sum += term.norm();
        terms = k + 1;
        if env <= f64::EPSILON * acc.value().norm() {
            error = env;
            break;
        }
        coef *= -(gamma + kf) / (kf + 1.0) * inv_w;
        if k + 1 == MAX_TERMS {
            error = coef.norm() * rgamma_envelope(arg - alpha);
        }
    }
    let value = acc.value();
    // each term carries the few-ulp error of the reciprocal gamma and the power
    let error = 2.0 * (error + exponential_part(alpha, beta, gamma, z)) + 16.0 * f64::EPSILON * abs_sum;
    (value.re.is_finite() && value.im.is_finite()).then_some(AsymptoticOutcome { value, error, terms })
}
