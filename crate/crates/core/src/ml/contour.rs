//! Laplace-inversion regime for large |z|.
//!
//! E^γ_{α,β}(z) is the value at t = 1 of the inverse Laplace transform of
//! F(s) = s^{αγ−β}/(s^α − z)^γ. The Bromwich integral is taken along an optimal
//! parabolic contour s(u) = μ(iu + 1)² chosen between the singularities of F,
//! and the singularities left to the right of the contour are added back as
//! residues. Residues exist in closed form only for integer γ; for other γ the
//! regime is restricted to the case with no singular points off the origin.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::special::real_binomial;

/// Node-count ceiling above which the target accuracy is relaxed by a decade.
const MAX_NODES: f64 = 1000.0;

/// Number of relaxations attempted before giving up.
const MAX_RELAXATIONS: usize = 8;

/// Singular points with φ below this are treated as lying on the origin.
const PHI_ZERO: f64 = 1e-15;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ContourOutcome {
    pub value: Complex64,
    /// Absolute error estimate: the value comes from the rule on step h/2 and is
    /// charged the full change against the rule on step h, ten times the cut-off
    /// tail, and rounding in proportion to the size of the integrand's exponent.
    pub error: f64,
    /// Quadrature nodes used (2N+1 before symmetry reduction).
    pub nodes: usize,
}

/// Returns `None` when the regime does not apply or no admissible contour exists.
pub(crate) fn evaluate(alpha: f64, beta: f64, gamma: f64, z: Complex64, target: f64) -> Option<ContourOutcome> {
    let integer_gamma = as_integer(gamma);
    if alpha > 2.0 {
        return None;
    }
    let log_mach = f64::EPSILON.ln();
    let abs_z = z.norm();
    let theta = z.arg();

    // principal-sheet solutions of s^α = z
    let k_min = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let k_max = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let radius = abs_z.powf(1.0 / alpha);
    let mut poles: Vec<(Complex64, f64)> = (k_min..=k_max)
        .map(|k| {
            let s = Complex64::from_polar(radius, (theta + 2.0 * PI * k as f64) / alpha);
            (s, phi(s))
        })
        .filter(|&(_, p)| p > PHI_ZERO)
        .collect();
    if !poles.is_empty() && integer_gamma.is_none() {
        return None;
    }
    poles.sort_by(|a, b| a.1.total_cmp(&b.1));

    // singular points: the origin, then the poles by increasing φ, then +∞
    let mut phis = Vec::with_capacity(poles.len() + 2);
    phis.push(0.0);
    phis.extend(poles.iter().map(|p| p.1));
    phis.push(f64::INFINITY);
    let n_poles = poles.len();
    let mut p_strength = vec![gamma; n_poles + 1];
    p_strength[0] = (-2.0 * (alpha * gamma - beta + 1.0)).max(0.0);
    let mut q_strength = vec![gamma; n_poles + 1];
    q_strength[n_poles] = f64::INFINITY;

    let mut log_eps = target.ln();
    let admissible: Vec<usize> = (0..=n_poles)
        .filter(|&j| phis[j] < log_eps - log_mach && phis[j] < phis[j + 1])
        .collect();
    if admissible.is_empty() {
        return None;
    }

    let mut best: Option<(usize, ContourParams)> = None;
    for _ in 0..=MAX_RELAXATIONS {
        best = None;
        for &j in &admissible {
            let params = if j < n_poles {
                optimal_bounded(phis[j], phis[j + 1], p_strength[j], q_strength[j], log_eps)
            } else {
                optimal_unbounded(phis[j], p_strength[j], log_eps)
            };
            if let Some(p) = params {
                if best.as_ref().is_none_or(|(_, b)| p.n < b.n) {
                    best = Some((j, p));
                }
            }
        }
        match &best {
            Some((_, p)) if p.n <= MAX_NODES => break,
            _ => log_eps += 10f64.ln(),
        }
    }
    let (region, params) = best?;
    if !params.n.is_finite() || params.n > MAX_NODES {
        return None;
    }
    let n = params.n as i64;

    let a_g = alpha * gamma - beta;
    // integrand and the size of its exponent, which sets its relative rounding error
    let integrand_cond = |u: f64| -> (Complex64, f64) {
        let iu1 = Complex64::new(1.0, u);
        let s = params.mu * iu1 * iu1;
        let ds = 2.0 * params.mu * Complex64::new(-u, 1.0);
        let ls = s.ln();
        let w = (alpha * ls).exp() - z;
        let lw = w.ln();
        let f = (s + a_g * ls - gamma * lw).exp() * ds;
        (f, 2.0 + s.norm() + (a_g * ls).norm() + gamma * lw.norm())
    };
    let integrand = |u: f64| integrand_cond(u).0;

    // the rule runs on step h/2; its even nodes give the rule on step h, whose
    // distance from the refined value bounds the error of the latter
    let step = params.h / 2.0;
    let weight = step / (2.0 * PI);
    let last = 2 * n;
    let mut conditioned = 0.0;
    let (integral, coarse) = if z.im == 0.0 {
        // conjugate symmetry: only u ≥ 0 is needed
        let (f0, c0) = integrand_cond(0.0);
        let mut acc = f0.im;
        let mut even = f0.im;
        conditioned += c0 * f0.norm();
        for k in 1..=last {
            let (f, cond) = integrand_cond(step * k as f64);
            acc += 2.0 * f.im;
            if k % 2 == 0 {
                even += 2.0 * f.im;
            }
            conditioned += 2.0 * cond * f.norm();
        }
        (Complex64::new(weight * acc, 0.0), Complex64::new(2.0 * weight * even, 0.0))
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut even = Complex64::new(0.0, 0.0);
        for k in -last..=last {
            let (f, cond) = integrand_cond(step * k as f64);
            acc += f;
            if k % 2 == 0 {
                even += f;
            }
            conditioned += cond * f.norm();
        }
        let w = Complex64::new(0.0, -weight);
        (acc * w, 2.0 * even * w)
    };
    conditioned *= weight;
    let diff = (integral - coarse).norm();
    // size of the integrand where the node range is cut off
    let tail = weight * (integrand(step * last as f64).norm() + integrand(-step * last as f64).norm());
    let mut residues = Complex64::new(0.0, 0.0);
    let mut residue_rounding = 0.0;
    if let Some(m) = integer_gamma {
        for &(s, _) in &poles[region..] {
            let (r, e) = pole_residue(alpha, beta, m - 1, s);
            residues += r;
            residue_rounding += e;
        }
    }
    let value = integral + residues;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return None;
    }
    Some(ContourOutcome {
        value,
        error: diff + 10.0 * tail + 4.0 * f64::EPSILON * conditioned + residue_rounding,
        nodes: 2 * last as usize + 1,
    })
}

fn phi(s: Complex64) -> f64 {
    (s.re + s.norm()) / 2.0
}

fn as_integer(gamma: f64) -> Option<usize> {
    let r = gamma.round();
    if (gamma - r).abs() <= 1e-12 * gamma.max(1.0) && (1.0..=1e4).contains(&r) {
        Some(r as usize)
    } else {
        None
    }
}

/// Whether the contour regime can handle this order and argument.
pub(crate) fn applicable(alpha: f64, gamma: f64, z: Complex64) -> bool {
    if alpha > 2.0 {
        return false;
    }
    if as_integer(gamma).is_some() {
        return true;
    }
    alpha < 1.0 && z.arg().abs() > alpha * PI
}

#[derive(Debug, Clone, Copy)]
struct ContourParams {
    mu: f64,
    h: f64,
    n: f64,
}

/// Parameters for a contour squeezed between two singular points with
/// φ-values `phi_j < phi_j1` and singularity strengths `pj`, `qj`.
fn optimal_bounded(phi_j: f64, phi_j1: f64, pj: f64, qj: f64, log_eps: f64) -> Option<ContourParams> {
    let log_mach = f64::EPSILON.ln();
    let fac = 1.01;
    let f_max = (log_eps - log_mach).exp();
    let sq_j = phi_j.sqrt();
    let threshold = 2.0 * (log_eps - log_mach).sqrt();
    let sq_j1 = phi_j1.sqrt().min(threshold - sq_j);

    let (sqbar_j, sqbar_j1, f_bar);
    if pj < 1e-14 && qj < 1e-14 {
        sqbar_j = sq_j;
        sqbar_j1 = sq_j1;
        f_bar = 1.0;
    } else if pj < 1e-14 {
        sqbar_j = sq_j;
        let f_min = if sq_j > 0.0 {
            fac * (sq_j / (sq_j1 - sq_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return None;
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        sqbar_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
    } else if qj < 1e-14 {
        sqbar_j1 = sq_j1;
        let f_min = fac * (sq_j1 / (sq_j1 - sq_j)).powf(pj);
        if f_min >= f_max {
            return None;
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        sqbar_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
    } else {
        let mut f_min = fac * ((sq_j + sq_j1) / (sq_j1 - sq_j)).powf(pj.max(qj));
        if f_min >= f_max {
            return None;
        }
        f_min = f_min.max(1.5);
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 / log_eps;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        sqbar_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
        sqbar_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
    }

    let log_eps = log_eps - f_bar.ln();
    let w = -sqbar_j1 * sqbar_j1 / log_eps;
    let mu = (((1.0 + w) * sqbar_j + sqbar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_eps * (sqbar_j1 - sqbar_j) / ((1.0 + w) * sqbar_j + sqbar_j1);
    let n = ((1.0 - log_eps / mu).sqrt() / h).ceil();
    (mu > 0.0 && h > 0.0 && n.is_finite()).then_some(ContourParams { mu, h, n })
}

/// Parameters for a contour to the right of every singular point, the
/// rightmost one having φ-value `phi_j` and strength `pj`.
fn optimal_unbounded(phi_j: f64, pj: f64, log_eps: f64) -> Option<ContourParams> {
    let log_mach = f64::EPSILON.ln();
    let sq_phi_j = phi_j.sqrt();
    let mut phibar_j = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sqbar = phibar_j.sqrt();
    let (f_min, f_max, f_tar): (f64, f64, f64) = (1.0, 10.0, 5.0);

    let mut n = 0.0;
    let mut a = 0.0;
    let mut sq_mu = 0.0;
    for _ in 0..100 {
        let log_eps_phi = log_eps / phibar_j;
        n = (phibar_j / PI * (1.0 - 1.5 * log_eps_phi + (1.0 - 2.0 * log_eps_phi).sqrt())).ceil();
        a = PI * n / phibar_j;
        sq_mu = sqbar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let f_bar = ((sqbar - sq_phi_j) / sq_mu).powf(-pj);
        if pj < 1e-14 || (f_min < f_bar && f_bar < f_max) {
            break;
        }
        sqbar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar_j = sqbar * sqbar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;

    let threshold = log_eps - log_mach;
    if mu > threshold {
        let q = if pj.abs() < 1e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (q + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (log_mach / (log_mach - log_eps)).sqrt();
            let u = (-phibar / log_mach).sqrt();
            mu = threshold;
            n = (w * log_eps / (2.0 * PI * (u * w - 1.0))).ceil();
            h = w / n;
        } else {
            return None;
        }
    }
    (mu > 0.0 && h > 0.0 && n.is_finite() && n >= 1.0).then_some(ContourParams { mu, h, n })
}

/// Residue of e^s s^{αγ−β}/(s^α − z)^γ at a simple root s* of s^α = z, for
/// integer γ = m + 1: the coefficient of h^m in
/// e^{s*+h} (s*+h)^{αγ−β} / g(h)^γ with g(h) = ((s*+h)^α − s*^α)/h.
///
/// Returns the residue and a rounding bound obtained by running every
/// recurrence once more on magnitudes.
fn pole_residue(alpha: f64, beta: f64, m: usize, s: Complex64) -> (Complex64, f64) {
    let gamma = (m + 1) as f64;
    let len = m + 1;
    let inv_s = 1.0 / s;

    // g(h) = Σ_k C(α, k+1) s^{α−1−k} h^k
    let s_pow = s.powf(alpha - 1.0);
    let mut g = Vec::with_capacity(len);
    let mut scale = s_pow;
    for k in 0..len {
        g.push(real_binomial(alpha, k + 1) * scale);
        scale *= inv_s;
    }

    // g^{−γ} by the power recurrence b_n = (1/(n g₀)) Σ_{k=1}^{n} ((q+1)k − n) g_k b_{n−k}
    let q = -gamma;
    let mut inv_pow = Vec::with_capacity(len);
    let mut inv_abs = Vec::with_capacity(len);
    inv_pow.push(g[0].powf(q));
    inv_abs.push(inv_pow[0].norm());
    for nn in 1..len {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut acc_abs = 0.0;
        for k in 1..=nn {
            let w = (q + 1.0) * k as f64 - nn as f64;
            acc += w * g[k] * inv_pow[nn - k];
            acc_abs += w.abs() * g[k].norm() * inv_abs[nn - k];
        }
        inv_pow.push(acc / (nn as f64 * g[0]));
        inv_abs.push(acc_abs / (nn as f64 * g[0].norm()));
    }

    // (s+h)^p e^{h} = s^p Σ_j C(p,j) s^{−j} h^j · Σ_i h^i/i!
    let p = alpha * gamma - beta;
    let mut power = Vec::with_capacity(len);
    let mut sj = Complex64::new(1.0, 0.0);
    for j in 0..len {
        power.push(real_binomial(p, j) * sj);
        sj *= inv_s;
    }
    let mut exp_coef = vec![1.0; len];
    for i in 1..len {
        exp_coef[i] = exp_coef[i - 1] / i as f64;
    }
    let mut front = vec![Complex64::new(0.0, 0.0); len];
    let mut front_abs = vec![0.0; len];
    for (i, e) in exp_coef.iter().enumerate() {
        for j in 0..len - i {
            front[i + j] += *e * power[j];
            front_abs[i + j] += *e * power[j].norm();
        }
    }

    let mut coef = Complex64::new(0.0, 0.0);
    let mut coef_abs = 0.0;
    for i in 0..len {
        coef += front[i] * inv_pow[m - i];
        coef_abs += front_abs[i] * inv_abs[m - i];
    }
    let prefactor = (s + p * s.ln()).exp();
    // the prefactor's exponent is known to about ε·|s + p ln s|
    let rounding = prefactor.norm() * f64::EPSILON * (4.0 * (len as f64 + 2.0) * coef_abs + (s + p * s.ln()).norm() * coef.norm());
    (prefactor * coef, rounding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_through_residue() {
        // E_{1,1}(5): the whole value comes from the residue at s* = 5
        let r = evaluate(1.0, 1.0, 1.0, Complex64::new(5.0, 0.0), 1e-15).unwrap();
        assert_relative_eq!(r.value.re, 5f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn decaying_exponential_without_residue() {
        let r = evaluate(1.0, 1.0, 1.0, Complex64::new(-12.0, 0.0), 1e-15).unwrap();
        assert_relative_eq!(r.value.re, (-12f64).exp(), max_relative = 1e-9);
        assert!((r.value.re - (-12f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cosine_from_order_two() {
        let x: f64 = 7.3;
        let r = evaluate(2.0, 1.0, 1.0, Complex64::new(-x * x, 0.0), 1e-15).unwrap();
        assert!((r.value.re - x.cos()).abs() < 1e-13);
    }

    #[test]
    fn double_pole_residue() {
        // E^2_{1,1}(z) = (1+z) e^z
        let z = 4.0;
        let r = evaluate(1.0, 1.0, 2.0, Complex64::new(z, 0.0), 1e-15).unwrap();
        assert_relative_eq!(r.value.re, (1.0 + z) * z.exp(), max_relative = 1e-13);
    }

    #[test]
    fn complex_argument() {
        let z = Complex64::new(-3.0, 4.0);
        let r = evaluate(1.0, 1.0, 1.0, z, 1e-15).unwrap();
        let e = z.exp();
        assert!((r.value - e).norm() < 1e-13 * e.norm().max(1.0));
    }

    #[test]
    fn non_integer_gamma_needs_pole_free_sector() {
        assert!(applicable(0.5, 1.5, Complex64::new(-3.0, 0.0)));
        assert!(!applicable(0.5, 1.5, Complex64::new(3.0, 0.0)));
        assert!(!applicable(1.0, 1.5, Complex64::new(-3.0, 0.0)));
        assert!(evaluate(0.5, 1.0, 1.5, Complex64::new(3.0, 0.0), 1e-15).is_none());
    }
}
