//! Linear multi-term Caputo equations
//!
//! Σ_j a_j D^{α_j} u + a₀ u = φ(t),  u(0) = u₀,  u'(0) = u₁ (used when some α_j > 1),
//!
//! solved in Volterra form. Applying the Riemann-Liouville integral I^{α₁} of the
//! highest order α₁ and using I^{α₁} D^{α_j} u = I^{α₁−α_j}(u − T_j), with T_j the
//! Taylor polynomial of the initial data of degree ⌈α_j⌉ − 1, gives
//!
//! a₁ u + Σ_{j≥2} a_j I^{α₁−α_j} u + a₀ I^{α₁} u = I^{α₁}φ + a₁T₁ + Σ_{j≥2} a_j I^{α₁−α_j} T_j.
//!
//! Each fractional integral is discretized with product-trapezoidal weights on a
//! uniform grid. The equation is linear, so every step is a single division.

use std::sync::Arc;

use num_complex::Complex64;

use crate::quadrature::tanh_sinh;
use crate::special::rgamma;

use super::OracleError;

pub type Source = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalTerm {
    /// Caputo order in (0, 2].
    pub order: f64,
    pub coef: Complex64,
}

#[derive(Clone)]
pub struct FodeProblem {
    pub terms: Vec<FractionalTerm>,
    /// Coefficient a₀ of u itself.
    pub zeroth: Complex64,
    pub initial_value: Complex64,
    /// u'(0); ignored unless some order exceeds 1.
    pub initial_slope: Complex64,
    pub source: Option<Source>,
    pub horizon: f64,
    /// Uniform steps on [0, horizon]; even and at least 16.
    pub steps: usize,
    /// When set, the problem is also solved with half the steps and the largest
    /// difference on the shared nodes must stay below this times max(1, max|u|).
    pub self_check_tol: Option<f64>,
}

impl std::fmt::Debug for FodeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FodeProblem")
            .field("terms", &self.terms)
            .field("zeroth", &self.zeroth)
            .field("initial_value", &self.initial_value)
            .field("initial_slope", &self.initial_slope)
            .field("source", &self.source.as_ref().map(|_| "<fn>"))
            .field("horizon", &self.horizon)
            .field("steps", &self.steps)
            .field("self_check_tol", &self.self_check_tol)
            .finish()
    }
}

impl FodeProblem {
    /// Homogeneous problem with no self-check.
    pub fn homogeneous(terms: Vec<FractionalTerm>, zeroth: Complex64, initial_value: Complex64, horizon: f64, steps: usize) -> Self {
        Self {
            terms,
            zeroth,
            initial_value,
            initial_slope: Complex64::new(0.0, 0.0),
            source: None,
            horizon,
            steps,
            self_check_tol: None,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::InvalidConfig(msg));
        if self.terms.is_empty() {
            return bad("at least one fractional term is required".into());
        }
        for t in &self.terms {
            if !(t.order > 0.0 && t.order <= 2.0) {
                return bad(format!("order {} outside (0, 2]", t.order));
            }
            if !(t.coef.re.is_finite() && t.coef.im.is_finite()) {
                return bad(format!("coefficient {} is not finite", t.coef));
            }
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("horizon {} must be positive", self.horizon));
        }
        if self.steps < 16 || !self.steps.is_multiple_of(2) {
            return bad(format!("steps {} must be even and at least 16", self.steps));
        }
        if let Some(tol) = self.self_check_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return bad(format!("self_check_tol {tol} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FodeSolution {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Largest change against half the steps, when the self-check ran.
    pub self_check_difference: Option<f64>,
}

impl FodeSolution {
    /// Linear interpolation between grid nodes; t is clamped to the horizon.
    pub fn at(&self, t: f64) -> Complex64 {
        let h = self.times[1] - self.times[0];
        let x = (t / h).clamp(0.0, (self.times.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.times.len() - 2);
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Product-trapezoidal weights for I^β on a uniform grid, without the factor h^β/Γ(β+2).
struct Weights {
    /// b_j = (j+1)^{β+1} − 2j^{β+1} + (j−1)^{β+1} for interior nodes at distance j.
    interior: Vec<f64>,
    /// a_{n,0} = (n−1)^{β+1} − (n−1−β) n^β for the left endpoint.
    first: Vec<f64>,
    scale: f64,
}

impl Weights {
    fn new(beta: f64, steps: usize, h: f64) -> Self {
        let p = beta + 1.0;
        let pw = |j: f64| j.powf(p);
        let mut interior = vec![0.0; steps + 1];
        for (j, w) in interior.iter_mut().enumerate().skip(1) {
            let jf = j as f64;
            *w = pw(jf + 1.0) - 2.0 * pw(jf) + pw(jf - 1.0);
        }
        let mut first = vec![0.0; steps + 1];
        for (n, w) in first.iter_mut().enumerate().skip(1) {
            let nf = n as f64;
            *w = pw(nf - 1.0) - (nf - 1.0 - beta) * nf.powf(beta);
        }
        Self {
            interior,
            first,
            scale: h.powf(beta) * rgamma(beta + 2.0),
        }
    }

    /// Known part of I^β u at node n: every node before n.
    fn history(&self, u: &[Complex64], n: usize) -> Complex64 {
        let mut acc = u[0] * self.first[n];
        for k in 1..n {
            acc += u[k] * self.interior[n - k];
        }
        acc * self.scale
    }
}

/// I^α φ(t) = t^α/Γ(α) ∫₀¹ (1−x)^{α−1} φ(tx) dx, split at x = 1/2 with y = 1 − x
/// on the upper half so that both the kernel singularity and a weak singularity
/// of φ at 0 sit on an endpoint that tanh-sinh resolves exactly.
fn source_integral(phi: &Source, alpha: f64, t: f64) -> Result<Complex64, OracleError> {
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let lower = |x: f64| (1.0 - x).powf(alpha - 1.0) * phi(t * x);
    let upper = |y: f64| y.powf(alpha - 1.0) * phi(t * (1.0 - y));
    let halves: [&dyn Fn(f64) -> Complex64; 2] = [&lower, &upper];
    for part in halves {
        let re = tanh_sinh(|x| part(x).re, 0.0, 0.5, 1e-13, 10);
        let im = tanh_sinh(|x| part(x).im, 0.0, 0.5, 1e-13, 10);
        if !(re.converged && im.converged) {
            return Err(OracleError::QuadratureFailure(format!(
                "fractional integral of the source at t = {t}: level changes {:e}, {:e}",
                re.error, im.error
            )));
        }
        total += Complex64::new(re.value, im.value);
    }
    Ok(total * t.powf(alpha) * rgamma(alpha))
}

fn solve_on_grid(problem: &FodeProblem, terms: &[FractionalTerm], steps: usize) -> Result<FodeSolution, OracleError> {
    let h = problem.horizon / steps as f64;
    let lead = terms[0];
    let alpha1 = lead.order;
    let u0 = problem.initial_value;
    let u1 = problem.initial_slope;
    // I^β of the Taylor polynomial of degree ⌈order⌉ − 1
    let taylor_integral = |order: f64, beta: f64, t: f64| -> Complex64 {
        let mut v = u0 * t.powf(beta) * rgamma(beta + 1.0);
        if order > 1.0 {
            v += u1 * t.powf(beta + 1.0) * rgamma(beta + 2.0);
        }
        v
    };

    // (coefficient, weights) for every fractional integral acting on u
    let mut integrals: Vec<(Complex64, Weights)> = terms[1..]
        .iter()
        .map(|t| (t.coef, Weights::new(alpha1 - t.order, steps, h)))
        .collect();
    if problem.zeroth != Complex64::new(0.0, 0.0) {
        integrals.push((problem.zeroth, Weights::new(alpha1, steps, h)));
    }
    let diagonal: Complex64 = lead.coef + integrals.iter().map(|(c, w)| c * w.scale).sum::<Complex64>();

    let times: Vec<f64> = (0..=steps).map(|n| n as f64 * h).collect();
    let mut u = vec![Complex64::new(0.0, 0.0); steps + 1];
    u[0] = u0;
    for n in 1..=steps {
        let t = times[n];
        let mut rhs = lead.coef * taylor_integral(alpha1, 0.0, t);
        for term in &terms[1..] {
            rhs += term.coef * taylor_integral(term.order, alpha1 - term.order, t);
        }
        if let Some(phi) = &problem.source {
            rhs += source_integral(phi, alpha1, t)?;
        }
        for (c, w) in &integrals {
            rhs -= c * w.history(&u, n);
        }
        u[n] = rhs / diagonal;
    }
    Ok(FodeSolution {
        times,
        values: u,
        self_check_difference: None,
    })
}

/// Sorted by decreasing order with equal orders merged and zero coefficients dropped.
fn normalized_terms(problem: &FodeProblem) -> Result<Vec<FractionalTerm>, OracleError> {
    let mut terms = problem.terms.clone();
    terms.sort_by(|a, b| b.order.total_cmp(&a.order));
    let mut merged: Vec<FractionalTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.order == t.order => last.coef += t.coef,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.coef != Complex64::new(0.0, 0.0));
    if merged.is_empty() {
        return Err(OracleError::InvalidConfig("all fractional coefficients vanish".into()));
    }
    Ok(merged)
}

/// Solve the problem on its grid; with a self-check tolerance the half-step
/// solution must agree on the shared nodes.
pub fn solve_fode(problem: &FodeProblem) -> Result<FodeSolution, OracleError> {
    problem.validate()?;
    let terms = normalized_terms(problem)?;
    let mut fine = solve_on_grid(problem, &terms, problem.steps)?;
    if let Some(tol) = problem.self_check_tol {
        let coarse = solve_on_grid(problem, &terms, problem.steps / 2)?;
        let difference = coarse
            .values
            .iter()
            .enumerate()
            .map(|(i, c)| (fine.values[2 * i] - c).norm())
            .fold(0.0, f64::max);
        let scale = fine.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        fine.self_check_difference = Some(difference);
        if !(difference <= tol * scale) {
            return Err(OracleError::StepTooCoarse {
                difference,
                tolerance: tol,
            });
        }
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{eval_wiman, eval_mittag_leffler};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn term(order: f64, coef: f64) -> FractionalTerm {
        FractionalTerm { order, coef: c(coef) }
    }

    fn max_error(sol: &FodeSolution, exact: impl Fn(f64) -> f64) -> f64 {
        sol.times.iter().zip(&sol.values).map(|(&t, v)| (v - exact(t)).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn first_order_relaxation() {
        let p = FodeProblem::homogeneous(vec![term(1.0, 1.0)], c(1.0), c(1.0), 2.0, 4096);
        let sol = solve_fode(&p).unwrap();
        assert!(max_error(&sol, |t| (-t).exp()) <= 1e-6);
    }

    #[test]
    fn half_order_relaxation_matches_mittag_leffler() {
        let p = FodeProblem::homogeneous(vec![term(0.5, 1.0)], c(1.0), c(1.0), 2.0, 4096);
        let sol = solve_fode(&p).unwrap();
        let err = max_error(&sol, |t| eval_mittag_leffler(0.5, c(-t.sqrt()), 1e-15).unwrap().value.re);
        assert!(err <= 1e-4, "{err}");
    }

    #[test]
    fn step_halving_converges_on_a_smooth_problem() {
        // D^{1/2}u + u = φ with u = t²: φ = 2t^{3/2}/Γ(5/2) + t²
        let phi: Source = Arc::new(|t: f64| c(2.0 * t.powf(1.5) * rgamma(2.5) + t * t));
        let errors: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| {
                let p = FodeProblem {
                    source: Some(phi.clone()),
                    ..FodeProblem::homogeneous(vec![term(0.5, 1.0)], c(1.0), c(0.0), 1.0, n)
                };
                max_error(&solve_fode(&p).unwrap(), |t| t * t)
            })
            .collect();
        for w in errors.windows(2) {
            // monotone, with observed order at least one
            assert!(w[0] / w[1] >= 2.0, "{errors:?}");
        }
    }

    #[test]
    fn two_term_order_above_one() {
        // D^{1.6}u + 2D^{0.8}u + b u = 0, u(0) = 1, u'(0) = 0. With x = s^{0.8} and
        // x² + 2x + b = (x − λ)(x − μ), the transform (s^{0.6} + 2s^{−0.2})/((x−λ)(x−μ))
        // splits into E_{0.8,0.2} and E_{0.8} terms.
        let b: f64 = 0.5;
        let disc = (1.0 - b).sqrt();
        let (lam, mu) = (-1.0 + disc, -1.0 - disc);
        let exact = |t: f64| {
            if t == 0.0 {
                return 1.0;
            }
            let tau = t.powf(0.8);
            let e = |beta: f64, root: f64| eval_wiman(0.8, beta, c(root * tau), 1e-15).unwrap().value.re;
            (t.powf(-0.8) * (e(0.2, lam) - e(0.2, mu)) + 2.0 * (e(1.0, lam) - e(1.0, mu))) / (lam - mu)
        };
        let p = FodeProblem {
            initial_slope: c(0.0),
            ..FodeProblem::homogeneous(vec![term(1.6, 1.0), term(0.8, 2.0)], c(b), c(1.0), 3.0, 4096)
        };
        let sol = solve_fode(&p).unwrap();
        let err = max_error(&sol, exact);
        assert!(err <= 1e-4, "{err}");
    }

    #[test]
    fn oscillator_with_slope() {
        // u'' + u = 0, u(0) = 0, u'(0) = 1
        let p = FodeProblem {
            initial_slope: c(1.0),
            ..FodeProblem::homogeneous(vec![term(2.0, 1.0)], c(1.0), c(0.0), 6.0, 4096)
        };
        let sol = solve_fode(&p).unwrap();
        assert!(max_error(&sol, f64::sin) <= 1e-5);
    }

    #[test]
    fn constant_source() {
        // D^{0.7}u = 1, u(0) = 0 → t^{0.7}/Γ(1.7)
        let p = FodeProblem {
            source: Some(Arc::new(|_| c(1.0))),
            ..FodeProblem::homogeneous(vec![term(0.7, 1.0)], c(0.0), c(0.0), 1.0, 256)
        };
        let sol = solve_fode(&p).unwrap();
        let err = max_error(&sol, |t| t.powf(0.7) * rgamma(1.7));
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn complex_coefficients() {
        // u' + (1 + 2i) u = 0
        let p = FodeProblem::homogeneous(vec![term(1.0, 1.0)], Complex64::new(1.0, 2.0), c(1.0), 1.0, 2048);
        let sol = solve_fode(&p).unwrap();
        let err = sol
            .times
            .iter()
            .zip(&sol.values)
            .map(|(&t, v)| (v - (Complex64::new(-1.0, -2.0) * t).exp()).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5, "{err}");
    }

    #[test]
    fn self_check() {
        let mut p = FodeProblem::homogeneous(vec![term(0.5, 1.0)], c(1.0), c(1.0), 1.0, 64);
        p.self_check_tol = Some(1e-2);
        let sol = solve_fode(&p).unwrap();
        assert!(sol.self_check_difference.unwrap() > 0.0);
        p.self_check_tol = Some(1e-9);
        assert!(matches!(solve_fode(&p), Err(OracleError::StepTooCoarse { .. })));
    }

    #[test]
    fn validation_and_merging() {
        let mut p = FodeProblem::homogeneous(vec![term(2.5, 1.0)], c(1.0), c(1.0), 1.0, 64);
        assert!(p.validate().is_err());
        p.terms = vec![term(0.5, 1.0)];
        p.steps = 15;
        assert!(p.validate().is_err());
        // two halves of the same order act like one
        let a = FodeProblem::homogeneous(vec![term(0.6, 0.5), term(0.6, 0.5)], c(1.0), c(1.0), 1.0, 64);
        let b = FodeProblem::homogeneous(vec![term(0.6, 1.0)], c(1.0), c(1.0), 1.0, 64);
        assert_eq!(solve_fode(&a).unwrap().values, solve_fode(&b).unwrap().values);
    }
}
