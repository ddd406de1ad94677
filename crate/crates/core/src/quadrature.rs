//! Quadrature rules: Gauss–Legendre for smooth integrands and level-doubling
//! tanh-sinh for integrands with algebraic endpoint singularities.

use std::f64::consts::{FRAC_PI_2, PI};

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of an adaptive rule: value plus the last level-to-level change.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// tanh-sinh quadrature of `f` over [a, b], doubling the node density until two
/// successive levels agree to `tol` (absolute, scaled by max(1, |value|)).
///
/// The integrand is never evaluated at the endpoints, so integrable algebraic
/// singularities there are fine.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: f64, max_level: usize) -> QuadratureEstimate
where
    F: FnMut(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    let mut h = 1.0;
    let mut evaluations = 0;

    // contribution of abscissa t (and -t when t > 0)
    let mut eval_pair = |t: f64, f: &mut F| -> f64 {
        let sinh_t = t.sinh();
        let cosh_t = t.cosh();
        let u = FRAC_PI_2 * sinh_t;
        let cosh_u = u.cosh();
        // 1 - tanh(u) computed without cancellation
        let comp = 1.0 / (u.exp() * cosh_u);
        let w = FRAC_PI_2 * cosh_t / (cosh_u * cosh_u);
        let mut acc = 0.0;
        if comp > 0.0 {
            let x_right = b - half * comp;
            if x_right < b && x_right > a {
                acc += w * f(x_right);
                evaluations += 1;
            }
            if t > 0.0 {
                let x_left = a + half * comp;
                if x_left > a && x_left < b {
                    acc += w * f(x_left);
                    evaluations += 1;
                }
            }
        }
        acc
    };

    let mut sum = eval_pair(0.0, &mut f);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        sum += eval_pair(k as f64 * h, &mut f);
        k += 1;
    }
    let mut estimate = half * h * sum;
    let mut error = f64::INFINITY;
    let mut converged = false;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            sum += eval_pair(k as f64 * h, &mut f);
            k += 2;
        }
        let next = half * h * sum;
        error = (next - estimate).abs();
        estimate = next;
        if error <= tol * estimate.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    QuadratureEstimate {
        value: estimate,
        error,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // ∫ x^14 over [-1,1] = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(v, 2.0 / 15.0, max_relative = 1e-14);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn gauss_legendre_large_order() {
        let (x, w) = gauss_legendre(64);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * (3.0 * x).cos()).sum();
        assert_relative_eq!(v, 2.0 * 3f64.sin() / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-13, 10);
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
        // ∫_0^1 ln x dx = -1
        let r = tanh_sinh(|x| x.ln(), 0.0, 1.0, 1e-13, 10);
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn tanh_sinh_smooth_long_interval() {
        let r = tanh_sinh(|t| (-2.0 * t).exp(), 0.0, 30.0, 1e-13, 12);
        assert!(r.converged);
        assert_relative_eq!(r.value, 0.5 * (1.0 - (-60.0f64).exp()), max_relative = 1e-12);
    }
}
