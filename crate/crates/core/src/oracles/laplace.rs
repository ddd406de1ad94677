//! Forward Laplace transform by tanh-sinh quadrature on a finite horizon.

use crate::quadrature::tanh_sinh;

use super::OracleError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    /// Quadrature level change plus the tail estimate beyond the horizon.
    pub error: f64,
    pub tail: f64,
}

/// ∫₀^T e^{−st} f(t) dt with tail estimate e^{−sT}|f(T)|/s.
///
/// The tail is exact for f constant beyond T and an underestimate for growing
/// f; the horizon should make e^{−sT}·sup|f| negligible.
pub fn forward_laplace<F>(mut f: F, s: f64, horizon: f64, tol: f64) -> Result<LaplaceEstimate, OracleError>
where
    F: FnMut(f64) -> f64,
{
    if !(s.is_finite() && s > 0.0) {
        return Err(OracleError::InvalidConfig(format!("s = {s} must be positive")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(OracleError::InvalidConfig(format!("horizon {horizon} must be positive")));
    }
    let q = tanh_sinh(|t| (-s * t).exp() * f(t), 0.0, horizon, tol, 12);
    if !q.converged || !q.value.is_finite() {
        return Err(OracleError::QuadratureFailure(format!(
            "level change {:e} after {} evaluations",
            q.error, q.evaluations
        )));
    }
    let tail = (-s * horizon).exp() * f(horizon).abs() / s;
    Ok(LaplaceEstimate {
        value: q.value,
        error: q.error + tail,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{prabhakar_real, PrabhakarOrder};
    use approx::assert_relative_eq;

    #[test]
    fn constant_and_ramp() {
        let r = forward_laplace(|_| 1.0, 2.0, 30.0, 1e-13).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-12);
        let r = forward_laplace(|t| t, 1.0, 60.0, 1e-13).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn singular_integrand_at_origin() {
        // ∫ e^{−t} t^{−1/2} dt = √π
        let r = forward_laplace(|t| t.powf(-0.5), 1.0, 50.0, 1e-12).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn three_parameter_pair() {
        // t^{γ−1} E^δ_{β,γ}(ω t^β) ↔ s^{−γ}(1 − ω s^{−β})^{−δ}
        let (beta, gamma, delta, omega, s) = (0.7, 1.3, 1.8, -0.9, 1.5);
        let order = PrabhakarOrder::new(beta, gamma, delta).unwrap();
        let r = forward_laplace(
            |t| t.powf(gamma - 1.0) * prabhakar_real(order, omega * t.powf(beta), 1e-15).unwrap(),
            s,
            40.0,
            1e-12,
        )
        .unwrap();
        let closed = s.powf(-gamma) * (1.0 - omega * s.powf(-beta)).powf(-delta);
        assert!((r.value - closed).abs() <= 1e-9 + r.error, "{} vs {closed}", r.value);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(forward_laplace(|_| 1.0, -1.0, 10.0, 1e-10).is_err());
        assert!(forward_laplace(|_| 1.0, 1.0, 0.0, 1e-10).is_err());
    }
}
