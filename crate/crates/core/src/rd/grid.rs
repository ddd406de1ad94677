//! Periodic spectral grid on [−L, L) with the transform pair
//! f̂(k) = ∫ f(x) e^{ikx} dx and f(x) = (1/2π) ∫ f̂(k) e^{−ikx} dk,
//! both discretized by the trapezoid rule.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::RdError;

#[derive(Clone)]
pub struct SpectralGrid {
    half_width: f64,
    mode_count: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("half_width", &self.half_width)
            .field("mode_count", &self.mode_count)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.half_width == other.half_width && self.mode_count == other.mode_count
    }
}

impl SpectralGrid {
    pub fn new(half_width: f64, mode_count: usize) -> Result<Self, RdError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(RdError::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if mode_count < 4 || !mode_count.is_power_of_two() {
            return Err(RdError::InvalidGrid(format!("mode count {mode_count} must be a power of two, at least 4")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            half_width,
            mode_count,
            forward: planner.plan_fft_forward(mode_count),
            inverse: planner.plan_fft_inverse(mode_count),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.mode_count as f64
    }

    /// x_i = −L + 2Li/N.
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.mode_count).map(|i| self.x(i)).collect()
    }

    /// Signed mode index of storage slot `slot`: slots 0..N/2 hold j ≥ 0, the rest j − N.
    pub fn mode_index(&self, slot: usize) -> i64 {
        let n = self.mode_count as i64;
        let j = slot as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// k = πj/L for the mode in storage slot `slot`; the Nyquist slot N/2 carries j = −N/2.
    pub fn wavenumber(&self, slot: usize) -> f64 {
        PI * self.mode_index(slot) as f64 / self.half_width
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.mode_count).map(|s| self.wavenumber(s)).collect()
    }

    /// |k| for j = 0..=N/2; every slot's wavenumber magnitude is one of these.
    pub fn distinct_magnitudes(&self) -> Vec<f64> {
        (0..=self.mode_count / 2).map(|j| PI * j as f64 / self.half_width).collect()
    }

    /// Index into `distinct_magnitudes` for storage slot `slot`.
    pub fn magnitude_index(&self, slot: usize) -> usize {
        self.mode_index(slot).unsigned_abs() as usize
    }

    pub fn nyquist_slot(&self) -> usize {
        self.mode_count / 2
    }

    /// Spectrum of grid samples: f̂_j = Δx Σ_i f(x_i) e^{i k_j x_i}.
    pub fn forward(&self, samples: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.mode_count);
        let mut buf = samples.to_vec();
        // e^{i k_j x_i} = (−1)^j e^{2πi ji/N}
        self.inverse.process(&mut buf);
        let dx = self.spacing();
        for (slot, v) in buf.iter_mut().enumerate() {
            *v *= dx * self.parity(slot);
        }
        buf
    }

    /// Field from a spectrum: f(x_i) = (1/2L) Σ_j f̂_j e^{−i k_j x_i}.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(spectrum.len(), self.mode_count);
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(slot, v)| v * self.parity(slot))
            .collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / (2.0 * self.half_width);
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    fn parity(&self, slot: usize) -> f64 {
        if self.mode_index(slot).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}
