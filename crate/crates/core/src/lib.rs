//! Mittag-Leffler functions, closed-form inverse Laplace series for
//! multi-term fractional symbols, and spectral solvers for fractional
//! reaction-diffusion equations, with independent numerical oracles.

pub mod inversion;
pub mod ml;
pub mod oracles;
pub mod quadrature;
pub mod rd;
pub mod special;
pub mod summation;
