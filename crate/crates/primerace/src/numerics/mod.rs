//! Special functions, quadrature, seeded random streams, and the
//! perturbed-identity matrix toolbox behind the density asymptotics.

pub mod bessel;
pub mod gauss;
pub mod perturbed;
pub mod quad;
pub mod rng;

pub use bessel::{bessel_i0, bessel_j0};
pub use gauss::{
    factorial, gaussian_fourier_closed_form, gaussian_fourier_truncated, psd_factor,
    ordering_probability_gaussian, scaled_identity_order_integral, MonteCarloEstimate,
};
pub use perturbed::{
    det_perturbed, inverse_perturbed, quadratic_form_floor, DetReport, InverseReport,
    PerturbedIdentityMatrix, QuadraticForm,
};
pub use quad::{adaptive_simpson, gauss_legendre};
pub use rng::{unit_circle, RandomStream, SAMPLE_BLOCK};
