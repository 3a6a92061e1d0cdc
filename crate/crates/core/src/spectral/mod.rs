//! Fourier-side calculus on the periodic box.

mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod snapshot;

pub use field::{SpectralData, SpectralField, VectorField};
pub use grid::GridSpec;
pub use ops::{
    curl, divergence, divergence_norm, fractional_multiplier, gradient, leray_project, mollify, multiplier_weight,
    pointwise_product, riesz, sobolev_norm, sobolev_norm_sq, tensor_divergence, SobolevIndex, SobolevKind,
};
