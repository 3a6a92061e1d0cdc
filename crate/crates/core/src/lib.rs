//! Pseudo-spectral simulation of the mollified micropolar system on the
//! periodic box `[0, L)^3`, together with an auditor for the energy
//! balances, fractional Sobolev estimates, the Grönwall lemma and the
//! existence-time formula that accompany it.
//!
//! Conventions used throughout the crate:
//!
//! * A real field is stored by its Fourier coefficients `f(x) = Σ_k f̂(k) e^{ik·x}`
//!   on the lattice `k = (2π/L) m`, `m ∈ [-n/2, n/2)^3`.
//! * Every "integral" `∫ f g dx` is the box average `(1/|Ω|) ∫_Ω f g dx`,
//!   so Parseval reads `∫ |f|^2 = Σ_k |f̂(k)|^2` with unit weight.
//! * A "single mode of amplitude `a`" is the real field `√2 a e cos(k·x)`
//!   with `|e| = 1`, whose L² norm is `a`.

pub mod auditor;
pub mod cli;
pub mod config;
pub mod datagen;
pub mod error;
pub mod integrator;
pub mod rhs;
pub mod spectral;

pub use error::{Error, Result};
