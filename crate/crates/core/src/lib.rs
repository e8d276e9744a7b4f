//! Scattering from a non-anti-Hermitian quaternionic point interaction.
//!
//! The potential is `(i V1 + j V2 + k V3) δ(x)` with complex `V1 = v1 + i v2`
//! and real `V2`, `V3`. The crate evaluates the closed-form reflection and
//! transmission amplitudes, analyses the quartic whose real positive roots
//! are spectral singularities, solves for the two singular branches in
//! closed form, and checks all of it against independent numerics.
//!
//! Natural units `ħ = m = 1` are used throughout, so `β = √(2E)`.

pub mod cli;
pub mod error;
pub mod oracle;
pub mod qalg;
pub mod scatter;
pub mod singular;

pub use error::{Error, Result};
pub use qalg::{ComplexNum, Quaternion};
pub use scatter::{DeltaPotential, ScatteringResult};
