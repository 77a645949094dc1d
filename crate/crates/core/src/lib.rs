//! Littlewood-Paley and pseudodifferential workbench on the periodic torus.
//!
//! Fields live on a uniform grid over `[0, 2pi)^n`. On top of the transform
//! and dealiased products the crate provides dyadic projections and norms,
//! symbols and their quantization, the paraproduct zone split, the exponent
//! arithmetic of the regularity bootstrap, the sequence iteration lemma, and
//! an end-to-end decay probe on manufactured solutions.

pub mod cutoff;
pub mod error;
pub mod fit;
pub mod lp;
pub mod exponents;
pub mod field;
pub mod grid;
pub mod io;
pub mod iteration;
pub mod paraproduct;
pub mod probe;
pub mod product;
pub mod psido;
pub mod rng;
pub mod verify;

mod fft;

pub use error::{Error, Result};
pub use field::{lp_norm, SpectralField};
pub use grid::GridSpec;
