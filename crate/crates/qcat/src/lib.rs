//! qcat — a numerical laboratory for quantized symplectic automorphisms of
//! the 2d-torus: quantizations (Weyl, anti-Wick, positive Op⁺), metaplectic
//! propagators, semiclassical measures, entropic uncertainty, and entropy
//! certificates.

pub mod error;
pub mod linalg;
pub mod symplectic;
pub mod torus;
pub mod quantization;
pub mod spectra;
pub mod entropy;
pub mod io;
pub mod config;

pub use error::{QcatError, Result};
