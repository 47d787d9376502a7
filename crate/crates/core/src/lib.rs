//! Numerical laboratory for the Laplacian on surfaces of revolution
//! `ds² = dx² + (1 + x^{2m})^{1/m} dθ²`, whose single periodic geodesic at
//! `x = 0` is degenerately unstable.
//!
//! After separating the angle every question becomes one about a 1D
//! operator `-h²∂² + V(x)` on a uniform grid. The modules build those
//! operators ([`geometry`], [`grid`], [`hamiltonian`]), solve and probe them
//! ([`spectral`], [`resolvent`], [`evolution`]) and construct the complex WKB
//! states that saturate the smoothing estimate ([`quasimode`]). [`fit`]
//! holds the log-log regression every scaling check goes through.

pub mod banded;
pub mod cutoff;
pub mod evolution;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod grid;
pub mod hamiltonian;
pub mod quadrature;
pub mod quasimode;
pub mod resolvent;
pub mod spectral;
pub mod vector;

pub use error::{Error, Result};
pub use geometry::{Mode, ModePotentialSpec, SurfaceProfile};
pub use grid::{AbsorbingLayer, Grid1D, GridFunction};
pub use hamiltonian::{assemble, BandedOperator, ModelOperator, OperatorSpec};
pub use num_complex::Complex64;

/// Map over a slice, in parallel when the `parallel` feature is enabled.
/// Order of results matches the input.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
