//! Spectra of the dissipatively perturbed generator on the mapping torus.
//!
//! Functions on the mapping torus of a toral map A satisfy
//! u(x, theta + 1) = u(A x, theta), so the torus Fourier modes organize
//! into orbits of A^T: each orbit of a seed mode m is an invariant sector,
//! and the sector unrolls into a line where the generator plus viscosity
//!
//! ```text
//! P_eps = d/ds + eps (d^2/ds^2 - 4 pi^2 |m(s)|^2)
//! ```
//!
//! acts with a piecewise-constant potential growing like lambda^{2|s|}.
//! The zero-mode sector diagonalizes exactly with eigenvalues
//! 2 pi i k - 4 pi^2 k^2 eps, carrying the resonances of the unperturbed
//! flow; every other sector is confined by the exploding potential and is
//! discretized by finite differences on a truncated window.
//!
//! The stochastic-stability experiment assembles the L2 spectrum inside a
//! disk from these sectors and tracks its Hausdorff distance to the
//! resonance set in the compactified metric d_z as eps decreases.

mod modes;
mod sector;
mod stability;

pub use modes::{mode_orbits, ModeOrbit};
pub use sector::{trivial_sector_spectrum, SectorOperator, SpectrumResult};
pub use stability::{stability_experiment, stability_experiment_par, StabilityOptions, StabilityRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("operator dimension {0} exceeds the desk-scale cap of 10000")]
    DimensionTooLarge(usize),
    #[error("eigensolver failed to converge for sector {0:?}")]
    EigensolveFailed([i64; 2]),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Zero(#[from] crate::zeros::ZeroError),
}
