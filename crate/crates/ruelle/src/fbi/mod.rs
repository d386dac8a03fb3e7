//! Wavepacket (FBI/Gabor) transform diagnostics for Gevrey regularity.
//!
//! A 1-D test signal with Fourier coefficients decaying like
//! exp(-c |l|^{1/s}) is s-Gevrey; its windowed real-line representative is
//! transformed by
//!
//! ```text
//! Tu(x, xi) = (2 pi h)^{-3/2} int exp(i (x-x') xi / h - w(xi) (x-x')^2 / (2h)) u(x') dx'
//! ```
//!
//! with w = 1 (flat variant) or w = <xi> (scaled-phase variant), or by the
//! classical Gabor window. The pointwise decay of |Tu| in <xi>/h encodes
//! the Gevrey index: fitting log sup_x |Tu| against (<xi>/h)^{1/s} is a
//! straight line precisely for the true index, jumps localize as slow-decay
//! cells, and the adjoint transform approximately inverts T as h -> 0.

mod fit;
mod inversion;
mod signal;
mod transform;
mod wavefront;

pub use fit::{decay_fit, exponent_selection, DecayFit};
pub use inversion::inversion_residual;
pub use signal::{GevreySignal, SampledSignal, Signal1D, SingularSignal, Singularity, WindowSpec};
pub use transform::{fbi_transform, FbiGrid, FbiVariant, TransformValues};
pub use wavefront::{wavefront_scan, WavefrontReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FbiError {
    #[error("quadrature did not converge: relative change {rel_change:e} at finest refinement")]
    QuadratureNotConverged { rel_change: f64 },
    #[error("no transform values inside the fit window [{lo:e}, {hi:e}]")]
    EmptyFitRange { lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    BadInput(String),
}
