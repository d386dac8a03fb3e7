//! Computational spectral theory for model Anosov flows.
//!
//! The crate enumerates periodic-orbit data for two model flows (cat-map
//! suspensions and hyperbolic-surface geodesic flows), evaluates dynamical
//! determinants and trace formulas from that data, locates and counts
//! Ruelle-Pollicott resonances, constructs an explicit escape function on
//! the cat-map suspension, measures Gevrey regularity through FBI/wavepacket
//! transforms, and runs stochastic-stability experiments for the perturbed
//! generator P + eps * Laplacian.
//!
//! Each capability has a runnable program under `examples/`; the `ruelle`
//! binary exposes the same functionality as subcommands.

pub mod config;
pub mod escape;
pub mod fbi;
pub mod formats;
pub mod numerics;
pub mod orbits;
pub mod runner;
pub mod spectra;
pub mod zeros;
pub mod zeta;

pub use escape::{
    bracket_along_flow, choose_t1, cone_symbol, covector_flow, escape_value, scan_properties,
    BracketValues, CotangentSample, EscapeError, EscapeFunction, EscapeParams, ScanConfig,
    ScanReport, SplittingData,
};
pub use fbi::{
    decay_fit, exponent_selection, fbi_transform, inversion_residual, wavefront_scan, DecayFit,
    FbiError, FbiGrid, FbiVariant, GevreySignal, SampledSignal, Signal1D, SingularSignal,
    Singularity, TransformValues, WavefrontReport, WindowSpec,
};
pub use orbits::{
    FuchsianModel, HyperbolicToralMap, OrbitCatalog, OrbitError, PeriodicOrbit, SuspensionModel,
};
pub use spectra::{
    mode_orbits, stability_experiment, stability_experiment_par, trivial_sector_spectrum,
    ModeOrbit, SectorOperator, SpectraError, SpectrumResult, StabilityOptions, StabilityRow,
};
pub use zeros::{
    counting_function, hausdorff_dz, locate_zeros, order_estimate, winding_number, Box2, LogAnalytic,
    LogFn, OrderFit, PlainFn, Resonance, SearchOptions, SpectralPoint, ZeroError,
};
pub use zeta::{
    closed_form_cat_zeta, correction_polynomial, log_ruelle_zeta_direct, log_zeta_direct,
    regularized_det, spectral_moment_sum, trace_moment, weierstrass_factor, zeta_via_detm,
    CorrectionPolynomial, DeterminantSeries, RegDetInput, SeriesValue, TraceMoment, ZetaError,
};
