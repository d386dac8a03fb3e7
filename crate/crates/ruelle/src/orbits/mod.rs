//! Model Anosov flows and their periodic-orbit data.
//!
//! Two model families are supported:
//! * constant-roof suspensions of hyperbolic toral automorphisms ("cat
//!   maps"), whose orbit data is exact integer arithmetic, and
//! * geodesic flows on hyperbolic surfaces presented by a finite set of
//!   SL(2, R) generators, whose orbit data comes from word enumeration.
//!
//! Every closed orbit is recorded through the invariants that enter orbit
//! sums: length, primitive length, the integral of the potential along the
//! orbit, and log |det(I - P)| for the linearized return map P.

mod catalog;
mod cat_map;
mod fuchsian;
mod suspension;

pub use catalog::{OrbitCatalog, PeriodicOrbit};
pub use cat_map::{primitive_orbit_counts, HyperbolicToralMap};
pub use fuchsian::FuchsianModel;
pub use suspension::SuspensionModel;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OrbitError {
    #[error("matrix determinant is {0}, expected 1")]
    DeterminantNotOne(i64),
    #[error("|trace| = {0} <= 2: map is not hyperbolic")]
    NotHyperbolic(i64),
    #[error("integer overflow computing fixed points at period {k}; lower the horizon")]
    Overflow { k: u32 },
    #[error("fixed-point counts are inconsistent at period {p}: {detail}")]
    InconsistentCounts { p: usize, detail: String },
    #[error("roof must be positive, got {0}")]
    NonPositiveRoof(f64),
    #[error("generator {index} has determinant {det}, expected 1 within 1e-12")]
    NonUnimodularGenerator { index: usize, det: f64 },
    #[error("generator list is empty")]
    EmptyGeneratorList,
    #[error("invalid orbit invariants: {0}")]
    InvalidOrbit(String),
}
