//! An explicit escape function on the cotangent bundle of the cat-map
//! suspension.
//!
//! The suspension flow lifts to the cotangent bundle through the
//! transpose-inverse of its differential. On this model the invariant
//! splitting of the cotangent space into flow, expanding, and contracting
//! codirections is exact (eigenvectors of the transposed map), so the
//! escape function
//!
//! ```text
//! G0(a) = int_{-T0}^{T1} m(flow_t(a)) |flow_t(a)_cov|^delta dt
//!         - A * chi(|a_cov|) |eta|^delta
//! ```
//!
//! can be evaluated to quadrature accuracy and its defining properties
//! checked by deterministic sampling:
//! (i) G0 is negative and elliptic of order delta outside a cone around
//! the contracting codirection, and (ii) its derivative along the lifted
//! flow is negative and elliptic of order delta outside a cone around the
//! flow codirection.

mod flow;
mod g0;
mod scan;
mod splitting;

pub use flow::{covector_flow, CotangentSample};
pub use g0::{bracket_along_flow, cone_symbol, escape_value, BracketValues, EscapeFunction};
pub use scan::{scan_properties, ScanConfig, ScanReport};
pub use splitting::SplittingData;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EscapeError {
    #[error("invalid escape parameters: {0}")]
    BadParams(String),
    #[error("quadrature did not converge: relative change {rel_change} after doubling nodes")]
    QuadratureNotConverged { rel_change: f64 },
}

/// Parameters of the escape function: the homogeneity degree, flow window,
/// flow-codirection weight, cone apertures, and radial cutoff.
#[derive(Debug, Clone, Copy)]
pub struct EscapeParams {
    /// Homogeneity degree delta = 1/s; 1 for the analytic model.
    pub delta: f64,
    /// Backward extent of the flow window.
    pub t0: f64,
    /// Forward extent; selected so the forward contraction dominates the
    /// backward growth of the window integral (see [`choose_t1`]).
    pub t1: f64,
    /// Weight of the flow-codirection term.
    pub a_const: f64,
    /// Outer cone aperture: the symbol vanishes outside aperture `gamma`.
    pub gamma: f64,
    /// Inner aperture: the symbol saturates to +-1 inside `gamma1`.
    pub gamma1: f64,
    /// Radial cutoff: both the symbol's near-zero ramp and the cutoff chi
    /// vanish below this radius and saturate above twice it.
    pub cutoff_radius: f64,
}

impl EscapeParams {
    pub fn validate(&self) -> Result<(), EscapeError> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(EscapeError::BadParams(format!("delta = {} not in (0, 1]", self.delta)));
        }
        if !(self.t0 > 0.0 && self.t1 > self.t0) {
            return Err(EscapeError::BadParams(format!(
                "window must satisfy 0 < T0 < T1, got T0 = {}, T1 = {}",
                self.t0, self.t1
            )));
        }
        if !(self.gamma1 > 0.0 && self.gamma1 < self.gamma) {
            return Err(EscapeError::BadParams(format!(
                "apertures must satisfy 0 < gamma1 < gamma, got {} and {}",
                self.gamma1, self.gamma
            )));
        }
        if !(self.a_const >= 0.0) || !(self.cutoff_radius > 0.0) {
            return Err(EscapeError::BadParams("A and cutoff must be positive".into()));
        }
        Ok(())
    }

    /// Defaults for a given suspension geometry; only the cone apertures
    /// and the cutoff are fixed constants, the window and the weight are
    /// derived from them.
    ///
    /// The backward window must carry every covector outside the
    /// flow-codirection cone (aperture `CONE_0_APERTURE`) into the inner
    /// contracting cone: covectors with no expanding component only reach
    /// aperture flow/(contracting * lambda^{T0}), so
    /// lambda^{T0} >= 1 / (CONE_0_APERTURE * gamma1).  The weight A must
    /// then dominate the backward growth of the window integral near the
    /// contracting-cone boundary, which scales like lambda^{T0}; `t1` comes
    /// from [`choose_t1`].
    pub fn defaults(split: &SplittingData, roof: f64) -> Self {
        let rate = split.expansion_log / roof;
        let gamma1 = 0.15;
        let t0_needed = (1.15 / (CONE_0_APERTURE * gamma1)).ln() / rate;
        let t0 = (t0_needed / 0.25).ceil() * 0.25;
        let backward_growth = ((rate * t0).exp() - 1.0) / rate;
        let mut params = Self {
            delta: 1.0,
            t0,
            t1: 0.0,
            a_const: (2.0 * backward_growth / CONE_S_APERTURE / 0.25).ceil() * 0.25,
            gamma: 0.35,
            gamma1,
            cutoff_radius: 0.1,
        };
        params.t1 = choose_t1(&params, split, roof);
        params
    }
}

/// Aperture of the excluded cone around the contracting codirection in
/// property (i); shared between the parameter derivation and the scan.
pub const CONE_S_APERTURE: f64 = 0.5;
/// Aperture of the excluded cone around the flow codirection in property
/// (ii).
pub const CONE_0_APERTURE: f64 = 0.3;

/// Smallest forward time (on a 0.25 grid) making the window integral
/// condition hold: the backward growth of |flow_t|^delta over [-T0, 0],
/// maximized over directions, must stay under (T1 - T0) / (2 C1^delta),
/// where C1 relates window norms to the starting norm outside the
/// flow+contracting cone.
pub fn choose_t1(params: &EscapeParams, split: &SplittingData, roof: f64) -> f64 {
    let rate = split.expansion_log / roof;
    let delta = params.delta;
    // sup over directions of int_{-T0}^0 |flow_t|^delta dt / |.|^delta:
    // sampled over the unit sphere in adapted coordinates
    let mut sup = 0.0f64;
    let samples = 64;
    for i in 0..samples {
        for j in 0..samples / 2 {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / (samples / 2) as f64;
            let u = theta.sin() * phi.cos();
            let s = theta.sin() * phi.sin();
            let zero = theta.cos();
            let mut integral = 0.0;
            let steps = 64;
            let dt = params.t0 / steps as f64;
            for k in 0..steps {
                let t = -params.t0 + (k as f64 + 0.5) * dt;
                let nu = ((u * (rate * t).exp()).powi(2)
                    + (s * (-rate * t).exp()).powi(2)
                    + zero * zero)
                    .sqrt();
                integral += nu.powf(delta) * dt;
            }
            sup = sup.max(integral);
        }
    }
    // kappa: least expanding fraction outside the flow+contracting cone
    let kappa = 0.25f64 / (1.0 + 0.25f64 * 0.25).sqrt();
    let c1 = 1.0 / (kappa * (rate * params.t0).exp());
    let needed = params.t0 + 2.0 * c1.powf(delta) * sup * 1.05;
    (needed / 0.25).ceil() * 0.25
}
