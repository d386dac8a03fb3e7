//! Decay-rate fits on transform values.

use super::transform::{FbiGrid, TransformValues};
use super::FbiError;
use crate::numerics::linear_fit;

/// Least-squares decay law log sup_x |Tu(., xi)| ~ slope * (<xi>/h)^{1/s}.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub xi_range: (f64, f64),
    pub points_used: usize,
}

/// Hard floor excluding subnormal noise from fits.
const UNDERFLOW_FLOOR: f64 = 1e-280;

/// Fit the decay exponent of the transform against (<xi>/h)^{1/s}.
///
/// Only frequencies with sup_x |Tu| inside [floor, 1e-3] enter: the cap
/// keeps the fit in the asymptotic regime and the floor excludes values
/// below both the subnormal cutoff and the quadrature rounding floor
/// (1e-13 of the global maximum in double precision).
pub fn decay_fit(values: &TransformValues, grid: &FbiGrid, s: f64) -> Result<DecayFit, FbiError> {
    let noise_floor = UNDERFLOW_FLOOR.max(1e-13 * values.global_max());
    let cap = 1e-3;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (ixi, &xi) in grid.xi_nodes.iter().enumerate() {
        let sup = values.sup_over_x(ixi);
        if sup < noise_floor || sup > cap {
            continue;
        }
        let bracket = (1.0 + xi * xi).sqrt() / grid.h;
        xs.push(bracket.powf(1.0 / s));
        ys.push(sup.ln());
        lo = lo.min(xi);
        hi = hi.max(xi);
    }
    if xs.len() < 3 {
        return Err(FbiError::EmptyFitRange { lo: noise_floor, hi: cap });
    }
    let fit = linear_fit(&xs, &ys)
        .ok_or(FbiError::EmptyFitRange { lo: noise_floor, hi: cap })?;
    Ok(DecayFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        xi_range: (lo, hi),
        points_used: xs.len(),
    })
}

/// Fit the same data against candidate exponents 1/s' and report
/// (s', r_squared) pairs; the true index should win on fit quality.
pub fn exponent_selection(
    values: &TransformValues,
    grid: &FbiGrid,
    candidates: &[f64],
) -> Result<Vec<(f64, f64)>, FbiError> {
    candidates
        .iter()
        .map(|&s| decay_fit(values, grid, s).map(|f| (s, f.r_squared)))
        .collect()
}
