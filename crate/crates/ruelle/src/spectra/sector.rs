//! Finite-difference sector operators and their spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::orbits::HyperbolicToralMap;

use super::modes::ModeOrbit;
use super::SpectraError;

/// Exact spectrum of the zero-mode sector: d/d theta + eps d^2/d theta^2 on
/// periodic functions, {2 pi i k - 4 pi^2 k^2 eps : |k| <= k_max}.
pub fn trivial_sector_spectrum(eps: f64, k_max: i64) -> Vec<Complex64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    (-k_max..=k_max)
        .map(|k| {
            let omega = two_pi * k as f64;
            Complex64::new(-eps * omega * omega, omega)
        })
        .collect()
}

/// Tridiagonal discretization of d/ds + eps (d^2/ds^2 - 4 pi^2 |m(s)|^2)
/// on the unrolled sector line s in [-K-1, K+1], with homogeneous endpoint
/// conditions (the potential grows like lambda^{2|s|} and confines
/// eigenfunctions long before the ends).
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub seed: [i64; 2],
    pub dimension: usize,
    pub grid_step: f64,
    pub eps: f64,
    pub min_mode_norm_sq: f64,
    /// eps * 4 pi^2 max |m_k|^2 over the window, the artifact scale.
    max_potential: f64,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl SectorOperator {
    /// `grid_per_cell` nodes per unit cell; the window covers |k| <= K
    /// whole cells plus one guard cell per side, so the dimension is
    /// grid_per_cell * (2K + 2) - 1 interior nodes.
    pub fn build(
        orbit: &ModeOrbit,
        map: &HyperbolicToralMap,
        eps: f64,
        grid_per_cell: usize,
        window: usize,
    ) -> Result<Self, SpectraError> {
        if !(eps > 0.0) {
            return Err(SpectraError::BadInput(format!("eps = {eps} must be positive")));
        }
        if grid_per_cell < 16 {
            return Err(SpectraError::BadInput(format!(
                "grid_per_cell = {grid_per_cell} under the stability minimum of 16"
            )));
        }
        let k = window as i64;
        let dim = grid_per_cell * (2 * window + 2) - 1;
        if dim > 10_000 {
            return Err(SpectraError::DimensionTooLarge(dim));
        }
        let ds = 1.0 / grid_per_cell as f64;
        let left = -(k as f64) - 1.0;
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mut diag = Vec::with_capacity(dim);
        let mut sub = Vec::with_capacity(dim.saturating_sub(1));
        let mut sup = Vec::with_capacity(dim.saturating_sub(1));
        let mut max_potential = 0.0f64;
        for j in 1..=dim {
            let s = left + j as f64 * ds;
            // the mode index of the cell containing s
            let cell = s.floor().max(-(k as f64) - 1.0).min(k as f64) as i64;
            let potential = eps * four_pi_sq * orbit.norm_sq_at(map, cell)?;
            max_potential = max_potential.max(potential);
            diag.push(-2.0 * eps / (ds * ds) - potential);
            if j < dim {
                sup.push(eps / (ds * ds) + 1.0 / (2.0 * ds));
                sub.push(eps / (ds * ds) - 1.0 / (2.0 * ds));
            }
        }
        Ok(Self {
            seed: orbit.seed,
            dimension: dim,
            grid_step: ds,
            eps,
            min_mode_norm_sq: orbit.min_norm_sq(),
            max_potential,
            sub,
            diag,
            sup,
        })
    }

    /// Upper bound on the real part of the numerical range:
    /// -4 pi^2 eps min |m_k|^2 (the centered first difference is exactly
    /// skew, the diffusion and potential parts are negative definite).
    pub fn real_part_bound(&self) -> f64 {
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        -four_pi_sq * self.eps * self.min_mode_norm_sq
    }

    /// Dense nonsymmetric eigensolve. Eigenvalues with |Re| beyond ten
    /// times the potential scale are discretization artifacts of the
    /// unresolved high end of the potential and are reported separately.
    pub fn spectrum(&self) -> Result<SpectrumResult, SpectraError> {
        let n = self.dimension;
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            dense[(j, j)] = self.diag[j];
            if j + 1 < n {
                dense[(j, j + 1)] = self.sup[j];
                dense[(j + 1, j)] = self.sub[j];
            }
        }
        let eigen = dense.complex_eigenvalues();
        let cutoff = 10.0 * (self.max_potential + 2.0 * self.eps / (self.grid_step * self.grid_step));
        let mut kept = Vec::new();
        let mut discarded = 0usize;
        for ev in eigen.iter() {
            let val = Complex64::new(ev.re, ev.im);
            if val.re.abs() > cutoff {
                discarded += 1;
            } else {
                kept.push(val);
            }
        }
        kept.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        let cells = (self.dimension + 1) as f64 * self.grid_step;
        Ok(SpectrumResult {
            seed: self.seed,
            eigenvalues: kept,
            discarded,
            window: (cells / 2.0 - 1.0).round() as usize,
            grid_step: self.grid_step,
        })
    }
}

/// Spectrum of one sector with truncation metadata.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub seed: [i64; 2],
    /// Sorted by real part descending.
    pub eigenvalues: Vec<Complex64>,
    /// Count of discretization artifacts removed.
    pub discarded: usize,
    pub window: usize,
    pub grid_step: f64,
}
