//! The stochastic-stability experiment: spectra of the perturbed generator
//! against the resonance set in the compactified d_z metric.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::orbits::HyperbolicToralMap;
use crate::zeros::{hausdorff_dz, SpectralPoint};

use super::modes::mode_orbits;
use super::sector::{trivial_sector_spectrum, SectorOperator};
use super::SpectraError;

#[derive(Debug, Clone, Copy)]
pub struct StabilityOptions {
    pub grid_per_cell: usize,
    /// Sector window half-width in unit cells.
    pub window: usize,
    /// Trivial-sector mode cap (chosen from the disk radius when 0).
    pub k_max: i64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { grid_per_cell: 24, window: 5, k_max: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityRow {
    pub eps: f64,
    pub distance: f64,
    pub eigenvalues_in_disk: usize,
    /// Sectors solved for this row (excluding the trivial sector).
    pub sectors_solved: usize,
    /// Per-sector eigenvalues inside the disk: (seed, values).
    pub sector_eigenvalues: Vec<([i64; 2], Vec<Complex64>)>,
}

/// For each viscosity in `eps_list`, assemble the spectrum of the
/// perturbed generator inside the disk of radius `disk_radius` from the
/// exact zero-mode sector plus every mode sector that can reach the disk
/// (a sector's real parts lie below -4 pi^2 eps min |m|^2, so only
/// min |m|^2 <= disk_radius / (4 pi^2 eps) qualifies), and measure the
/// Hausdorff distance in d_z to the resonance set {2 pi i k}, with
/// infinity adjoined to both sides.
pub fn stability_experiment(
    map: &HyperbolicToralMap,
    eps_list: &[f64],
    z: f64,
    disk_radius: f64,
    options: &StabilityOptions,
) -> Result<Vec<StabilityRow>, SpectraError> {
    if !(z >= 10.0) {
        return Err(SpectraError::BadInput(format!("z = {z} must be at least 10")));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let k_in_disk = (disk_radius / two_pi).floor() as i64;
    let resonances: Vec<SpectralPoint> = (-k_in_disk..=k_in_disk)
        .map(|k| SpectralPoint::finite(0.0, two_pi * k as f64))
        .chain([SpectralPoint::Infinity])
        .collect();
    if resonances
        .iter()
        .any(|p| matches!(p, SpectralPoint::Finite(v) if (v - Complex64::new(z, 0.0)).norm() < 0.1))
    {
        return Err(SpectraError::BadInput(format!("z = {z} is within 0.1 of a resonance")));
    }

    let four_pi_sq = two_pi * two_pi;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(SpectraError::BadInput(format!("eps = {eps} must be positive")));
        }
        let k_max = if options.k_max > 0 {
            options.k_max
        } else {
            ((disk_radius / two_pi).ceil() as i64) + 2
        };
        let mut spectrum: Vec<Complex64> = trivial_sector_spectrum(eps, k_max)
            .into_iter()
            .filter(|v| v.norm() <= disk_radius)
            .collect();

        // nontrivial sectors that can reach the disk
        let reach = disk_radius / (four_pi_sq * eps);
        let max_norm = reach.sqrt();
        let mut sector_eigenvalues: Vec<([i64; 2], Vec<Complex64>)> = Vec::new();
        let mut sectors_solved = 0usize;
        if max_norm >= 1.0 {
            let orbits = mode_orbits(map, max_norm, options.window)?;
            sectors_solved = orbits.len();
            // sign-flipped seeds give the identical real operator; solve one
            // representative per +- class and reuse
            let mut canonical: Vec<(usize, [i64; 2])> = Vec::new();
            for (i, orbit) in orbits.iter().enumerate() {
                let neg = [-orbit.seed[0], -orbit.seed[1]];
                if let Some(&(j, _)) = canonical.iter().find(|(_, s)| *s == neg) {
                    sector_eigenvalues.push((orbit.seed, sector_eigenvalues[j].1.clone()));
                    continue;
                }
                canonical.push((sector_eigenvalues.len(), orbit.seed));
                let solved: Vec<Complex64> = {
                    let op =
                        SectorOperator::build(orbit, map, eps, options.grid_per_cell, options.window)?;
                    op.spectrum()?
                        .eigenvalues
                        .into_iter()
                        .filter(|v| v.norm() <= disk_radius)
                        .collect()
                };
                let _ = i;
                sector_eigenvalues.push((orbit.seed, solved));
            }
        }
        for (_, values) in &sector_eigenvalues {
            spectrum.extend_from_slice(values);
        }
        let mut points: Vec<SpectralPoint> =
            spectrum.iter().map(|&v| SpectralPoint::Finite(v)).collect();
        points.push(SpectralPoint::Infinity);
        let distance = hausdorff_dz(&resonances, &points, Complex64::new(z, 0.0))?;
        rows.push(StabilityRow {
            eps,
            distance,
            eigenvalues_in_disk: spectrum.len(),
            sectors_solved,
            sector_eigenvalues,
        });
    }
    Ok(rows)
}

/// Parallel variant: rows are computed independently per eps and joined in
/// input order.
pub fn stability_experiment_par(
    map: &HyperbolicToralMap,
    eps_list: &[f64],
    z: f64,
    disk_radius: f64,
    options: &StabilityOptions,
) -> Result<Vec<StabilityRow>, SpectraError> {
    let results: Vec<Result<Vec<StabilityRow>, SpectraError>> = eps_list
        .par_iter()
        .map(|&eps| stability_experiment(map, &[eps], z, disk_radius, options))
        .collect();
    let mut rows = Vec::with_capacity(eps_list.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}
