//! Approximate inversion: the adjoint transform applied to Tu.

use num_complex::Complex64;
use rayon::prelude::*;

use super::signal::Signal1D;
use super::transform::{fbi_transform, FbiGrid};
use super::FbiError;

/// Reconstruct v = S(Tu) by trapezoid quadrature over the grid (S is the
/// conjugate-transpose kernel), pick the scalar kappa minimizing
/// ||kappa v - u||_2 / ||u||_2 over the sample points, and return that
/// relative residual. Exact inversion holds only for the corrected
/// transform on the full phase space; on a finite grid the residual decays
/// with h and with grid coverage.
pub fn inversion_residual(signal: &dyn Signal1D, grid: &FbiGrid) -> Result<f64, FbiError> {
    let transform = fbi_transform(signal, grid)?;
    if transform.global_max() == 0.0 {
        return Ok(0.0);
    }
    if grid.x_nodes.len() < 2 || grid.xi_nodes.len() < 2 {
        return Err(FbiError::BadInput("inversion needs a 2-D grid".into()));
    }
    let dx = grid.x_nodes[1] - grid.x_nodes[0];
    let dxi = grid.xi_nodes[1] - grid.xi_nodes[0];
    let prefactor = match grid.variant {
        super::FbiVariant::Gabor => 1.0,
        _ => (2.0 * std::f64::consts::PI * grid.h).powf(-1.5),
    };
    // evaluate on the interior of the x grid, where the xi window and the
    // Gaussian tails are fully covered
    let targets: Vec<f64> = grid.x_nodes.clone();
    let window = 8.0 * grid.h.sqrt();
    let pairs: Vec<(Complex64, Complex64)> = targets
        .par_iter()
        .map(|&y| {
            let mut acc = Complex64::ZERO;
            for (ix, &x) in grid.x_nodes.iter().enumerate() {
                if (x - y).abs() > window {
                    continue;
                }
                let wx = trapezoid_weight(ix, grid.x_nodes.len());
                for (ixi, &xi) in grid.xi_nodes.iter().enumerate() {
                    let w = wx * trapezoid_weight(ixi, grid.xi_nodes.len());
                    let kernel = adjoint_kernel(grid, x, xi, y);
                    acc += kernel * transform.values[ix][ixi] * w;
                }
            }
            (acc * (dx * dxi * prefactor), signal.eval(y))
        })
        .collect();
    // least-squares scalar kappa = <v, u> / <v, v>
    let mut vu = Complex64::ZERO;
    let mut vv = 0.0f64;
    let mut uu = 0.0f64;
    for &(v, u) in &pairs {
        vu += v.conj() * u;
        vv += v.norm_sqr();
        uu += u.norm_sqr();
    }
    if uu == 0.0 {
        return Ok(0.0);
    }
    let kappa = if vv > 0.0 { vu / vv } else { Complex64::ZERO };
    let mut err = 0.0f64;
    for &(v, u) in &pairs {
        err += (kappa * v - u).norm_sqr();
    }
    Ok((err / uu).sqrt())
}

fn adjoint_kernel(grid: &FbiGrid, x: f64, xi: f64, y: f64) -> Complex64 {
    match grid.variant {
        super::FbiVariant::Gabor => {
            let d = y - x;
            Complex64::new(-std::f64::consts::PI * d * d, xi * y / grid.h).exp()
        }
        super::FbiVariant::Flat => {
            let d = x - y;
            Complex64::new(-d * d / (2.0 * grid.h), -d * xi / grid.h).exp()
        }
        super::FbiVariant::ScaledPhase => {
            let d = x - y;
            let w = (1.0 + xi * xi).sqrt();
            Complex64::new(-w * d * d / (2.0 * grid.h), -d * xi / grid.h).exp()
        }
    }
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}
