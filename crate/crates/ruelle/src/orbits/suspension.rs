//! Constant-roof suspension of a hyperbolic toral map, with a constant
//! potential.
//!
//! The suspension is the mapping torus T^2 x [0, r] / ((x, r) ~ (Ax, 0))
//! with the unit-speed vertical flow. Closed orbits of time k*r pass
//! through the fixed points of A^k; their transverse return map is A^k, so
//! |det(I - P)| equals the fixed-point count N_k exactly.

use super::{primitive_orbit_counts, HyperbolicToralMap, OrbitCatalog, OrbitError, PeriodicOrbit};

#[derive(Debug, Clone, Copy)]
pub struct SuspensionModel {
    pub map: HyperbolicToralMap,
    pub roof: f64,
    /// Constant potential V = c; the only potential class with exact orbit
    /// integrals (int_gamma V = c * T).
    pub potential_const: f64,
}

impl SuspensionModel {
    pub fn new(map: HyperbolicToralMap, roof: f64, potential_const: f64) -> Result<Self, OrbitError> {
        if !(roof > 0.0) {
            return Err(OrbitError::NonPositiveRoof(roof));
        }
        Ok(Self { map, roof, potential_const })
    }

    /// Exact topological entropy of the suspension flow.
    pub fn entropy(&self) -> f64 {
        self.map.expansion_log() / self.roof
    }

    pub fn model_id(&self) -> String {
        let [a, b, c, d] = self.map.entries();
        format!(
            "cat[{a},{b},{c},{d}]_r{}_c{}",
            self.roof, self.potential_const
        )
    }

    /// All orbits of length <= horizon: for each primitive period p and
    /// repetition j with p*j*roof <= horizon, one entry of multiplicity M_p.
    pub fn enumerate_orbits(&self, horizon: f64) -> Result<OrbitCatalog, OrbitError> {
        assert!(horizon > 0.0, "horizon must be positive");
        let k_max = (horizon / self.roof).floor() as u32;
        let mut orbits = Vec::new();
        if k_max >= 1 {
            let fixed = self.map.fixed_point_counts(k_max)?;
            let prim = primitive_orbit_counts(&fixed)?;
            for p in 1..=k_max as usize {
                if prim[p - 1] == 0 {
                    continue;
                }
                let mut j = 1;
                while (p * j) as f64 * self.roof <= horizon + 1e-12 * horizon {
                    let k = p * j;
                    let length = k as f64 * self.roof;
                    // |det(I - A^k)| = N_k = tr(A^k) - 2 for positive trace;
                    // ln of the exact integer keeps full precision.
                    let log_det = (fixed[k - 1] as f64).ln();
                    orbits.push(PeriodicOrbit::new(
                        length,
                        p as f64 * self.roof,
                        self.potential_const * length,
                        log_det,
                        prim[p - 1] as u64,
                    )?);
                    j += 1;
                }
            }
        }
        Ok(OrbitCatalog::new(
            self.model_id(),
            orbits,
            horizon,
            true,
            self.entropy(),
        ))
    }
}
