//! Orbit catalogs: sorted, multiplicity-aggregated collections of closed
//! orbits up to a stated length horizon.

use super::OrbitError;

/// Invariants of one closed orbit (or a family sharing them).
///
/// `log_det_factor` stores log |det(I - P)| for the linearized return map P
/// rather than the determinant itself: the determinant grows exponentially
/// in the length and overflows doubles long before useful horizons, while
/// every downstream sum only needs the log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicOrbit {
    /// Orbit length (time units).
    pub length: f64,
    /// Length of the underlying primitive orbit.
    pub primitive_length: f64,
    /// Integral of the potential along the orbit.
    pub potential_integral: f64,
    /// log |det(I - P)| for the linearized return map; positive by
    /// hyperbolicity.
    pub log_det_factor: f64,
    /// Number of distinct orbits sharing these invariants.
    pub multiplicity: u64,
}

impl PeriodicOrbit {
    pub fn new(
        length: f64,
        primitive_length: f64,
        potential_integral: f64,
        log_det_factor: f64,
        multiplicity: u64,
    ) -> Result<Self, OrbitError> {
        if !(length > 0.0) || !(primitive_length > 0.0) {
            return Err(OrbitError::InvalidOrbit(format!(
                "lengths must be positive, got T={length}, T#={primitive_length}"
            )));
        }
        let ratio = length / primitive_length;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 - 1e-9 {
            return Err(OrbitError::InvalidOrbit(format!(
                "primitive length {primitive_length} does not divide length {length}"
            )));
        }
        if !(log_det_factor > 0.0) && log_det_factor != 0.0 {
            return Err(OrbitError::InvalidOrbit(format!(
                "log |det(I - P)| must be nonnegative, got {log_det_factor}"
            )));
        }
        if multiplicity == 0 {
            return Err(OrbitError::InvalidOrbit("multiplicity must be positive".into()));
        }
        Ok(Self {
            length,
            primitive_length,
            potential_integral,
            log_det_factor,
            multiplicity,
        })
    }

    /// Number of repetitions of the primitive orbit.
    pub fn repetition(&self) -> u64 {
        (self.length / self.primitive_length).round() as u64
    }
}

/// A horizon-complete (or best-effort) collection of orbits for one model.
#[derive(Debug, Clone)]
pub struct OrbitCatalog {
    pub model_id: String,
    pub orbits: Vec<PeriodicOrbit>,
    /// All orbits with length <= horizon_t are present when `complete`.
    pub horizon_t: f64,
    pub complete: bool,
    /// Growth-rate estimate used for tail bounds downstream.
    pub topological_entropy_estimate: f64,
}

impl OrbitCatalog {
    pub fn new(
        model_id: impl Into<String>,
        orbits: Vec<PeriodicOrbit>,
        horizon_t: f64,
        complete: bool,
        topological_entropy_estimate: f64,
    ) -> Self {
        let mut catalog = Self {
            model_id: model_id.into(),
            orbits,
            horizon_t,
            complete,
            topological_entropy_estimate,
        };
        catalog.normalize();
        catalog
    }

    /// Sort by (length, primitive_length) and merge entries that agree in
    /// all invariants (within 1e-10 relative) by adding multiplicities.
    /// Idempotent.
    pub fn normalize(&mut self) {
        self.orbits.sort_by(|p, q| {
            p.length
                .total_cmp(&q.length)
                .then(p.primitive_length.total_cmp(&q.primitive_length))
                .then(p.log_det_factor.total_cmp(&q.log_det_factor))
        });
        let mut merged: Vec<PeriodicOrbit> = Vec::with_capacity(self.orbits.len());
        for orbit in self.orbits.drain(..) {
            match merged.last_mut() {
                Some(last)
                    if close(last.length, orbit.length)
                        && close(last.primitive_length, orbit.primitive_length)
                        && close(last.log_det_factor, orbit.log_det_factor) =>
                {
                    last.multiplicity += orbit.multiplicity;
                }
                _ => merged.push(orbit),
            }
        }
        self.orbits = merged;
    }

    /// Smallest primitive length present; used as the time spacing in tail
    /// bounds.
    pub fn min_primitive_length(&self) -> Option<f64> {
        self.orbits
            .iter()
            .map(|o| o.primitive_length)
            .min_by(f64::total_cmp)
    }

    /// Largest potential-per-unit-time over entries (0 for an empty
    /// catalog); the effective constant shifting the convergence abscissa.
    pub fn potential_rate(&self) -> f64 {
        self.orbits
            .iter()
            .map(|o| o.potential_integral / o.length)
            .fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(t: f64, tp: f64, mult: u64) -> PeriodicOrbit {
        PeriodicOrbit::new(t, tp, 0.0, t, mult).unwrap()
    }

    #[test]
    fn rejects_non_dividing_primitive_length() {
        assert!(PeriodicOrbit::new(3.0, 2.0, 0.0, 1.0, 1).is_err());
        assert!(PeriodicOrbit::new(4.0, 2.0, 0.0, 1.0, 1).is_ok());
    }

    #[test]
    fn normalize_sorts_and_merges() {
        let catalog = OrbitCatalog::new(
            "test",
            vec![orbit(2.0, 1.0, 1), orbit(1.0, 1.0, 1), orbit(2.0, 1.0, 3), orbit(2.0, 2.0, 1)],
            2.0,
            true,
            1.0,
        );
        assert_eq!(catalog.len(), 3);
        assert_eq!(catalog.orbits[0].length, 1.0);
        assert_eq!(catalog.orbits[1].multiplicity, 4);
        assert_eq!(catalog.orbits[2].primitive_length, 2.0);
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut catalog = OrbitCatalog::new(
            "test",
            vec![orbit(1.0, 1.0, 2), orbit(2.0, 1.0, 1), orbit(2.0, 2.0, 2)],
            2.0,
            true,
            1.0,
        );
        let before = catalog.orbits.clone();
        catalog.normalize();
        assert_eq!(before, catalog.orbits);
    }
}
