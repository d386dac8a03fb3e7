//! Orbits of the transposed map on the integer mode lattice.

use crate::orbits::HyperbolicToralMap;

use super::SpectraError;

/// One A^T-orbit of torus Fourier modes, truncated to a window around its
/// minimal-norm point.
#[derive(Debug, Clone)]
pub struct ModeOrbit {
    /// Minimal-norm representative (ties broken lexicographically).
    pub seed: [i64; 2],
    /// Half-width of the retained window: modes (A^T)^k seed for |k| <= K.
    pub window: usize,
    /// Squared norms |m_k|^2 for k = -window..=window.
    pub norms_sq: Vec<f64>,
}

impl ModeOrbit {
    /// Build the orbit window around a seed. Norms grow strictly beyond
    /// the minimal point by hyperbolicity; both facts are validated.
    pub fn around(map: &HyperbolicToralMap, seed: [i64; 2], window: usize) -> Result<Self, SpectraError> {
        if seed == [0, 0] {
            return Err(SpectraError::BadInput("seed mode must be nonzero".into()));
        }
        let modes = orbit_window(map, seed, window as i64)?;
        let norms_sq: Vec<f64> = modes.iter().map(|m| norm_sq_f(*m)).collect();
        let mid = window;
        for k in 0..modes.len() {
            for l in (k + 1)..modes.len() {
                if modes[k] == modes[l] {
                    return Err(SpectraError::BadInput(format!(
                        "orbit of {seed:?} revisits {:?}",
                        modes[k]
                    )));
                }
            }
            if k > mid && norms_sq[k] < norms_sq[k - 1] {
                return Err(SpectraError::BadInput(format!(
                    "norms not increasing beyond the minimal point for seed {seed:?}"
                )));
            }
        }
        Ok(Self { seed, window, norms_sq })
    }

    pub fn min_norm_sq(&self) -> f64 {
        self.norms_sq.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Squared norm at signed index k (|k| may exceed the stored window by
    /// recomputation).
    pub fn norm_sq_at(&self, map: &HyperbolicToralMap, k: i64) -> Result<f64, SpectraError> {
        if k.unsigned_abs() as usize <= self.window {
            Ok(self.norms_sq[(k + self.window as i64) as usize])
        } else {
            let m = apply_transpose_power(map, self.seed, k)?;
            Ok(norm_sq_f(m))
        }
    }
}

fn norm_sq_f(m: [i128; 2]) -> f64 {
    (m[0] * m[0] + m[1] * m[1]) as f64
}

fn apply_transpose(map: &HyperbolicToralMap, m: [i128; 2], inverse: bool) -> Option<[i128; 2]> {
    let [a, b, c, d] = map.entries().map(i128::from);
    let (p, q) = if inverse {
        // (A^T)^{-1} = (A^{-1})^T = [[d, -c], [-b, a]]
        (
            m[0].checked_mul(d)?.checked_sub(m[1].checked_mul(c)?)?,
            m[1].checked_mul(a)?.checked_sub(m[0].checked_mul(b)?)?,
        )
    } else {
        // A^T = [[a, c], [b, d]]
        (
            m[0].checked_mul(a)?.checked_add(m[1].checked_mul(c)?)?,
            m[0].checked_mul(b)?.checked_add(m[1].checked_mul(d)?)?,
        )
    };
    Some([p, q])
}

fn apply_transpose_power(
    map: &HyperbolicToralMap,
    seed: [i64; 2],
    k: i64,
) -> Result<[i128; 2], SpectraError> {
    let mut m = [seed[0] as i128, seed[1] as i128];
    for _ in 0..k.unsigned_abs() {
        m = apply_transpose(map, m, k < 0)
            .ok_or_else(|| SpectraError::BadInput(format!("mode overflow on orbit of {seed:?}")))?;
    }
    Ok(m)
}

fn orbit_window(
    map: &HyperbolicToralMap,
    seed: [i64; 2],
    window: i64,
) -> Result<Vec<[i128; 2]>, SpectraError> {
    (-window..=window)
        .map(|k| apply_transpose_power(map, seed, k))
        .collect()
}

/// One representative per A^T-orbit meeting {0 < |m| <= max_norm}: the
/// orbit's minimal-norm point, ties broken lexicographically. Found by
/// explicit iteration from every lattice point in the ball.
pub fn mode_orbits(
    map: &HyperbolicToralMap,
    max_norm: f64,
    window: usize,
) -> Result<Vec<ModeOrbit>, SpectraError> {
    let bound = max_norm.floor() as i64;
    let mut representatives: Vec<[i64; 2]> = Vec::new();
    for m0 in -bound..=bound {
        'point: for m1 in -bound..=bound {
            let m = [m0, m1];
            if m == [0, 0] || norm_sq_i(m) as f64 > max_norm * max_norm {
                continue;
            }
            let rep = minimal_point(map, m)?;
            if representatives.contains(&rep) {
                continue 'point;
            }
            representatives.push(rep);
        }
    }
    representatives.sort();
    representatives
        .into_iter()
        .map(|rep| ModeOrbit::around(map, rep, window))
        .collect()
}

fn norm_sq_i(m: [i64; 2]) -> i64 {
    m[0] * m[0] + m[1] * m[1]
}

/// Walk the orbit in both directions until norms exceed the current
/// minimum by the square of the expansion factor, which bounds how far a
/// smaller point could still hide.
fn minimal_point(map: &HyperbolicToralMap, start: [i64; 2]) -> Result<[i64; 2], SpectraError> {
    let lambda_sq = (2.0 * map.expansion_log()).exp();
    let mut best: [i128; 2] = [start[0] as i128, start[1] as i128];
    let mut best_norm = norm_sq_f(best);
    for inverse in [false, true] {
        let mut m = [start[0] as i128, start[1] as i128];
        let mut steps_past_min = 0;
        while steps_past_min < 4 {
            m = apply_transpose(map, m, inverse)
                .ok_or_else(|| SpectraError::BadInput("orbit overflow".into()))?;
            let n = norm_sq_f(m);
            if n < best_norm || (n == best_norm && [m[0], m[1]] < [best[0], best[1]]) {
                best = m;
                best_norm = n;
                steps_past_min = 0;
            } else if n > best_norm * lambda_sq {
                steps_past_min += 1;
            }
        }
    }
    Ok([best[0] as i64, best[1] as i64])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> HyperbolicToralMap {
        HyperbolicToralMap::new(2, 1, 1, 1).unwrap()
    }

    #[test]
    fn unit_modes_give_distinct_orbits() {
        // orbits of (1,0) and (0,1) are distinct, decided by iteration;
        // their negatives are distinct integer orbits too
        let orbits = mode_orbits(&cat(), 1.0, 3).unwrap();
        let seeds: Vec<[i64; 2]> = orbits.iter().map(|o| o.seed).collect();
        assert_eq!(seeds.len(), 4, "{seeds:?}");
        assert!(seeds.contains(&[1, 0]) || seeds.contains(&[0, 1]));
        // (1,0)'s orbit never meets (0,1)'s
        let w1 = orbit_window(&cat(), [1, 0], 6).unwrap();
        assert!(!w1.contains(&[0, 1]));
    }

    #[test]
    fn empty_ball_gives_no_orbits() {
        let orbits = mode_orbits(&cat(), 0.9, 2).unwrap();
        assert!(orbits.is_empty());
    }

    #[test]
    fn representative_is_orbit_minimum() {
        let orbits = mode_orbits(&cat(), 5.0, 6).unwrap();
        for orbit in &orbits {
            let mid = orbit.window;
            let seed_norm = orbit.norms_sq[mid];
            for (k, &n) in orbit.norms_sq.iter().enumerate() {
                assert!(
                    n >= seed_norm - 1e-9,
                    "orbit {:?}: norm at offset {} is {} < seed {}",
                    orbit.seed,
                    k as i64 - mid as i64,
                    n,
                    seed_norm
                );
            }
        }
    }

    #[test]
    fn every_ball_mode_lies_on_a_listed_orbit() {
        let max_norm = 4.0;
        let orbits = mode_orbits(&cat(), max_norm, 8).unwrap();
        let windows: Vec<Vec<[i128; 2]>> = orbits
            .iter()
            .map(|o| orbit_window(&cat(), o.seed, 8).unwrap())
            .collect();
        let bound = max_norm as i64;
        for m0 in -bound..=bound {
            for m1 in -bound..=bound {
                let m = [m0 as i128, m1 as i128];
                if m == [0, 0] || norm_sq_f(m) > max_norm * max_norm {
                    continue;
                }
                assert!(
                    windows.iter().any(|w| w.contains(&m)),
                    "mode {m:?} missing from all orbit windows"
                );
            }
        }
    }

    #[test]
    fn norms_grow_beyond_the_window_tail() {
        let orbit = ModeOrbit::around(&cat(), [1, 0], 5).unwrap();
        let far = orbit.norm_sq_at(&cat(), 7).unwrap();
        assert!(far > orbit.norms_sq[10]);
    }
}
