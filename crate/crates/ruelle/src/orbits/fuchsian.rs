//! Geodesic orbit data for a hyperbolic surface presented by SL(2, R)
//! generators.
//!
//! Closed geodesics correspond to conjugacy classes of hyperbolic group
//! elements. Classes are identified combinatorially: reduced words up to a
//! word-length cap, cyclically reduced, keyed by the lexicographically
//! minimal rotation. Proper powers are recognized from the word structure
//! and folded into repetitions of the primitive class. Inverse words stay
//! distinct (oriented geodesics); entries sharing all invariants aggregate
//! by multiplicity at the catalog level.
//!
//! Enumeration by word length cannot certify completeness up to a time
//! horizon, so the resulting catalogs carry `complete = false` and
//! downstream consumers treat them as lower-truncated series.

use std::collections::HashSet;

use super::{OrbitCatalog, OrbitError, PeriodicOrbit};
use crate::numerics::{acosh_stable, log_four_sinh_sq_half};

/// Traces closer to 2 than this are treated as numerically parabolic and
/// skipped.
const PARABOLIC_GUARD: f64 = 1e-9;

type Mat2 = [f64; 4];

#[derive(Debug, Clone)]
pub struct FuchsianModel {
    generators: Vec<Mat2>,
    pub max_word_len: usize,
    pub orientation_note: String,
}

impl FuchsianModel {
    /// Validates determinants (|det - 1| <= 1e-12) and non-emptiness. The
    /// discreteness and cocompactness of the generated group are the
    /// caller's responsibility.
    pub fn new(generators: Vec<Mat2>, max_word_len: usize) -> Result<Self, OrbitError> {
        if generators.is_empty() {
            return Err(OrbitError::EmptyGeneratorList);
        }
        for (index, g) in generators.iter().enumerate() {
            let det = g[0] * g[3] - g[1] * g[2];
            if (det - 1.0).abs() > 1e-12 {
                return Err(OrbitError::NonUnimodularGenerator { index, det });
            }
        }
        Ok(Self {
            generators,
            max_word_len,
            orientation_note: "inverse words are distinct oriented geodesics".into(),
        })
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn model_id(&self) -> String {
        format!(
            "fuchsian[g={},maxlen={}]",
            self.generators.len(),
            self.max_word_len
        )
    }

    /// Matrix of a word; symbols are 1-based generator indices, negative for
    /// inverses.
    fn word_matrix(&self, word: &[i32]) -> Mat2 {
        let mut m = [1.0, 0.0, 0.0, 1.0];
        for &s in word {
            let g = if s > 0 {
                self.generators[(s - 1) as usize]
            } else {
                invert(self.generators[(-s - 1) as usize])
            };
            m = mat_mul(m, g);
        }
        m
    }

    /// Enumerate closed geodesics as repetitions of primitive conjugacy
    /// classes found within the word-length cap.
    pub fn enumerate_orbits(&self, horizon: f64) -> Result<OrbitCatalog, OrbitError> {
        assert!(horizon > 0.0, "horizon must be positive");
        let mut seen = HashSet::new();
        let mut orbits = Vec::new();
        let mut stack: Vec<Vec<i32>> = symbols(self.generators.len()).map(|s| vec![s]).collect();
        while let Some(word) = stack.pop() {
            if word.len() < self.max_word_len {
                for s in symbols(self.generators.len()) {
                    if s != -word[word.len() - 1] {
                        let mut next = word.clone();
                        next.push(s);
                        stack.push(next);
                    }
                }
            }
            let reduced = cyclic_reduce(&word);
            if reduced.is_empty() {
                continue;
            }
            // primitive classes only; powers reappear as repetitions below
            if word_period(&reduced) != reduced.len() {
                continue;
            }
            if !seen.insert(canonical_rotation(&reduced)) {
                continue;
            }
            let m = self.word_matrix(&reduced);
            let half_trace = (m[0] + m[3]).abs() / 2.0;
            if half_trace - 1.0 < PARABOLIC_GUARD / 2.0 {
                continue; // elliptic or numerically parabolic class
            }
            let ell = 2.0 * acosh_stable(half_trace);
            let mut j = 1u64;
            while j as f64 * ell <= horizon {
                let t = j as f64 * ell;
                orbits.push(PeriodicOrbit::new(
                    t,
                    ell,
                    0.0,
                    log_four_sinh_sq_half(t),
                    1,
                )?);
                j += 1;
            }
        }
        Ok(OrbitCatalog::new(
            self.model_id(),
            orbits,
            horizon,
            false,
            1.0, // geodesic flow in curvature -1
        ))
    }
}

fn symbols(n_gen: usize) -> impl Iterator<Item = i32> {
    (1..=n_gen as i32).chain((1..=n_gen as i32).map(|s| -s))
}

fn invert(m: Mat2) -> Mat2 {
    [m[3], -m[1], -m[2], m[0]]
}

fn mat_mul(p: Mat2, q: Mat2) -> Mat2 {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

/// Strip matching inverse symbols from the ends until the word is cyclically
/// reduced.
fn cyclic_reduce(word: &[i32]) -> Vec<i32> {
    let mut w = word.to_vec();
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.remove(0);
        w.pop();
    }
    w
}

/// Smallest p dividing len(w) with w equal to its rotation by p.
fn word_period(word: &[i32]) -> usize {
    let n = word.len();
    for p in 1..=n {
        if n % p == 0 && (0..n).all(|i| word[i] == word[(i + p) % n]) {
            return p;
        }
    }
    n
}

/// Lexicographically minimal rotation, the canonical conjugacy-class key.
fn canonical_rotation(word: &[i32]) -> Vec<i32> {
    let n = word.len();
    (0..n)
        .map(|r| {
            let mut rot = Vec::with_capacity(n);
            rot.extend_from_slice(&word[r..]);
            rot.extend_from_slice(&word[..r]);
            rot
        })
        .min()
        .unwrap_or_default()
}
