//! Orbit sums: the dynamical determinant, the Ruelle zeta function, trace
//! moments of the resolvent, and the regularized-determinant factorization.
//!
//! For a flow with generator P = X + V the dynamical determinant is
//!
//! ```text
//! zeta(z) = exp( - sum_orbits (T#/T) e^{int V} e^{-zT} / |det(I - P_orbit)| )
//! ```
//!
//! and the order-m trace moments are
//!
//! ```text
//! Tr (z - P)^{-m} = 1/(m-1)! sum_orbits T# e^{int V} T^{m-1} e^{-zT} / |det(I - P_orbit)|.
//! ```
//!
//! Zeros of `zeta` are the Ruelle-Pollicott resonances. With resonances in
//! hand, `zeta` factorizes through a regularized determinant of order m and
//! an explicit degree-(m-1) polynomial correction; both routes are
//! implemented here and checked against each other in the tests.
//!
//! All sums run in ascending orbit length with compensated accumulation, so
//! results are reproducible bit for bit.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::KahanComplex;
use crate::orbits::OrbitCatalog;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("anchor z = {0} coincides with a listed resonance")]
    AnchorIsResonance(Complex64),
    #[error("det order m = {m} must exceed n*s = {ns} (Schatten condition)")]
    DetOrderTooSmall { m: u32, ns: f64 },
    #[error("truncation radius must be positive, got {0}")]
    BadTruncationRadius(f64),
    #[error("orbit length {length} is not a multiple of the lattice spacing {spacing}")]
    NonLatticeLengths { length: f64, spacing: f64 },
}

/// A partial sum with a bound on the omitted tail.
///
/// `tail_bound` is finite only when the catalog is horizon-complete and the
/// evaluation point lies above the convergence abscissa; it is infinite
/// (the divergent-tail flag) otherwise. For the built-in suspension models
/// the bound is rigorous; for user catalogs it extrapolates from the
/// supplied entropy estimate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn is_convergent(&self) -> bool {
        self.tail_bound.is_finite()
    }
}

/// Value of Tr (z - P)^{-m} truncated to a catalog.
#[derive(Debug, Clone, Copy)]
pub struct TraceMoment {
    pub order: u32,
    pub at: Complex64,
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Shared orbit sum: sum over entries of
/// mult * T# * T^{t_power} * exp(int V - z T - log_det).
///
/// `t_power = -1` gives the log-zeta weight, `t_power = m - 1` the trace
/// weight of order m.
fn orbit_power_sum(catalog: &OrbitCatalog, z: Complex64, t_power: i32) -> Complex64 {
    let mut acc = KahanComplex::new();
    for orbit in &catalog.orbits {
        let t = orbit.length;
        let log_mag =
            orbit.potential_integral - z.re * t - orbit.log_det_factor + t.ln() * t_power as f64;
        let phase = -z.im * t;
        let magnitude = (orbit.multiplicity as f64) * orbit.primitive_length * log_mag.exp();
        acc.add(Complex64::from_polar(magnitude, phase));
    }
    acc.value()
}

/// Majorant tail: sum_{j >= 1} (H + j s)^{pow} e^{-a (H + j s)} / pow!,
/// summed numerically until terms vanish. Infinite when a <= 0.
fn tail_majorant(a: f64, horizon: f64, spacing: f64, pow: u32) -> f64 {
    if !(a > 0.0) || !(spacing > 0.0) {
        return f64::INFINITY;
    }
    let mut log_factorial = 0.0;
    for i in 1..=pow {
        log_factorial += (i as f64).ln();
    }
    let mut total = 0.0;
    for j in 1..=1_000_000u64 {
        let t = horizon + j as f64 * spacing;
        let log_term = pow as f64 * t.ln() - a * t - log_factorial;
        let term = log_term.exp();
        total += term;
        if term < 1e-300 || term < 1e-18 * total {
            // margin for the truncated remainder and accumulated rounding:
            // the majorant can otherwise coincide with the true tail exactly
            return total * (1.0 + 1e-9) + 1e-300;
        }
    }
    f64::INFINITY
}

/// Convergence-abscissa gap and spacing for a catalog at Re z. The sum of
/// per-unit-time orbit weights (with the determinant) is dominated by
/// e^{-(Re z - c) t} where c is the potential rate; without the determinant
/// an extra e^{h t} from the orbit count enters. `with_det` selects which.
fn tail_parameters(catalog: &OrbitCatalog, re_z: f64, with_det: bool) -> Option<(f64, f64)> {
    if !catalog.complete {
        return None;
    }
    let spacing = catalog.min_primitive_length().unwrap_or(1.0).min(1.0);
    let h = catalog.topological_entropy_estimate;
    let a = if with_det {
        re_z - catalog.potential_rate()
    } else {
        re_z - catalog.potential_rate() - h
    };
    Some((a, spacing))
}

/// log zeta(z) truncated to the catalog, with tail bound.
///
/// The weight of orbits beyond the horizon is majorized by a geometric-type
/// series in the entropy gap; when Re z sits below the abscissa the value
/// is still returned with an infinite tail bound.
pub fn log_zeta_direct(catalog: &OrbitCatalog, z: Complex64) -> SeriesValue {
    let value = -orbit_power_sum(catalog, z, -1);
    let tail_bound = match tail_parameters(catalog, z.re, true) {
        Some((a, s)) => tail_majorant(a, catalog.horizon_t, s, 0),
        None => f64::INFINITY,
    };
    SeriesValue { value, tail_bound }
}

/// log of the Ruelle zeta function: the orbit sum without the determinant
/// weight and without the potential.
pub fn log_ruelle_zeta_direct(catalog: &OrbitCatalog, z: Complex64) -> SeriesValue {
    let mut acc = KahanComplex::new();
    for orbit in &catalog.orbits {
        let t = orbit.length;
        let magnitude =
            (orbit.multiplicity as f64) * orbit.primitive_length / t * (-z.re * t).exp();
        acc.add(Complex64::from_polar(magnitude, -z.im * t));
    }
    let value = -acc.value();
    let tail_bound = match tail_parameters(catalog, z.re, false) {
        Some((a, s)) => tail_majorant(a, catalog.horizon_t, s, 0),
        None => f64::INFINITY,
    };
    SeriesValue { value, tail_bound }
}

/// Tr (z - P)^{-m} truncated to the catalog.
pub fn trace_moment(catalog: &OrbitCatalog, z: Complex64, m: u32) -> TraceMoment {
    assert!(m >= 1, "trace moment order must be at least 1");
    let mut inv_factorial = 1.0;
    for i in 1..m {
        inv_factorial /= i as f64;
    }
    let value = orbit_power_sum(catalog, z, m as i32 - 1) * inv_factorial;
    let tail_bound = match tail_parameters(catalog, z.re, true) {
        Some((a, s)) => tail_majorant(a, catalog.horizon_t, s, m - 1),
        None => f64::INFINITY,
    };
    TraceMoment { order: m, at: z, value, tail_bound }
}

/// Weierstrass primary factor E(w, m-1) = (1 - w) exp(sum_{l=1}^{m-1} w^l / l).
pub fn weierstrass_factor(w: Complex64, order: u32) -> Complex64 {
    (Complex64::ONE - w) * weierstrass_exp_sum(w, order).exp()
}

fn weierstrass_exp_sum(w: Complex64, order: u32) -> Complex64 {
    let mut sum = Complex64::ZERO;
    let mut pw = Complex64::ONE;
    for l in 1..=order {
        pw *= w;
        sum += pw / l as f64;
    }
    sum
}

/// log E(w, m-1) on the principal branch of log(1 - w); analytic for
/// |w| < 1 where it equals -sum_{l >= m} w^l / l.
pub fn log_weierstrass_factor(w: Complex64, order: u32) -> Complex64 {
    (Complex64::ONE - w).ln() + weierstrass_exp_sum(w, order)
}

/// The polynomial Q with deg <= m-1 such that
/// zeta(lambda) = det_m(I + (lambda - z)(z - P)^{-1}) exp(Q(lambda)).
///
/// Coefficients are in the (z - lambda) basis:
/// Q(lambda) = sum_{l=0}^{m-1} coeffs[l] (z - lambda)^l, and
/// coeffs[l] = -(orbit sum with T^{l-1} weight) / l!. The l = 0 coefficient
/// is log zeta(z) itself.
#[derive(Debug, Clone)]
pub struct CorrectionPolynomial {
    pub anchor: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl CorrectionPolynomial {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let d = self.anchor - lambda;
        let mut pw = Complex64::ONE;
        let mut acc = Complex64::ZERO;
        for &c in &self.coeffs {
            acc += c * pw;
            pw *= d;
        }
        acc
    }
}

/// Build the correction polynomial of the given order from a catalog.
pub fn correction_polynomial(catalog: &OrbitCatalog, z: Complex64, m: u32) -> CorrectionPolynomial {
    let mut coeffs = Vec::with_capacity(m as usize);
    let mut inv_factorial = 1.0;
    for l in 0..m {
        if l > 0 {
            inv_factorial /= l as f64;
        }
        coeffs.push(-orbit_power_sum(catalog, z, l as i32 - 1) * inv_factorial);
    }
    CorrectionPolynomial { anchor: z, coeffs }
}

/// Inputs for the regularized determinant of order m built from a resonance
/// list: det_m(I + (lambda - z)(z - P)^{-1}) = prod_k E((lambda-z)/(res_k-z), m-1).
#[derive(Debug, Clone)]
pub struct RegDetInput {
    pub resonances: Vec<(Complex64, u32)>,
    pub det_order: u32,
    pub anchor: Complex64,
    pub truncation_radius: f64,
}

impl RegDetInput {
    /// `ns` is dimension times Gevrey index; the Schatten condition requires
    /// det_order > ns (n = 3, s = 1 for the suspension models, so m >= 4).
    pub fn new(
        resonances: Vec<(Complex64, u32)>,
        det_order: u32,
        anchor: Complex64,
        truncation_radius: f64,
        ns: f64,
    ) -> Result<Self, ZetaError> {
        if (det_order as f64) <= ns {
            return Err(ZetaError::DetOrderTooSmall { m: det_order, ns });
        }
        if !(truncation_radius > 0.0) {
            return Err(ZetaError::BadTruncationRadius(truncation_radius));
        }
        let input = Self { resonances, det_order, anchor, truncation_radius };
        input.check_anchor()?;
        Ok(input)
    }

    fn check_anchor(&self) -> Result<(), ZetaError> {
        for &(res, _) in &self.resonances {
            if (res - self.anchor).norm() < 1e-12 * (1.0 + self.anchor.norm()) {
                return Err(ZetaError::AnchorIsResonance(self.anchor));
            }
        }
        Ok(())
    }

    /// Empirical density fit N(r) ~ C r^p over the listed resonances, used
    /// to estimate the contribution of resonances beyond the truncation
    /// radius. This is an estimate, not a rigorous bound: the counting law
    /// constant is not effective.
    fn tail_estimate(&self, lambda: Complex64) -> f64 {
        let mut radii: Vec<f64> = self
            .resonances
            .iter()
            .flat_map(|&(res, mult)| std::iter::repeat((res - self.anchor).norm()).take(mult as usize))
            .filter(|r| *r > 0.0)
            .collect();
        if radii.len() < 4 {
            return 0.0;
        }
        radii.sort_by(f64::total_cmp);
        let lo = radii[radii.len() / 2];
        let hi = radii[radii.len() - 1];
        if hi <= lo * 1.5 {
            return 0.0;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = radii
            .iter()
            .enumerate()
            .filter(|(_, r)| **r >= lo)
            .map(|(i, r)| (r.ln(), ((i + 1) as f64).ln()))
            .unzip();
        let Some(fit) = crate::numerics::linear_fit(&xs, &ys) else {
            return 0.0;
        };
        let p = fit.slope.max(0.5);
        let c = fit.intercept.exp();
        // sum over shells r = hi * (1 + k/8): dN ~ C p r^{p-1} dr,
        // each factor bounded by 2 |(lambda - z)/(r - |z - anchor|)|^m
        let m = self.det_order as f64;
        let w = (lambda - self.anchor).norm();
        let mut tail = 0.0;
        let mut r = hi.max(2.0 * w);
        let step = r / 8.0;
        for _ in 0..4000 {
            let dn = c * p * r.powf(p - 1.0) * step;
            let term = 2.0 * (w / (r - 0.5 * w)).powf(m) * dn;
            tail += term;
            if term < 1e-18 * tail.max(1e-300) {
                break;
            }
            r += step;
        }
        tail
    }
}

/// Evaluate det_m(I + (lambda - z)(z - P)^{-1}) over the listed resonances.
pub fn regularized_det(input: &RegDetInput, lambda: Complex64) -> Result<SeriesValue, ZetaError> {
    input.check_anchor()?;
    let log = log_regularized_det(input, lambda)?;
    Ok(SeriesValue { value: log.exp(), tail_bound: input.tail_estimate(lambda) })
}

/// log det_m as a sum of log Weierstrass factors (branch chosen factorwise).
pub fn log_regularized_det(input: &RegDetInput, lambda: Complex64) -> Result<Complex64, ZetaError> {
    input.check_anchor()?;
    let mut acc = KahanComplex::new();
    for &(res, mult) in &input.resonances {
        let w = (lambda - input.anchor) / (res - input.anchor);
        acc.add(log_weierstrass_factor(w, input.det_order - 1) * mult as f64);
    }
    Ok(acc.value())
}

/// Reconstruct zeta(lambda) from the factorization: det_m times exp(Q).
pub fn zeta_via_detm(
    input: &RegDetInput,
    correction: &CorrectionPolynomial,
    lambda: Complex64,
) -> Result<SeriesValue, ZetaError> {
    let det = regularized_det(input, lambda)?;
    let q = correction.eval(lambda);
    Ok(SeriesValue { value: det.value * q.exp(), tail_bound: det.tail_bound })
}

/// Exact dynamical determinant of the cat-map suspension with roof r and
/// constant potential c: zeta(z) = 1 - e^{-(z - c) r}, entire with zeros at
/// z = c + 2 pi i k / r.
pub fn closed_form_cat_zeta(z: Complex64, potential_const: f64, roof: f64) -> Complex64 {
    Complex64::ONE - (-(z - potential_const) * roof).exp()
}

/// The dynamical determinant expanded as a finite Dirichlet series
/// zeta(z) ~ sum_n coeff[n] e^{-z n s} (the cycle expansion of the orbit
/// sum, truncated at the catalog horizon).
///
/// Unlike exp(-truncated orbit sum), which vanishes nowhere, this
/// truncation is a genuine entire function whose zeros approximate the
/// resonances, so it is the right evaluator to hand to the zero finder.
/// Orbit lengths must sit on a lattice {s, 2s, ...}; the suspension models
/// satisfy this with s = roof.
#[derive(Debug, Clone)]
pub struct DeterminantSeries {
    pub spacing: f64,
    pub coeffs: Vec<f64>,
}

impl DeterminantSeries {
    /// Build from a catalog. Coefficients are produced by the exponential
    /// power-series recurrence n c_n = -sum_k (k b_k) c_{n-k} from the
    /// per-time log weights b_k; entries whose relative magnitude falls
    /// under `noise_floor` are zeroed, since they sit below the rounding
    /// noise of the recurrence and would otherwise be amplified
    /// exponentially at negative real parts.
    pub fn from_catalog(
        catalog: &OrbitCatalog,
        spacing: f64,
        noise_floor: f64,
    ) -> Result<Self, ZetaError> {
        assert!(spacing > 0.0);
        let k_max = (catalog.horizon_t / spacing).round() as usize;
        let mut log_weights = vec![0.0f64; k_max + 1];
        for orbit in &catalog.orbits {
            let ratio = orbit.length / spacing;
            let k = ratio.round();
            if (ratio - k).abs() > 1e-6 || k < 1.0 {
                return Err(ZetaError::NonLatticeLengths { length: orbit.length, spacing });
            }
            let k = k as usize;
            if k <= k_max {
                log_weights[k] += orbit.multiplicity as f64 * orbit.primitive_length / orbit.length
                    * (orbit.potential_integral - orbit.log_det_factor).exp();
            }
        }
        let mut coeffs = vec![0.0f64; k_max + 1];
        coeffs[0] = 1.0;
        for n in 1..=k_max {
            let mut acc = 0.0;
            for k in 1..=n {
                acc += k as f64 * log_weights[k] * coeffs[n - k];
            }
            coeffs[n] = -acc / n as f64;
        }
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for c in coeffs.iter_mut() {
            if c.abs() < noise_floor * scale {
                *c = 0.0;
            }
        }
        Ok(Self { spacing, coeffs })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let x = (-z * self.spacing).exp();
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl crate::zeros::LogAnalytic for DeterminantSeries {
    fn log_eval(&self, z: Complex64) -> Complex64 {
        self.eval(z).ln()
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        DeterminantSeries::eval(self, z)
    }
}

/// Spectral side of the trace formula for the roof-1 cat suspension:
/// sum_{|j| <= j_max} (z - 2 pi i j)^{-m}, plus a bound on the omitted tail
/// (2 sum_{j > j_max} (2 pi j - |z|)^{-m}, valid for m >= 2 and
/// 2 pi j_max > |z|).
pub fn spectral_moment_sum(z: Complex64, m: u32, j_max: u64) -> (Complex64, f64) {
    assert!(m >= 2, "spectral sum requires m >= 2");
    let mut acc = KahanComplex::new();
    acc.add(z.powi(-(m as i32)));
    for j in 1..=j_max {
        let omega = Complex64::new(0.0, 2.0 * std::f64::consts::PI * j as f64);
        acc.add((z - omega).powi(-(m as i32)));
        acc.add((z + omega).powi(-(m as i32)));
    }
    let mut tail = 0.0;
    let mut last_j = j_max;
    for j in (j_max + 1)..(j_max + 100_000) {
        let denom = 2.0 * std::f64::consts::PI * j as f64 - z.norm();
        if denom <= 0.0 {
            return (acc.value(), f64::INFINITY);
        }
        let term = 2.0 * denom.powi(-(m as i32));
        tail += term;
        last_j = j;
        if term < 1e-18 * tail.max(1e-300) {
            break;
        }
    }
    // integral remainder for everything past the summed range
    let denom = 2.0 * std::f64::consts::PI * last_j as f64 - z.norm();
    tail += denom.powi(1 - m as i32) / (std::f64::consts::PI * (m as f64 - 1.0));
    (acc.value(), tail * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{HyperbolicToralMap, OrbitCatalog, PeriodicOrbit, SuspensionModel};

    fn cat_catalog(horizon: f64, potential: f64) -> OrbitCatalog {
        SuspensionModel::new(HyperbolicToralMap::new(2, 1, 1, 1).unwrap(), 1.0, potential)
            .unwrap()
            .enumerate_orbits(horizon)
            .unwrap()
    }

    fn empty_catalog() -> OrbitCatalog {
        OrbitCatalog::new("empty", vec![], 10.0, true, 0.5)
    }

    #[test]
    fn log_zeta_matches_closed_form_at_real_point() {
        let catalog = cat_catalog(30.0, 0.0);
        let v = log_zeta_direct(&catalog, Complex64::new(2.0, 0.0));
        let expected = (1.0 - (-2.0f64).exp()).ln();
        assert!((v.value.re - expected).abs() < 1e-12, "{} vs {expected}", v.value.re);
        assert!(v.value.im.abs() < 1e-12);
        assert!(v.tail_bound.is_finite());
        // closed-form example value
        assert!((expected + 0.145413).abs() < 1e-6);
    }

    #[test]
    fn empty_catalog_gives_unit_zeta() {
        let v = log_zeta_direct(&empty_catalog(), Complex64::new(1.0, 1.0));
        assert_eq!(v.value, Complex64::ZERO);
        let r = log_ruelle_zeta_direct(&empty_catalog(), Complex64::new(1.0, 1.0));
        assert_eq!(r.value, Complex64::ZERO);
        let t = trace_moment(&empty_catalog(), Complex64::new(1.0, 0.0), 3);
        assert_eq!(t.value, Complex64::ZERO);
    }

    #[test]
    fn potential_shift_identity() {
        // log zeta_c(z) = log zeta_0(z - c), term by term
        let shifted = cat_catalog(20.0, 0.8);
        let plain = cat_catalog(20.0, 0.0);
        for &z in &[Complex64::new(3.0, 0.0), Complex64::new(2.5, 4.0), Complex64::new(4.0, -2.0)] {
            let a = log_zeta_direct(&shifted, z).value;
            let b = log_zeta_direct(&plain, z - 0.8).value;
            assert!((a - b).norm() < 1e-14 * (1.0 + a.norm()), "{a} vs {b}");
        }
    }

    #[test]
    fn divergent_tail_is_flagged_value_still_returned() {
        let catalog = cat_catalog(10.0, 0.0);
        let v = log_zeta_direct(&catalog, Complex64::new(-0.5, 0.0));
        assert!(!v.is_convergent());
        assert!(v.value.is_finite());
    }

    #[test]
    fn ruelle_zeta_single_primitive_orbit() {
        let catalog = OrbitCatalog::new(
            "one",
            vec![PeriodicOrbit::new(1.0, 1.0, 0.0, 2.0, 1).unwrap()],
            1.0,
            true,
            0.0,
        );
        let z = Complex64::new(1.5, 0.0);
        let v = log_ruelle_zeta_direct(&catalog, z);
        // single entry, determinant ignored: -e^{-z}
        assert!((v.value - -(-z).exp()).norm() < 1e-15);
    }

    #[test]
    fn ruelle_zeta_cauchy_stability() {
        // doubling the horizon moves the value by less than the tail bound
        let z = Complex64::new(3.0, 0.0);
        let v20 = log_ruelle_zeta_direct(&cat_catalog(20.0, 0.0), z);
        let v40 = log_ruelle_zeta_direct(&cat_catalog(40.0, 0.0), z);
        assert!(v20.tail_bound.is_finite());
        assert!((v40.value - v20.value).norm() <= v20.tail_bound);
    }

    #[test]
    fn tail_bounds_are_honest_for_zeta_and_traces() {
        // the ulp allowance covers rounding in the O(1) partial sums being
        // subtracted; the analytic tail itself is bounded by tail_bound
        for &z in &[Complex64::new(1.5, 0.0), Complex64::new(2.0, 7.0)] {
            let a = log_zeta_direct(&cat_catalog(15.0, 0.0), z);
            let b = log_zeta_direct(&cat_catalog(30.0, 0.0), z);
            let ulp = 1e-14 * (1.0 + a.value.norm());
            assert!((b.value - a.value).norm() <= a.tail_bound + ulp);
            for m in [1, 3, 4] {
                let ta = trace_moment(&cat_catalog(15.0, 0.0), z, m);
                let tb = trace_moment(&cat_catalog(30.0, 0.0), z, m);
                let ulp = 1e-14 * (1.0 + ta.value.norm());
                assert!(
                    (tb.value - ta.value).norm() <= ta.tail_bound + ulp,
                    "m={m}, z={z}: moved {} vs bound {}",
                    (tb.value - ta.value).norm(),
                    ta.tail_bound
                );
            }
        }
    }

    #[test]
    fn trace_moment_geometric_series() {
        // m = 1, z = 1: per-period weight is e^{-k}, so the sum is 1/(e-1)
        let catalog = cat_catalog(45.0, 0.0);
        let t = trace_moment(&catalog, Complex64::new(1.0, 0.0), 1);
        let expected = 1.0 / (1.0f64.exp() - 1.0);
        assert!((t.value.re - expected).abs() < 1e-12);
        assert!((expected - 0.581977).abs() < 1e-6);
    }

    #[test]
    fn trace_moment_fourth_order_partial_sum_oracle() {
        // independent partial-sum oracle: (1/3!) sum k^3 e^{-k}
        let mut oracle = 0.0f64;
        for k in 1..200u32 {
            oracle += (k as f64).powi(3) * (-(k as f64)).exp();
        }
        oracle /= 6.0;
        let t = trace_moment(&cat_catalog(44.0, 0.0), Complex64::new(1.0, 0.0), 4);
        assert!((t.value.re - oracle).abs() < 1e-12, "{} vs {oracle}", t.value.re);
    }

    #[test]
    fn derivative_of_log_zeta_is_first_trace_moment() {
        let catalog = cat_catalog(40.0, 0.0);
        for &z in &[Complex64::new(2.0, 0.0), Complex64::new(2.5, 3.0)] {
            let h = 1e-5;
            let plus = log_zeta_direct(&catalog, z + h).value;
            let minus = log_zeta_direct(&catalog, z - h).value;
            let fd = (plus - minus) / (2.0 * h);
            let tm = trace_moment(&catalog, z, 1);
            let tol = 1e-8f64.max(10.0 * tm.tail_bound);
            assert!((fd - tm.value).norm() < tol, "fd {fd} vs tm {}", tm.value);
        }
    }

    #[test]
    fn trace_spectral_duality() {
        // orbit side vs resonance side of Tr (z-P)^{-m} for the cat model
        let catalog = cat_catalog(44.0, 0.0);
        for m in [2u32, 3, 4] {
            let z = Complex64::new(1.0, 0.0);
            let orbit_side = trace_moment(&catalog, z, m);
            let (spec_side, spec_tail) = spectral_moment_sum(z, m, 800);
            let budget = orbit_side.tail_bound + spec_tail + 1e-10;
            assert!(
                (orbit_side.value - spec_side).norm() <= budget,
                "m={m}: {} vs {} (budget {budget})",
                orbit_side.value,
                spec_side
            );
        }
    }

    #[test]
    fn weierstrass_factor_basics() {
        assert_eq!(weierstrass_factor(Complex64::ZERO, 5), Complex64::ONE);
        assert_eq!(weierstrass_factor(Complex64::ONE, 3), Complex64::ZERO);
        // E(0.3, 3) = 0.7 exp(0.3 + 0.045 + 0.009)
        let e = weierstrass_factor(Complex64::new(0.3, 0.0), 3);
        let direct = 0.7 * (0.3f64 + 0.045 + 0.009).exp();
        assert!((e.re - direct).abs() < 1e-15);
        assert!((e.re - 0.9973286305359218).abs() < 1e-12);
        let log_e = log_weierstrass_factor(Complex64::new(0.3, 0.0), 3);
        assert!(log_e.norm() <= 2.0 * 0.3f64.powi(4));
    }

    #[test]
    fn weierstrass_log_bound_on_half_disk() {
        // |log E(w, m-1)| <= 2 |w|^m for |w| <= 1/2, deterministic sampling
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for m in 2u32..=6 {
            for _ in 0..2000 {
                let r = 0.5 * next().sqrt();
                let phi = 2.0 * std::f64::consts::PI * next();
                let w = Complex64::from_polar(r, phi);
                let bound = 2.0 * w.norm().powi(m as i32);
                let val = log_weierstrass_factor(w, m - 1).norm();
                assert!(val <= bound * (1.0 + 1e-12) + 1e-300, "m={m}, w={w}: {val} > {bound}");
            }
        }
    }

    #[test]
    fn correction_polynomial_constant_term_is_log_zeta() {
        let catalog = cat_catalog(12.0, 0.0);
        let z = Complex64::new(10.0, 0.0);
        let q = correction_polynomial(&catalog, z, 4);
        let lz = log_zeta_direct(&catalog, z).value;
        assert!((q.coeffs[0] - lz).norm() < 1e-18);
        // l = 0 coefficient example: log(1 - e^{-10})
        assert!((q.coeffs[0].re - (1.0 - (-10.0f64).exp()).ln()).abs() < 1e-15);
        assert!((q.coeffs[0].re + 4.54e-5).abs() < 1e-7);
        // empty catalog: all coefficients zero
        let q0 = correction_polynomial(&empty_catalog(), z, 4);
        assert!(q0.coeffs.iter().all(|c| *c == Complex64::ZERO));
    }

    #[test]
    fn regularized_det_trivial_cases() {
        let empty = RegDetInput::new(vec![], 4, Complex64::new(10.0, 0.0), 100.0, 3.0).unwrap();
        let d = regularized_det(&empty, Complex64::new(1.0, 2.0)).unwrap();
        assert_eq!(d.value, Complex64::ONE);
        // lambda = anchor: every factor is E(0, .) = 1
        let input = RegDetInput::new(
            vec![(Complex64::new(0.0, 6.0), 1), (Complex64::new(0.0, -6.0), 1)],
            4,
            Complex64::new(10.0, 0.0),
            100.0,
            3.0,
        )
        .unwrap();
        let d = regularized_det(&input, Complex64::new(10.0, 0.0)).unwrap();
        assert!((d.value - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn anchor_on_resonance_is_rejected() {
        let err = RegDetInput::new(
            vec![(Complex64::new(10.0, 0.0), 1)],
            4,
            Complex64::new(10.0, 0.0),
            100.0,
            3.0,
        )
        .unwrap_err();
        assert!(matches!(err, ZetaError::AnchorIsResonance(_)));
    }

    #[test]
    fn factorization_reconstructs_closed_form() {
        // resonances of the roof-1 cat suspension: 2 pi i k
        let resonances: Vec<(Complex64, u32)> = (-200i64..=200)
            .map(|k| (Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64), 1))
            .collect();
        let z = Complex64::new(10.0, 0.0);
        let input = RegDetInput::new(resonances, 4, z, 1300.0, 3.0).unwrap();
        let q = correction_polynomial(&cat_catalog(12.0, 0.0), z, 4);
        for &lambda in &[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 3.0),
            Complex64::new(-0.5, 6.0),
        ] {
            let rec = zeta_via_detm(&input, &q, lambda).unwrap();
            let exact = closed_form_cat_zeta(lambda, 0.0, 1.0);
            assert!(
                (rec.value - exact).norm() < 1e-4,
                "lambda={lambda}: {} vs {exact}",
                rec.value
            );
        }
    }

    #[test]
    fn determinant_series_of_cat_model_is_exact() {
        // the cycle expansion telescopes: 1 - e^{-z} with every higher
        // coefficient cancelling to rounding noise
        let series =
            DeterminantSeries::from_catalog(&cat_catalog(40.0, 0.0), 1.0, 1e-12).unwrap();
        assert_eq!(series.coeffs.len(), 41);
        assert_eq!(series.coeffs[0], 1.0);
        assert!((series.coeffs[1] + 1.0).abs() < 1e-14);
        for (n, &c) in series.coeffs.iter().enumerate().skip(2) {
            assert_eq!(c, 0.0, "coefficient {n} survived thresholding: {c}");
        }
        for &z in &[Complex64::new(2.0, 1.0), Complex64::new(-1.0, 13.0), Complex64::new(0.3, -5.0)] {
            let direct = closed_form_cat_zeta(z, 0.0, 1.0);
            assert!((series.eval(z) - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn determinant_series_rejects_non_lattice_lengths() {
        let catalog = OrbitCatalog::new(
            "odd",
            vec![PeriodicOrbit::new(1.37, 1.37, 0.0, 1.0, 1).unwrap()],
            2.0,
            true,
            1.0,
        );
        assert!(matches!(
            DeterminantSeries::from_catalog(&catalog, 1.0, 1e-12),
            Err(ZetaError::NonLatticeLengths { .. })
        ));
    }

    #[test]
    fn closed_form_zeros_and_values() {
        assert_eq!(closed_form_cat_zeta(Complex64::ZERO, 0.0, 1.0), Complex64::ZERO);
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        assert!(closed_form_cat_zeta(two_pi_i, 0.0, 1.0).norm() < 1e-15);
        let v = closed_form_cat_zeta(Complex64::new(2.0, 0.0), 0.0, 1.0);
        assert!((v.re - 0.864665).abs() < 1e-6);
        // roof scaling: zeros at 2 pi i k / r
        assert!(closed_form_cat_zeta(two_pi_i / 2.0, 0.0, 2.0).norm() < 1e-15);
    }
}
