//! Zero location and counting for entire-function evaluators, order-of-growth
//! estimation, and the compactified spectral metric d_z.
//!
//! Evaluators implement [`LogAnalytic`]: they expose log f rather than f.
//! Truncated orbit sums routinely reach |log f| in the thousands inside the
//! boxes of interest, where f itself under- or overflows doubles; every
//! algorithm here (winding numbers, boundary guards, circle maxima) only
//! needs log f. Winding numbers are the boundary integral of f'/f evaluated
//! as accumulated increments of log f along the contour, with the imaginary
//! parts wrapped to (-pi, pi]; the real parts cancel around a closed loop,
//! so the result is integer by construction and the wrap is validated by
//! refinement. Newton polishing works on f = exp(log f), which is
//! well-scaled near a zero.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{golden_section_max, linear_fit};

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error("box is degenerate: [{re_min}, {re_max}] x [{im_min}, {im_max}]")]
    DegenerateBox { re_min: f64, re_max: f64, im_min: f64, im_max: f64 },
    #[error("|f| = {min_abs_log} (log) on the boundary is within the guard distance of a zero")]
    ZeroNearBoundary { min_abs_log: f64 },
    #[error("winding integral {value} is farther than 1e-3 from an integer")]
    NonIntegerWinding { value: f64 },
    #[error("subdivision exceeded depth {0} without isolating zeros")]
    MaxDepthExceeded(u32),
    #[error("Newton iteration failed to reach tolerance near {0}")]
    NewtonStalled(Complex64),
    #[error("fewer than two usable circles for the order fit")]
    UnderflowOnCircle,
    #[error("z = {0} belongs to one of the input sets")]
    ZInSet(Complex64),
    #[error("input sets must be nonempty")]
    EmptySet,
}

/// An analytic function presented through (a branch of) its logarithm.
///
/// Only increments of `log_eval` mod 2 pi i and its real part are consumed,
/// so any measurable branch works; expressions like orbit sums that compute
/// log f directly avoid both underflow and branch bookkeeping.
pub trait LogAnalytic: Sync {
    fn log_eval(&self, z: Complex64) -> Complex64;

    /// f itself; the default exponentiates `log_eval`, which is adequate
    /// near zeros where |f| is moderate.
    fn eval(&self, z: Complex64) -> Complex64 {
        self.log_eval(z).exp()
    }
}

/// Wrap a closure returning f(z); log is taken on the principal branch.
pub struct PlainFn<F>(pub F);

impl<F: Fn(Complex64) -> Complex64 + Sync> LogAnalytic for PlainFn<F> {
    fn log_eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z).ln()
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }
}

/// Wrap a closure returning log f(z).
pub struct LogFn<F>(pub F);

impl<F: Fn(Complex64) -> Complex64 + Sync> LogAnalytic for LogFn<F> {
    fn log_eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }
}

/// An axis-aligned search rectangle in the spectral plane.
#[derive(Debug, Clone, Copy)]
pub struct Box2 {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Box2 {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, ZeroError> {
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(ZeroError::DegenerateBox { re_min, re_max, im_min, im_max });
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diameter(&self) -> f64 {
        let dr = self.re_max - self.re_min;
        let di = self.im_max - self.im_min;
        (dr * dr + di * di).sqrt()
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// A located zero of the evaluator.
#[derive(Debug, Clone, Copy)]
pub struct Resonance {
    pub value: Complex64,
    pub multiplicity: u32,
    /// |f| at the located point.
    pub residual: f64,
}

/// Number of zeros inside the box, counted with multiplicity, by the
/// argument principle: (1/2 pi i) * contour integral of f'/f.
///
/// `quad_points` is the number of boundary samples per edge at the coarsest
/// level; sampling is doubled until the phase increments stabilize. Errors
/// when log |f| on the boundary dips under an absolute guard (a zero too
/// close to the contour) or when no stable integer emerges.
pub fn winding_number(
    f: &dyn LogAnalytic,
    rect: Box2,
    quad_points: usize,
) -> Result<i64, ZeroError> {
    let corners = rect.corners();
    let mut n = quad_points.max(8);
    let mut previous: Option<(f64, f64)> = None;
    for _ in 0..8 {
        let mut samples = Vec::with_capacity(4 * n);
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            for j in 0..n {
                let t = j as f64 / n as f64;
                samples.push(a + (b - a) * t);
            }
        }
        let logs: Vec<Complex64> = samples.iter().map(|&z| f.log_eval(z)).collect();
        let min_log_abs = logs.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
        // |f| <= e^{-30} on the contour means a zero within ~e^{-30}/|f'|
        if min_log_abs < -30.0 {
            return Err(ZeroError::ZeroNearBoundary { min_abs_log: min_log_abs });
        }
        let mut total = 0.0;
        let mut max_step = 0.0f64;
        for i in 0..logs.len() {
            let next = logs[(i + 1) % logs.len()];
            let step = wrap_angle(next.im - logs[i].im);
            max_step = max_step.max(step.abs());
            total += step;
        }
        let winding = total / (2.0 * std::f64::consts::PI);
        if let Some((prev_winding, prev_step)) = previous {
            if max_step < 0.5 * std::f64::consts::PI
                && prev_step < 0.5 * std::f64::consts::PI
                && (winding - prev_winding).abs() < 1e-6
            {
                if (winding - winding.round()).abs() > 1e-3 {
                    return Err(ZeroError::NonIntegerWinding { value: winding });
                }
                return Ok(winding.round() as i64);
            }
        }
        previous = Some((winding, max_step));
        n *= 2;
    }
    Err(ZeroError::NonIntegerWinding {
        value: previous.map(|(w, _)| w).unwrap_or(f64::NAN),
    })
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

/// Options for [`locate_zeros`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub quad_points: usize,
    pub max_depth: u32,
    /// Subdivision stops once boxes are this small; the terminal winding
    /// number becomes the multiplicity.
    pub min_diameter: f64,
    /// Boxes holding a single zero keep subdividing down to this size
    /// before Newton starts, so the initial guess is close.
    pub newton_start_diameter: f64,
    pub newton_max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            quad_points: 64,
            max_depth: 40,
            min_diameter: 1e-6,
            newton_start_diameter: 0.75,
            newton_max_iter: 60,
        }
    }
}

/// Find every zero of `f` in the box: recursive quadrisection guided by
/// winding numbers until each zero is isolated, then Newton polishing with a
/// numerical derivative. Returned zeros satisfy |f| <= tol and are sorted by
/// (re, im). A zero within the guard distance of the outer boundary is an
/// error; interior cut lines are jittered away from zeros automatically.
pub fn locate_zeros(
    f: &dyn LogAnalytic,
    rect: Box2,
    tol: f64,
    options: SearchOptions,
) -> Result<Vec<Resonance>, ZeroError> {
    let top = winding_number(f, rect, options.quad_points)?;
    let mut work = vec![(rect, top, 0u32)];
    let mut candidates = Vec::new();
    while let Some((rect, count, depth)) = work.pop() {
        if count == 0 {
            continue;
        }
        let small_enough = if count == 1 {
            rect.diameter() <= options.newton_start_diameter
        } else {
            rect.diameter() <= options.min_diameter
        };
        if small_enough {
            candidates.push(newton_polish(f, rect, tol, count as u32, options.newton_max_iter)?);
            continue;
        }
        if depth >= options.max_depth {
            return Err(ZeroError::MaxDepthExceeded(options.max_depth));
        }
        for sub in quadrisect(f, rect, count, options.quad_points)? {
            work.push((sub.0, sub.1, depth + 1));
        }
    }
    let mut zeros = reverify_candidates(f, candidates, tol, options)?;
    zeros.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(zeros)
}

/// Candidates within the cluster radius of each other describe one zero: a
/// cut line through a zero of even multiplicity can split its winding
/// between sibling boxes without tripping any non-integer check, leaving
/// two nearby points that each satisfy |f| <= tol. Merge such clusters,
/// take the multiplicity from a verification winding around the cluster,
/// and re-polish with the correct multiplicity.
fn reverify_candidates(
    f: &dyn LogAnalytic,
    candidates: Vec<Resonance>,
    tol: f64,
    options: SearchOptions,
) -> Result<Vec<Resonance>, ZeroError> {
    let cluster_radius = (1e3 * tol).max(tol.sqrt()).max(2.0 * options.min_diameter);
    let mut remaining = candidates;
    let mut zeros = Vec::new();
    while let Some(seed) = remaining.pop() {
        let mut cluster = vec![seed];
        let mut i = 0;
        while i < remaining.len() {
            if cluster
                .iter()
                .any(|c| (c.value - remaining[i].value).norm() <= cluster_radius)
            {
                cluster.push(remaining.swap_remove(i));
                i = 0;
            } else {
                i += 1;
            }
        }
        let center = cluster
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .unwrap()
            .value;
        let spread = cluster
            .iter()
            .map(|c| (c.value - center).norm())
            .fold(0.0, f64::max);
        // verification box; widen on boundary hits
        let mut radius = (2.0 * spread).max(1e3 * tol);
        let mut verified = None;
        for _ in 0..6 {
            let vbox = Box2 {
                re_min: center.re - radius,
                re_max: center.re + radius,
                im_min: center.im - radius,
                im_max: center.im + radius,
            };
            match winding_number(f, vbox, options.quad_points) {
                Ok(w) => {
                    verified = Some(w);
                    break;
                }
                Err(ZeroError::ZeroNearBoundary { .. }) => radius *= 1.9,
                Err(e) => return Err(e),
            }
        }
        let mult = match verified {
            Some(w) if w >= 1 => w as u32,
            _ => cluster.iter().map(|c| c.multiplicity).sum(),
        };
        let polish_box = Box2 {
            re_min: center.re - radius,
            re_max: center.re + radius,
            im_min: center.im - radius,
            im_max: center.im + radius,
        };
        let polished = newton_from(f, center, polish_box, tol, mult, options.newton_max_iter)?;
        zeros.push(polished);
    }
    Ok(zeros)
}

/// Split a box in four through jittered cut lines, retrying until every
/// sub-count is computable and the counts add up to the parent's.
fn quadrisect(
    f: &dyn LogAnalytic,
    rect: Box2,
    parent_count: i64,
    quad_points: usize,
) -> Result<Vec<(Box2, i64)>, ZeroError> {
    let fractions = [0.5, 0.53, 0.47, 0.585, 0.415, 0.635];
    let mut last_err = None;
    for &fr in &fractions {
        for &fi in &fractions {
            let rc = rect.re_min + fr * (rect.re_max - rect.re_min);
            let ic = rect.im_min + fi * (rect.im_max - rect.im_min);
            let quads = [
                Box2 { re_min: rect.re_min, re_max: rc, im_min: rect.im_min, im_max: ic },
                Box2 { re_min: rc, re_max: rect.re_max, im_min: rect.im_min, im_max: ic },
                Box2 { re_min: rect.re_min, re_max: rc, im_min: ic, im_max: rect.im_max },
                Box2 { re_min: rc, re_max: rect.re_max, im_min: ic, im_max: rect.im_max },
            ];
            let mut counted = Vec::with_capacity(4);
            let mut failed = None;
            for q in quads {
                match winding_number(f, q, quad_points) {
                    Ok(c) => counted.push((q, c)),
                    Err(e) => {
                        failed = Some(e);
                        break;
                    }
                }
            }
            match failed {
                None if counted.iter().map(|(_, c)| c).sum::<i64>() == parent_count => {
                    return Ok(counted);
                }
                None => {
                    last_err = Some(ZeroError::NonIntegerWinding {
                        value: counted.iter().map(|(_, c)| c).sum::<i64>() as f64,
                    });
                }
                Some(e) => last_err = Some(e),
            }
        }
    }
    Err(last_err.unwrap())
}

fn newton_polish(
    f: &dyn LogAnalytic,
    rect: Box2,
    tol: f64,
    multiplicity: u32,
    max_iter: usize,
) -> Result<Resonance, ZeroError> {
    newton_from(f, rect.center(), rect, tol, multiplicity, max_iter)
}

fn newton_from(
    f: &dyn LogAnalytic,
    start: Complex64,
    rect: Box2,
    tol: f64,
    multiplicity: u32,
    max_iter: usize,
) -> Result<Resonance, ZeroError> {
    let mut z = start;
    let slack = 2.0 * rect.diameter() + 1e-3;
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..max_iter {
        let fz = f.eval(z);
        let abs = fz.norm();
        if best.map_or(true, |(_, b)| abs < b) {
            best = Some((z, abs));
        }
        let h = 1e-6 * (1.0 + z.norm());
        let deriv = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        if deriv.norm() == 0.0 || !deriv.is_finite() {
            break;
        }
        let step = fz / deriv * multiplicity as f64;
        z -= step;
        if !rect.contains(z, slack) {
            break;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            let abs = f.eval(z).norm();
            if best.map_or(true, |(_, b)| abs < b) {
                best = Some((z, abs));
            }
            break;
        }
    }
    match best {
        Some((zb, ab)) if ab <= tol => Ok(Resonance { value: zb, multiplicity, residual: ab }),
        _ => Err(ZeroError::NewtonStalled(start)),
    }
}

/// Count resonances of modulus <= radius, with multiplicity.
pub fn counting_function(resonances: &[Resonance], radius: f64) -> u64 {
    resonances
        .iter()
        .filter(|r| r.value.norm() <= radius)
        .map(|r| r.multiplicity as u64)
        .sum()
}

/// Least-squares estimate of the order of growth
/// rho = limsup log log max_{|z|=R} |f| / log R.
#[derive(Debug, Clone)]
pub struct OrderFit {
    pub rho: f64,
    pub radii: Vec<f64>,
    pub log_log_max: Vec<f64>,
    pub r_squared: f64,
}

/// Estimate the order of `f` from circle maxima at the given radii.
///
/// Each circle is sampled at 512 angles; the discrete argmax is refined by
/// golden-section search. Circles where max |f| <= 1 (log-max <= 0) cannot
/// enter the log-log fit and are excluded; the fit errors if fewer than two
/// circles survive.
pub fn order_estimate(f: &dyn LogAnalytic, radii: &[f64]) -> Result<OrderFit, ZeroError> {
    let samples = 512usize;
    let maxima: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&radius| {
            let log_abs = |theta: f64| f.log_eval(Complex64::from_polar(radius, theta)).re;
            let mut best_k = 0;
            let mut best = f64::NEG_INFINITY;
            for k in 0..samples {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                let v = log_abs(theta);
                if v > best {
                    best = v;
                    best_k = k;
                }
            }
            let width = 2.0 * std::f64::consts::PI / samples as f64;
            let center = width * best_k as f64;
            let refined = golden_section_max(log_abs, center - width, center + width, 40);
            (radius, best.max(log_abs(refined)))
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut kept_radii = Vec::new();
    let mut kept_loglog = Vec::new();
    for (radius, log_max) in maxima {
        if log_max <= 0.0 {
            continue; // UnderflowOnCircle: excluded from the fit
        }
        xs.push(radius.ln());
        ys.push(log_max.ln());
        kept_radii.push(radius);
        kept_loglog.push(log_max.ln());
    }
    if xs.len() < 2 {
        return Err(ZeroError::UnderflowOnCircle);
    }
    let fit = linear_fit(&xs, &ys).ok_or(ZeroError::UnderflowOnCircle)?;
    Ok(OrderFit { rho: fit.slope, radii: kept_radii, log_log_max: kept_loglog, r_squared: fit.r_squared })
}

/// A point of the resonance plane compactified at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralPoint {
    Finite(Complex64),
    Infinity,
}

impl SpectralPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpectralPoint::Finite(Complex64::new(re, im))
    }
}

impl From<Complex64> for SpectralPoint {
    fn from(z: Complex64) -> Self {
        SpectralPoint::Finite(z)
    }
}

/// Hausdorff distance between two spectra under the metric
/// d_z(x, y) = |1/(z-x) - 1/(z-y)|, with infinity mapped to 0 in the
/// transformed plane.
pub fn hausdorff_dz(
    set_a: &[SpectralPoint],
    set_b: &[SpectralPoint],
    z: Complex64,
) -> Result<f64, ZeroError> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(ZeroError::EmptySet);
    }
    let transform = |p: &SpectralPoint| -> Result<Complex64, ZeroError> {
        match *p {
            SpectralPoint::Infinity => Ok(Complex64::ZERO),
            SpectralPoint::Finite(x) => {
                let d = z - x;
                if d.norm() < 1e-12 * (1.0 + z.norm()) {
                    Err(ZeroError::ZInSet(z))
                } else {
                    Ok(1.0 / d)
                }
            }
        }
    };
    let ta: Vec<Complex64> = set_a.iter().map(transform).collect::<Result<_, _>>()?;
    let tb: Vec<Complex64> = set_b.iter().map(transform).collect::<Result<_, _>>()?;
    let one_sided = |from: &[Complex64], to: &[Complex64]| -> f64 {
        from.iter()
            .map(|a| to.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(&ta, &tb).max(one_sided(&tb, &ta)))
}
