//! Small numerical utilities shared across the crate: compensated sums,
//! smooth blends, least-squares fits, and deterministic low-discrepancy
//! sequences.

use num_complex::Complex64;

/// Kahan-compensated accumulator for complex sums.
///
/// Orbit sums are accumulated in a fixed (ascending-length) order so that
/// results are bit-reproducible across runs and thread counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    sum: Complex64,
    comp: Complex64,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Quintic smoothstep: 0 below 0, 1 above 1, C^2 across the junctions.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

/// Derivative of [`smoothstep`].
pub fn smoothstep_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

/// Ordinary least squares y = slope * x + intercept, with r^2.
///
/// Returns `None` when fewer than two points are supplied or the x-values
/// are degenerate.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LinearFit { slope, intercept, r_squared })
}

#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Golden-section refinement of a local maximum of `f` on [a, b].
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Halton low-discrepancy sequence in the given prime base, index >= 0.
pub fn halton(index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index + 1;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// log(e^x + e^{-x} - 2) evaluated without overflow for large x > 0.
///
/// This is the log of |det(I - P)| for a symplectic linearized return map
/// with eigenvalues e^{x}, e^{-x}.
pub fn log_cosh_det(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // e^x + e^{-x} - 2 = e^x (1 + e^{-2x} - 2 e^{-x})
    x + ((-2.0 * x).exp() - 2.0 * (-x).exp()).ln_1p()
}

/// log(4 sinh^2(x/2)) evaluated stably for x > 0.
pub fn log_four_sinh_sq_half(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // 2 log(2 sinh(x/2)) = 2 (x/2 + log(1 - e^{-x}))
    x + 2.0 * (-(-x).exp()).ln_1p()
}

/// arccosh(t) for t > 1 via the log form, stable near 1.
pub fn acosh_stable(t: f64) -> f64 {
    debug_assert!(t > 1.0);
    // log(t + sqrt(t^2 - 1)); use sqrt((t-1)(t+1)) to keep accuracy near 1
    let s = ((t - 1.0) * (t + 1.0)).sqrt();
    (t + s).ln()
}
