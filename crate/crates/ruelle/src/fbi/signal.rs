//! Test signals: Gevrey mode sums, smooth windows, inserted singularities.

use num_complex::Complex64;

use super::FbiError;

/// Anything the transform can integrate: a compactly supported signal with
/// a bandwidth estimate for quadrature planning.
pub trait Signal1D: Sync {
    fn eval(&self, x: f64) -> Complex64;
    /// Support interval (the signal vanishes outside).
    fn support(&self) -> (f64, f64);
    /// Rough largest frequency present; quadrature densities scale with it.
    fn max_frequency(&self) -> f64;
    /// Lattice anchor for signals with a distinguished point (a jump must
    /// land exactly on a quadrature node).
    fn anchor(&self) -> Option<f64> {
        None
    }
    /// Intervals where the signal is stiff (window ramps): quadrature
    /// accuracy floors are relaxed for points within kernel reach of these.
    fn stiff_regions(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    /// Relative quadrature tolerance the signal class can support; signals
    /// with genuine singularities limit the trapezoid convergence order and
    /// settle for detection-grade accuracy.
    fn quadrature_rel_tol(&self) -> f64 {
        1e-9
    }
    /// Points per oscillation period of the kernel phase; jump integrands
    /// need heavy oversampling since their error is set by (dx * phase')^2
    /// rather than by smooth-function superconvergence.
    fn oscillation_oversample(&self) -> f64 {
        6.0
    }
}

/// A smooth compactly supported window: 1 on [-plateau, plateau], 0 outside
/// [-(plateau+ramp), plateau+ramp], with Gevrey-regular ramps.
///
/// The ramp profile is exp(-t^(-a)) glue with a = 1/(order - 1); its own
/// Fourier decay is exp(-c |xi|^(1/order)), so the window order is chosen
/// strictly above the signal index under test to keep window regularity
/// from limiting the measured decay.
#[derive(Debug, Clone, Copy)]
pub struct WindowSpec {
    pub plateau_half_width: f64,
    pub ramp_width: f64,
    /// Gevrey order of the ramps (3 covers signal indices s <= 2; 5 is
    /// used for s = 3 tests).
    pub order: f64,
}

impl WindowSpec {
    pub fn for_index(s: f64) -> Self {
        Self {
            plateau_half_width: 2.0 * std::f64::consts::PI,
            ramp_width: std::f64::consts::PI,
            order: if s <= 2.0 { 3.0 } else { 5.0 },
        }
    }

    pub fn outer_half_width(&self) -> f64 {
        self.plateau_half_width + self.ramp_width
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = x.abs();
        if a <= self.plateau_half_width {
            1.0
        } else if a >= self.outer_half_width() {
            0.0
        } else {
            gevrey_step((self.outer_half_width() - a) / self.ramp_width, self.order)
        }
    }

    /// The two ramp intervals.
    pub fn ramps(&self) -> Vec<(f64, f64)> {
        vec![
            (-self.outer_half_width(), -self.plateau_half_width),
            (self.plateau_half_width, self.outer_half_width()),
        ]
    }

    /// Effective bandwidth of the ramp profile: exp(-t^{-a}) varies on the
    /// scale t^{1+a}/a, so resolving it down to e^{-k} needs frequencies up
    /// to a k^{1 + 1/a} / ramp_width. Resolution target k = 14; high-order
    /// ramps are capped (their sub-floor structure is unresolvable and the
    /// quadrature floor accounts for it).
    pub fn foot_frequency(&self) -> f64 {
        let a = 1.0 / (self.order - 1.0);
        (a * 14f64.powf(1.0 + 1.0 / a)).min(4000.0) / self.ramp_width
    }
}

/// Monotone Gevrey-order step: 0 at t <= 0, 1 at t >= 1.
fn gevrey_step(t: f64, order: f64) -> f64 {
    let a = 1.0 / (order - 1.0);
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-t.powf(-a)).exp() };
    let gt = g(t);
    let gc = g(1.0 - t);
    if gt == 0.0 {
        0.0
    } else if gc == 0.0 {
        1.0
    } else {
        gt / (gt + gc)
    }
}

/// A 2 pi periodic mode sum with prescribed coefficient decay, multiplied
/// by a smooth window to live on the line.
#[derive(Debug, Clone)]
pub struct GevreySignal {
    pub s: f64,
    pub c: f64,
    /// Coefficients for modes -L..=L, index l + L.
    pub modes: Vec<Complex64>,
    pub window: WindowSpec,
}

impl GevreySignal {
    /// Coefficients exp(-c |l|^{1/s}) with deterministic unit phases.
    pub fn with_decay(s: f64, c: f64, l_max: usize) -> Result<Self, FbiError> {
        if !(s >= 1.0) || !(c > 0.0) {
            return Err(FbiError::BadInput(format!(
                "need s >= 1 and c > 0, got s = {s}, c = {c}"
            )));
        }
        let modes = (-(l_max as i64)..=l_max as i64)
            .map(|l| Complex64::new((-c * (l.abs() as f64).powf(1.0 / s)).exp(), 0.0))
            .collect();
        Ok(Self { s, c, modes, window: WindowSpec::for_index(s) })
    }

    pub fn l_max(&self) -> usize {
        self.modes.len() / 2
    }

    /// The periodic mode sum, without the window.
    pub fn periodic_part(&self, x: f64) -> Complex64 {
        let l_max = self.l_max() as i64;
        let rot = Complex64::from_polar(1.0, x);
        // e^{i l x} by recurrence from l = -L upward
        let mut phase = Complex64::from_polar(1.0, -(l_max as f64) * x);
        let mut acc = Complex64::ZERO;
        for a in &self.modes {
            acc += a * phase;
            phase *= rot;
        }
        acc
    }
}

impl Signal1D for GevreySignal {
    fn eval(&self, x: f64) -> Complex64 {
        let w = self.window.value(x);
        if w == 0.0 {
            Complex64::ZERO
        } else {
            self.periodic_part(x) * w
        }
    }

    fn support(&self) -> (f64, f64) {
        let o = self.window.outer_half_width();
        (-o, o)
    }

    fn max_frequency(&self) -> f64 {
        self.l_max() as f64 + self.window.foot_frequency()
    }

    fn stiff_regions(&self) -> Vec<(f64, f64)> {
        self.window.ramps()
    }
}

/// A known singularity inserted into a smooth background.
#[derive(Debug, Clone, Copy)]
pub enum Singularity {
    /// Unit jump at the point (value H(x - at), windowed).
    Jump { at: f64, height: f64 },
    /// |x - at| kink.
    Kink { at: f64, strength: f64 },
}

/// Smooth Gevrey background plus inserted singular terms.
#[derive(Debug, Clone)]
pub struct SingularSignal {
    pub base: GevreySignal,
    pub singularities: Vec<Singularity>,
}

impl SingularSignal {
    pub fn new(base: GevreySignal, singularity: Singularity) -> Self {
        Self { base, singularities: vec![singularity] }
    }
}

impl Singularity {
    fn at(&self) -> f64 {
        match *self {
            Singularity::Jump { at, .. } | Singularity::Kink { at, .. } => at,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match *self {
            Singularity::Jump { at, height } => {
                // midpoint convention at the jump keeps a node-aligned
                // trapezoid second-order accurate; the comparison carries a
                // snap tolerance so the anchor lattice node takes the
                // midpoint value despite rounding in its position
                let snap = 1e-12 * (1.0 + at.abs());
                let h = if x > at + snap {
                    1.0
                } else if x < at - snap {
                    0.0
                } else {
                    0.5
                };
                height * h
            }
            Singularity::Kink { at, strength } => strength * (x - at).abs(),
        }
    }
}

impl Signal1D for SingularSignal {
    fn eval(&self, x: f64) -> Complex64 {
        let w = self.base.window.value(x);
        if w == 0.0 {
            return Complex64::ZERO;
        }
        let singular: f64 = self.singularities.iter().map(|s| s.eval(x)).sum();
        (self.base.periodic_part(x) + singular) * w
    }

    fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn max_frequency(&self) -> f64 {
        self.base.max_frequency()
    }

    fn stiff_regions(&self) -> Vec<(f64, f64)> {
        self.base.window.ramps()
    }

    fn quadrature_rel_tol(&self) -> f64 {
        // only the first singular point can sit on the quadrature lattice;
        // further ones limit the trapezoid to first order between strides
        if self.singularities.len() <= 1 {
            1e-4
        } else {
            1e-2
        }
    }

    fn oscillation_oversample(&self) -> f64 {
        96.0
    }

    fn anchor(&self) -> Option<f64> {
        self.singularities.first().map(|s| s.at())
    }
}

/// A signal pre-evaluated on a uniform lattice, shared by every quadrature
/// point of a transform; refinement levels subsample by strides.
#[derive(Debug, Clone)]
pub struct SampledSignal {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
    pub max_abs: f64,
    /// Lattice index of the signal's anchor point; strided quadratures
    /// align their windows to this residue class so a jump node is hit at
    /// every refinement level.
    pub anchor_index: usize,
}

impl SampledSignal {
    pub fn build(signal: &dyn Signal1D, density_per_unit: f64) -> Self {
        let (lo, hi) = signal.support();
        let dx = 1.0 / density_per_unit;
        // anchor the lattice on the singular point when there is one
        let anchor = signal.anchor().unwrap_or(lo);
        let first = anchor - ((anchor - lo) / dx).ceil() * dx;
        let count = ((hi - first) / dx).ceil() as usize + 1;
        let values: Vec<Complex64> = {
            use rayon::prelude::*;
            (0..count)
                .into_par_iter()
                .map(|i| signal.eval(first + i as f64 * dx))
                .collect()
        };
        let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let anchor_index = ((anchor - first) / dx).round() as usize;
        Self { x0: first, dx, values, max_abs, anchor_index }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn position(&self, index: usize) -> f64 {
        self.x0 + index as f64 * self.dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values_match_formula() {
        let sig = GevreySignal::with_decay(1.0, 1.0, 8).unwrap();
        let a3 = sig.modes[8 + 3].re;
        assert!((a3 - (-3.0f64).exp()).abs() < 1e-15);
        assert!((a3 - 0.049787).abs() < 1e-6);
        let sig2 = GevreySignal::with_decay(2.0, 1.0, 8).unwrap();
        let a4 = sig2.modes[8 + 4].re;
        assert!((a4 - (-2.0f64).exp()).abs() < 1e-15);
        assert!((a4 - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn zero_mode_cap_gives_constant() {
        let sig = GevreySignal::with_decay(1.0, 1.0, 0).unwrap();
        assert_eq!(sig.modes.len(), 1);
        let v1 = sig.periodic_part(0.3);
        let v2 = sig.periodic_part(-1.2);
        assert!((v1 - v2).norm() < 1e-15);
    }

    #[test]
    fn window_is_a_partition_step() {
        let w = WindowSpec::for_index(1.0);
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(w.plateau_half_width * 0.99), 1.0);
        assert_eq!(w.value(w.outer_half_width() + 0.01), 0.0);
        let mid = w.value(w.plateau_half_width + 0.5 * w.ramp_width);
        assert!(mid > 0.0 && mid < 1.0);
        // monotone on the ramp
        let mut last = 1.0;
        for i in 0..50 {
            let x = w.plateau_half_width + w.ramp_width * i as f64 / 49.0;
            let v = w.value(x);
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn signal_is_periodic_on_plateau() {
        let sig = GevreySignal::with_decay(1.5, 0.8, 16).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let a = sig.eval(0.4);
        let b = sig.eval(0.4 - two_pi);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn sampled_lattice_hits_anchor() {
        let base = GevreySignal::with_decay(1.0, 1.0, 4).unwrap();
        let sig = SingularSignal::new(base, Singularity::Jump { at: 0.3, height: 1.0 });
        let sampled = SampledSignal::build(&sig, 64.0);
        let idx = ((0.3 - sampled.x0) / sampled.dx).round() as usize;
        assert!((sampled.position(idx) - 0.3).abs() < 1e-12);
    }
}
