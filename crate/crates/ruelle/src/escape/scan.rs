//! Deterministic property scan for the escape function.
//!
//! Samples cotangent points with low-discrepancy directions and log-spaced
//! radii and verifies, outside the configured cone neighborhoods, that
//! (i) G0 <= -c <|alpha|>^delta away from the contracting codirection and
//! (ii) the flow derivative of G0 <= -c <|alpha|>^delta away from the flow
//! codirection. The fitted c is the first-percentile margin, so a passing
//! scan certifies strictly negative ellipticity with an explicit constant.

use rayon::prelude::*;

use crate::numerics::halton;
use crate::orbits::HyperbolicToralMap;

use super::flow::{AdaptedComponents, CotangentSample};
use super::g0::{bracket_along_flow, EscapeFunction};
use super::splitting::SplittingData;
use super::{EscapeError, EscapeParams};

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub sample_count: usize,
    /// Lower bound of the sampled <|alpha|> range; the upper bound is
    /// 1000x this.
    pub radius_min: f64,
    /// Aperture of the excluded cone around the contracting codirection
    /// for property (i): (flow + expanding) / contracting below this means
    /// the sample is skipped.
    pub cone_s_aperture: f64,
    /// Aperture of the excluded cone around the flow codirection for
    /// property (ii).
    pub cone_0_aperture: f64,
    /// Number of leading samples on which the finite-difference bracket is
    /// compared against the closed form.
    pub bracket_check_count: usize,
    pub bracket_dt: f64,
    /// Offset into the low-discrepancy sequence; lets runs draw disjoint
    /// deterministic sample sets.
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            sample_count: 10_000,
            radius_min: 10.0,
            cone_s_aperture: super::CONE_S_APERTURE,
            cone_0_aperture: super::CONE_0_APERTURE,
            bracket_check_count: 0,
            bracket_dt: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub samples: usize,
    pub outside_cone_s: usize,
    pub outside_cone_0: usize,
    pub violations_i: usize,
    pub violations_ii: usize,
    /// Smallest margin -G0 / <|alpha|>^delta over samples outside the
    /// contracting cone; positive means property (i) held everywhere.
    pub worst_margin_i: f64,
    pub worst_margin_ii: f64,
    /// First-percentile margins: the certified ellipticity constants.
    pub fitted_c_i: f64,
    pub fitted_c_ii: f64,
    /// Largest relative gap between the finite-difference and closed-form
    /// bracket over the checked prefix.
    pub max_bracket_gap: f64,
}

impl ScanReport {
    pub fn fitted_c(&self) -> f64 {
        self.fitted_c_i.min(self.fitted_c_ii)
    }
}

struct SampleOutcome {
    margin_i: Option<f64>,
    margin_ii: Option<f64>,
    bracket_gap: Option<f64>,
}

/// Run the scan. Deterministic for a fixed config, independent of thread
/// count.
pub fn scan_properties(
    map: &HyperbolicToralMap,
    split: &SplittingData,
    params: &EscapeParams,
    roof: f64,
    config: &ScanConfig,
) -> Result<ScanReport, EscapeError> {
    let g0 = EscapeFunction::new(*params, *split, roof)?;
    let outcomes: Vec<Result<SampleOutcome, EscapeError>> = (0..config.sample_count)
        .into_par_iter()
        .map(|i| {
            let idx = i as u64 + config.seed;
            let alpha = draw_sample(idx, config.radius_min, roof);
            let comps = AdaptedComponents::at(&alpha, split, roof);
            let jap_delta = alpha.jap().powf(params.delta);
            let in_cone_s =
                (comps.flow + comps.expanding) <= config.cone_s_aperture * comps.contracting;
            let in_cone_0 =
                (comps.expanding + comps.contracting) <= config.cone_0_aperture * comps.flow;
            let margin_i = if in_cone_s {
                None
            } else {
                Some(-g0.value(&alpha)? / jap_delta)
            };
            let margin_ii = if in_cone_0 {
                None
            } else {
                let b = bracket_along_flow(&alpha, params, split, roof, map, config.bracket_dt)?;
                Some(-b.closed_form / jap_delta)
            };
            let bracket_gap = if i < config.bracket_check_count {
                let b = bracket_along_flow(&alpha, params, split, roof, map, config.bracket_dt)?;
                Some(
                    (b.finite_difference - b.closed_form).abs() / b.closed_form.abs().max(1.0),
                )
            } else {
                None
            };
            Ok(SampleOutcome { margin_i, margin_ii, bracket_gap })
        })
        .collect();

    let mut margins_i = Vec::new();
    let mut margins_ii = Vec::new();
    let mut max_bracket_gap = 0.0f64;
    for outcome in outcomes {
        let outcome = outcome?;
        if let Some(m) = outcome.margin_i {
            margins_i.push(m);
        }
        if let Some(m) = outcome.margin_ii {
            margins_ii.push(m);
        }
        if let Some(g) = outcome.bracket_gap {
            max_bracket_gap = max_bracket_gap.max(g);
        }
    }
    margins_i.sort_by(f64::total_cmp);
    margins_ii.sort_by(f64::total_cmp);
    let percentile = |v: &[f64]| if v.is_empty() { f64::NAN } else { v[v.len() / 100] };
    Ok(ScanReport {
        samples: config.sample_count,
        outside_cone_s: margins_i.len(),
        outside_cone_0: margins_ii.len(),
        violations_i: margins_i.iter().filter(|m| **m <= 0.0).count(),
        violations_ii: margins_ii.iter().filter(|m| **m <= 0.0).count(),
        worst_margin_i: margins_i.first().copied().unwrap_or(f64::NAN),
        worst_margin_ii: margins_ii.first().copied().unwrap_or(f64::NAN),
        fitted_c_i: percentile(&margins_i),
        fitted_c_ii: percentile(&margins_ii),
        max_bracket_gap,
    })
}

/// Deterministic sample: Halton directions on the covector sphere, radius
/// log-uniform over [radius_min, 1000 radius_min] in <|alpha|>, base point
/// uniform over the mapping torus.
fn draw_sample(idx: u64, radius_min: f64, roof: f64) -> CotangentSample {
    let cos_polar = 2.0 * halton(idx, 2) - 1.0;
    let azimuth = 2.0 * std::f64::consts::PI * halton(idx, 3);
    let sin_polar = (1.0 - cos_polar * cos_polar).sqrt();
    let dir = [sin_polar * azimuth.cos(), sin_polar * azimuth.sin(), cos_polar];
    let jap = radius_min * 1e3f64.powf(halton(idx, 5));
    let r = (jap * jap - 1.0).max(0.0).sqrt();
    CotangentSample::new(
        [halton(idx, 7), halton(idx, 11)],
        halton(idx, 13) * roof,
        [r * dir[0], r * dir[1]],
        r * dir[2],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (HyperbolicToralMap, SplittingData, EscapeParams) {
        let map = HyperbolicToralMap::new(2, 1, 1, 1).unwrap();
        let split = SplittingData::compute(&map);
        let params = EscapeParams::defaults(&split, 1.0);
        (map, split, params)
    }

    #[test]
    fn default_parameters_scan_clean() {
        let (map, split, params) = setup();
        let config = ScanConfig { sample_count: 2000, ..ScanConfig::default() };
        let report = scan_properties(&map, &split, &params, 1.0, &config).unwrap();
        assert_eq!(report.violations_i, 0, "worst margin {}", report.worst_margin_i);
        assert_eq!(report.violations_ii, 0, "worst margin {}", report.worst_margin_ii);
        assert!(report.fitted_c() > 0.0);
    }

    #[test]
    fn zero_flow_weight_breaks_property_i() {
        // without the -A |eta|^delta term, covectors near the flow
        // codirection (no expanding part, modest contracting part) make G0
        // nonnegative: the backward window drifts them into the
        // contracting cone where the symbol is positive
        let (_, split, mut params) = setup();
        params.a_const = 0.0;
        let r = 100.0;
        for fc_ratio in [0.6, 1.0, 2.0] {
            let xi = [r * split.s_covector[0], r * split.s_covector[1]];
            let alpha = super::super::CotangentSample::new([0.0, 0.0], 0.0, xi, fc_ratio * r);
            // outside the contracting cone (flow/contracting > aperture)
            assert!(fc_ratio > ScanConfig::default().cone_s_aperture);
            let g = super::super::escape_value(&alpha, &params, &split, 1.0).unwrap();
            assert!(g >= 0.0, "expected a property (i) violation, got G0 = {g}");
        }
    }

    #[test]
    fn degenerate_window_breaks_property_i() {
        let (map, split, mut params) = setup();
        params.t1 = params.t0 + 1e-9;
        let config = ScanConfig { sample_count: 2000, ..ScanConfig::default() };
        match scan_properties(&map, &split, &params, 1.0, &config) {
            Ok(report) => assert!(report.violations_i > 0),
            Err(EscapeError::BadParams(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let (map, split, params) = setup();
        let config = ScanConfig { sample_count: 500, ..ScanConfig::default() };
        let a = scan_properties(&map, &split, &params, 1.0, &config).unwrap();
        let b = scan_properties(&map, &split, &params, 1.0, &config).unwrap();
        assert_eq!(a.worst_margin_i, b.worst_margin_i);
        assert_eq!(a.worst_margin_ii, b.worst_margin_ii);
    }
}
