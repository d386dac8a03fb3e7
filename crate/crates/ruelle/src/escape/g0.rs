//! Evaluation of the escape function and its derivative along the flow.

use crate::numerics::{smoothstep, smoothstep_deriv};
use crate::orbits::HyperbolicToralMap;

use super::flow::{covector_flow, AdaptedComponents, CotangentSample};
use super::splitting::SplittingData;
use super::{EscapeError, EscapeParams};

/// The order-zero cone symbol: 0 outside both cones and near zero, +1 deep
/// in the contracting cone, -1 deep in the expanding cone, with quintic
/// blends across the aperture band [gamma1, gamma] and the radial band
/// [cutoff, 2 cutoff]. Nonpositive on the expanding cone and nonnegative
/// on the contracting cone.
pub fn cone_symbol(comps: &AdaptedComponents, params: &EscapeParams) -> f64 {
    let ratio_s = cone_ratio(comps.flow + comps.expanding, comps.contracting);
    let ratio_u = cone_ratio(comps.flow + comps.contracting, comps.expanding);
    let band = params.gamma - params.gamma1;
    let m_s = smoothstep((params.gamma - ratio_s) / band);
    let m_u = smoothstep((params.gamma - ratio_u) / band);
    radial_ramp(comps.norm(), params.cutoff_radius) * (m_s - m_u)
}

fn cone_ratio(off_component: f64, component: f64) -> f64 {
    if component > 0.0 {
        off_component / component
    } else {
        f64::INFINITY
    }
}

fn radial_ramp(norm: f64, cutoff: f64) -> f64 {
    smoothstep((norm - cutoff) / cutoff)
}

/// The cutoff chi: 0 below the radius, 1 above twice the radius.
fn chi(norm: f64, cutoff: f64) -> f64 {
    smoothstep((norm - cutoff) / cutoff)
}

fn chi_deriv(norm: f64, cutoff: f64) -> f64 {
    smoothstep_deriv((norm - cutoff) / cutoff) / cutoff
}

/// Escape-function evaluator bound to one suspension geometry.
#[derive(Debug, Clone, Copy)]
pub struct EscapeFunction {
    pub params: EscapeParams,
    pub split: SplittingData,
    pub roof: f64,
}

impl EscapeFunction {
    pub fn new(
        params: EscapeParams,
        split: SplittingData,
        roof: f64,
    ) -> Result<Self, EscapeError> {
        params.validate()?;
        if !(roof > 0.0) {
            return Err(EscapeError::BadParams(format!("roof {roof} must be positive")));
        }
        Ok(Self { params, split, roof })
    }

    /// G0(alpha): the window integral of the cone symbol times the covector
    /// norm to the delta, minus the flow-codirection term
    /// A chi(|alpha_cov|) |eta|^delta.
    pub fn value(&self, alpha: &CotangentSample) -> Result<f64, EscapeError> {
        let comps = AdaptedComponents::at(alpha, &self.split, self.roof);
        let integral = self.window_integral(alpha.theta, &comps)?;
        Ok(integral - self.flow_term(&comps))
    }

    fn flow_term(&self, comps: &AdaptedComponents) -> f64 {
        self.params.a_const
            * chi(comps.norm(), self.params.cutoff_radius)
            * comps.flow.powf(self.params.delta)
    }

    /// Composite-Simpson quadrature of the window integral over
    /// [-T0, T1], with panels split at roof-crossing times of the base
    /// trajectory and node doubling until the total settles to 1e-8
    /// relative.
    fn window_integral(&self, theta: f64, comps: &AdaptedComponents) -> Result<f64, EscapeError> {
        let params = &self.params;
        let mut cuts = vec![-params.t0];
        // crossings at theta + t = k * roof
        let mut k = ((theta - params.t0) / self.roof).ceil();
        while k * self.roof - theta < params.t1 {
            let t = k * self.roof - theta;
            if t > -params.t0 + 1e-12 && t < params.t1 - 1e-12 {
                cuts.push(t);
            }
            k += 1.0;
        }
        cuts.push(params.t1);
        let integrand = |t: f64| {
            let c = comps.flowed(t);
            cone_symbol(&c, params) * c.norm().powf(params.delta)
        };
        let mut nodes_per_unit = 8usize;
        let mut previous: Option<f64> = None;
        for _ in 0..12 {
            let mut total = 0.0;
            for pair in cuts.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let n = (((b - a) * nodes_per_unit as f64).ceil() as usize).max(2);
                let n = n + n % 2; // Simpson needs an even panel count
                let h = (b - a) / n as f64;
                let mut acc = integrand(a) + integrand(b);
                for j in 1..n {
                    let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * integrand(a + j as f64 * h);
                }
                total += acc * h / 3.0;
            }
            if let Some(prev) = previous {
                let rel = (total - prev).abs() / total.abs().max(1.0);
                if rel <= 1e-8 {
                    return Ok(total);
                }
            }
            previous = Some(total);
            nodes_per_unit *= 2;
        }
        let prev = previous.unwrap();
        Err(EscapeError::QuadratureNotConverged { rel_change: prev.abs() })
    }
}

/// Both routes to the derivative of G0 along the lifted flow.
#[derive(Debug, Clone, Copy)]
pub struct BracketValues {
    /// (G0(flow_dt alpha) - G0(flow_{-dt} alpha)) / (2 dt).
    pub finite_difference: f64,
    /// Window boundary terms plus the cutoff-term derivative:
    /// m(T1) nu(T1)^d - m(-T0) nu(-T0)^d - A chi'(nu) nu' |eta|^d.
    pub closed_form: f64,
}

/// Convenience wrapper building the evaluator per call.
pub fn escape_value(
    alpha: &CotangentSample,
    params: &EscapeParams,
    split: &SplittingData,
    roof: f64,
) -> Result<f64, EscapeError> {
    EscapeFunction::new(*params, *split, roof)?.value(alpha)
}

/// Evaluate the flow derivative of G0 both by central finite differences of
/// the quadrature value and by the closed-form boundary expression. The two
/// agree to O(dt^2) plus quadrature error for covectors above the cutoff.
pub fn bracket_along_flow(
    alpha: &CotangentSample,
    params: &EscapeParams,
    split: &SplittingData,
    roof: f64,
    map: &HyperbolicToralMap,
    dt: f64,
) -> Result<BracketValues, EscapeError> {
    if !(dt > 0.0 && dt <= 0.1) {
        return Err(EscapeError::BadParams(format!("dt = {dt} outside (0, 0.1]")));
    }
    let g = EscapeFunction::new(*params, *split, roof)?;
    let plus = covector_flow(alpha, dt, map, roof);
    let minus = covector_flow(alpha, -dt, map, roof);
    let finite_difference = (g.value(&plus)? - g.value(&minus)?) / (2.0 * dt);

    let comps = AdaptedComponents::at(alpha, split, roof);
    let at_t1 = comps.flowed(params.t1);
    let at_t0 = comps.flowed(-params.t0);
    let boundary = cone_symbol(&at_t1, params) * at_t1.norm().powf(params.delta)
        - cone_symbol(&at_t0, params) * at_t0.norm().powf(params.delta);
    let cutoff_term = params.a_const
        * chi_deriv(comps.norm(), params.cutoff_radius)
        * comps.norm_derivative()
        * comps.flow.powf(params.delta);
    Ok(BracketValues { finite_difference, closed_form: boundary - cutoff_term })
}
