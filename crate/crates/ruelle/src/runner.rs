//! Subcommand implementations behind the command-line front end.
//!
//! Every run produces a JSON envelope {version, config, result} on stdout
//! plus, when an output path is given, the bare interchange file (catalog
//! JSON/CSV, resonance list, transform CSV) at that path, so downstream
//! tools read the documented schemas unwrapped. All outputs are
//! byte-reproducible for a fixed configuration.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, ModelKind, RunConfig};
use crate::escape::{
    scan_properties, EscapeError, EscapeParams, ScanConfig, SplittingData,
};
use crate::fbi::{
    decay_fit, fbi_transform, wavefront_scan, FbiError, FbiGrid, FbiVariant, GevreySignal,
    SingularSignal, Singularity,
};
use crate::formats::{
    parse_transform_csv, records_to_pairs, resonances_to_records, transform_csv, CatalogFile,
    ResonanceRecord, SeriesValueRecord,
};
use crate::orbits::{OrbitCatalog, OrbitError};
use crate::spectra::{stability_experiment_par, SpectraError, StabilityOptions};
use crate::zeros::{locate_zeros, order_estimate, Box2, LogAnalytic, LogFn, SearchOptions, ZeroError};
use crate::zeta::{
    correction_polynomial, log_ruelle_zeta_direct, log_zeta_direct, spectral_moment_sum,
    trace_moment, zeta_via_detm, closed_form_cat_zeta, DeterminantSeries, RegDetInput, ZetaError,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Orbit(#[from] OrbitError),
    #[error("{0}")]
    Zeta(#[from] ZetaError),
    #[error("{0}")]
    Zero(#[from] ZeroError),
    #[error("{0}")]
    Escape(#[from] EscapeError),
    #[error("{0}")]
    Fbi(#[from] FbiError),
    #[error("{0}")]
    Spectra(#[from] SpectraError),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for IO, 1 for
    /// everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Usage(_) => 2,
            RunError::Io(_) => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string()}})
    }

    fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Io(_) => "io",
            RunError::Orbit(_) => "orbit",
            RunError::Zeta(_) => "zeta",
            RunError::Zero(_) => "zeros",
            RunError::Escape(_) => "escape",
            RunError::Fbi(_) => "fbi",
            RunError::Spectra(_) => "spectra",
            RunError::Json(_) => "json",
            RunError::Usage(_) => "usage",
        }
    }
}

/// Result of one subcommand: the stdout envelope plus optional files.
#[derive(Debug)]
pub struct RunOutput {
    pub envelope: Value,
    /// (path, contents) pairs to write.
    pub files: Vec<(String, String)>,
}

fn envelope(config: &RunConfig, result: Value) -> Value {
    let resolved: BTreeMap<String, String> = config.resolved();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": resolved,
        "result": result,
    })
}

fn parse_complex(text: &str) -> Result<Complex64, RunError> {
    let parts: Vec<&str> = text.split(',').collect();
    let err = || RunError::Usage(format!("expected RE,IM (or RE), got `{text}`"));
    match parts.len() {
        1 => Ok(Complex64::new(parts[0].trim().parse().map_err(|_| err())?, 0.0)),
        2 => Ok(Complex64::new(
            parts[0].trim().parse().map_err(|_| err())?,
            parts[1].trim().parse().map_err(|_| err())?,
        )),
        _ => Err(err()),
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, RunError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| RunError::Usage(format!("bad number `{p}` in list `{text}`")))
        })
        .collect()
}

fn load_catalog(path: &str) -> Result<OrbitCatalog, RunError> {
    let text = std::fs::read_to_string(path)?;
    let file: CatalogFile = serde_json::from_str(&text)?;
    Ok(file.into_catalog()?)
}

fn load_resonances(path: &str) -> Result<Vec<ResonanceRecord>, RunError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn catalog_from_config(config: &RunConfig) -> Result<OrbitCatalog, RunError> {
    match config.model_kind {
        ModelKind::CatSuspension => Ok(config.suspension()?.enumerate_orbits(config.horizon)?),
        ModelKind::Fuchsian => Ok(config.fuchsian()?.enumerate_orbits(config.horizon)?),
    }
}

/// `orbits`: enumerate the configured model into a catalog file.
pub fn run_orbits(config: &RunConfig, out: Option<&str>) -> Result<RunOutput, RunError> {
    let catalog = catalog_from_config(config)?;
    let file = CatalogFile::from(&catalog);
    let mut files = Vec::new();
    if let Some(path) = out {
        let contents = if path.ends_with(".csv") {
            file.to_csv()
        } else {
            serde_json::to_string_pretty(&file)? + "\n"
        };
        files.push((path.to_string(), contents));
    }
    let result = json!({
        "model_id": catalog.model_id,
        "entries": catalog.len(),
        "horizon_T": catalog.horizon_t,
        "complete": catalog.complete,
        "entropy_estimate": catalog.topological_entropy_estimate,
        "catalog": if out.is_none() { serde_json::to_value(&file)? } else { Value::Null },
    });
    Ok(RunOutput { envelope: envelope(config, result), files })
}

/// `zeta-eval`: evaluate an orbit sum at one point.
#[allow(clippy::too_many_arguments)]
pub fn run_zeta_eval(
    config: &RunConfig,
    catalog_path: &str,
    z: &str,
    mode: &str,
    m: u32,
    resonances: Option<&str>,
    anchor: Option<&str>,
    trunc_radius: f64,
) -> Result<RunOutput, RunError> {
    let catalog = load_catalog(catalog_path)?;
    let z = parse_complex(z)?;
    let record: SeriesValueRecord = match mode {
        "direct" => log_zeta_direct(&catalog, z).into(),
        "ruelle" => log_ruelle_zeta_direct(&catalog, z).into(),
        "trace" => {
            let t = trace_moment(&catalog, z, m);
            SeriesValueRecord { value_re: t.value.re, value_im: t.value.im, tail_bound: t.tail_bound }
        }
        "detm" => {
            let path = resonances
                .ok_or_else(|| RunError::Usage("detm mode requires --resonances".into()))?;
            let records = load_resonances(path)?;
            let anchor = parse_complex(anchor.unwrap_or("10,0"))?;
            let input = RegDetInput::new(records_to_pairs(&records), m, anchor, trunc_radius, 3.0)?;
            let q = correction_polynomial(&catalog, anchor, m);
            zeta_via_detm(&input, &q, z)?.into()
        }
        other => return Err(RunError::Usage(format!("unknown mode `{other}`"))),
    };
    Ok(RunOutput { envelope: envelope(config, serde_json::to_value(record)?), files: vec![] })
}

/// `zeros`: locate zeros of the catalog's determinant series in a box.
pub fn run_zeros(
    config: &RunConfig,
    catalog_path: &str,
    box_spec: &str,
    tol: f64,
    out: Option<&str>,
) -> Result<RunOutput, RunError> {
    let catalog = load_catalog(catalog_path)?;
    let coords = parse_f64_list(box_spec)?;
    if coords.len() != 4 {
        return Err(RunError::Usage("--box expects a,b,c,d".into()));
    }
    let rect = Box2::new(coords[0], coords[1], coords[2], coords[3])?;
    let spacing = catalog.min_primitive_length().unwrap_or(1.0);
    let series = DeterminantSeries::from_catalog(&catalog, spacing, 1e-12)?;
    let options = SearchOptions { quad_points: config.quad_points, ..SearchOptions::default() };
    let zeros = locate_zeros(&series, rect, tol, options)?;
    let records = resonances_to_records(&zeros);
    let mut files = Vec::new();
    if let Some(path) = out {
        files.push((path.to_string(), serde_json::to_string_pretty(&records)? + "\n"));
    }
    let result = json!({
        "count": records.len(),
        "resonances": records,
    });
    Ok(RunOutput { envelope: envelope(config, result), files })
}

/// `nr`: counting function N(R) over a resonance list.
pub fn run_nr(config: &RunConfig, resonances_path: &str, radius: f64) -> Result<RunOutput, RunError> {
    let records = load_resonances(resonances_path)?;
    let count: u64 = records
        .iter()
        .filter(|r| r.value().norm() <= radius)
        .map(|r| r.mult as u64)
        .sum();
    Ok(RunOutput {
        envelope: envelope(config, json!({"R": radius, "count": count})),
        files: vec![],
    })
}

/// `order`: order-of-growth estimate for a zeta evaluator or a control.
#[allow(clippy::too_many_arguments)]
pub fn run_order(
    config: &RunConfig,
    radii_spec: &str,
    control: Option<&str>,
    catalog_path: Option<&str>,
    resonances: Option<&str>,
    anchor: &str,
    det_order: u32,
    trunc_radius: f64,
) -> Result<RunOutput, RunError> {
    let radii = parse_radii(radii_spec)?;
    let fit = match control {
        Some("exp") => order_estimate(&LogFn(|z: Complex64| z), &radii)?,
        Some("exp2") => order_estimate(&LogFn(|z: Complex64| z * z), &radii)?,
        Some(other) => return Err(RunError::Usage(format!("unknown control `{other}`"))),
        None => {
            let catalog_path = catalog_path
                .ok_or_else(|| RunError::Usage("order needs --catalog (or --control)".into()))?;
            let res_path = resonances.ok_or_else(|| {
                RunError::Usage("order on a zeta evaluator needs --resonances (det_m form)".into())
            })?;
            let catalog = load_catalog(catalog_path)?;
            let records = load_resonances(res_path)?;
            let anchor = parse_complex(anchor)?;
            let input =
                RegDetInput::new(records_to_pairs(&records), det_order, anchor, trunc_radius, 3.0)?;
            let q = correction_polynomial(&catalog, anchor, det_order);
            let evaluator = DetmEvaluator { input, q };
            order_estimate(&evaluator, &radii)?
        }
    };
    let result = json!({
        "rho": fit.rho,
        "r_squared": fit.r_squared,
        "radii": fit.radii,
        "log_log_max": fit.log_log_max,
    });
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

/// det_m-representation evaluator for order estimation.
struct DetmEvaluator {
    input: RegDetInput,
    q: crate::zeta::CorrectionPolynomial,
}

impl LogAnalytic for DetmEvaluator {
    fn log_eval(&self, z: Complex64) -> Complex64 {
        crate::zeta::log_regularized_det(&self.input, z).unwrap_or(Complex64::new(f64::NAN, 0.0))
            + self.q.eval(z)
    }
}

fn parse_radii(spec: &str) -> Result<Vec<f64>, RunError> {
    if let Some((range, count)) = spec.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| RunError::Usage("radii range is lo..hi:count".into()))?;
        let lo: f64 = lo.parse().map_err(|_| RunError::Usage("bad radii range".into()))?;
        let hi: f64 = hi.parse().map_err(|_| RunError::Usage("bad radii range".into()))?;
        let n: usize = count.parse().map_err(|_| RunError::Usage("bad radii count".into()))?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(RunError::Usage("radii range must satisfy 0 < lo < hi, count >= 2".into()));
        }
        Ok((0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect())
    } else {
        parse_f64_list(spec)
    }
}

/// `traces-check`: orbit-sum trace moment against the spectral sum.
pub fn run_traces_check(
    config: &RunConfig,
    catalog_path: &str,
    z: &str,
    m: u32,
    j_max: u64,
) -> Result<RunOutput, RunError> {
    let catalog = load_catalog(catalog_path)?;
    let z = parse_complex(z)?;
    let orbit_side = trace_moment(&catalog, z, m);
    let (spectral_side, spectral_tail) = spectral_moment_sum(z, m, j_max);
    let gap = (orbit_side.value - spectral_side).norm();
    let budget = 1e-8 + orbit_side.tail_bound + spectral_tail;
    let result = json!({
        "m": m,
        "z": {"re": z.re, "im": z.im},
        "orbit_side": {"re": orbit_side.value.re, "im": orbit_side.value.im, "tail": orbit_side.tail_bound},
        "spectral_side": {"re": spectral_side.re, "im": spectral_side.im, "tail": spectral_tail},
        "gap": gap,
        "budget": budget,
        "pass": gap <= budget,
    });
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

/// `detm-check`: factorization reconstruction against the closed form.
pub fn run_detm_check(
    config: &RunConfig,
    catalog_path: &str,
    resonances_path: &str,
    anchor: &str,
    det_order: u32,
    lambdas: &str,
    trunc_radius: f64,
) -> Result<RunOutput, RunError> {
    let catalog = load_catalog(catalog_path)?;
    let records = load_resonances(resonances_path)?;
    let anchor = parse_complex(anchor)?;
    let input = RegDetInput::new(records_to_pairs(&records), det_order, anchor, trunc_radius, 3.0)?;
    let q = correction_polynomial(&catalog, anchor, det_order);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for lam_text in lambdas.split(';') {
        let lambda = parse_complex(lam_text)?;
        let rec = zeta_via_detm(&input, &q, lambda)?;
        let exact = closed_form_cat_zeta(lambda, config.potential, config.roof);
        let error = (rec.value - exact).norm();
        worst = worst.max(error);
        rows.push(json!({
            "lambda": {"re": lambda.re, "im": lambda.im},
            "reconstructed": {"re": rec.value.re, "im": rec.value.im},
            "closed_form": {"re": exact.re, "im": exact.im},
            "error": error,
            "det_tail_estimate": rec.tail_bound,
        }));
    }
    let result = json!({"rows": rows, "worst_error": worst});
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

/// `escape-check`: run the escape-function property scan.
pub fn run_escape_check(
    config: &RunConfig,
    samples: usize,
    radius_min: f64,
) -> Result<RunOutput, RunError> {
    let map = config.cat_map()?;
    let split = SplittingData::compute(&map);
    let params = escape_params_from(config, &split)?;
    let scan = ScanConfig {
        sample_count: samples,
        radius_min,
        bracket_check_count: samples.min(1000),
        seed: config.seed,
        ..ScanConfig::default()
    };
    let report = scan_properties(&map, &split, &params, config.roof, &scan)?;
    let result = json!({
        "violations_i": report.violations_i,
        "violations_ii": report.violations_ii,
        "worst_margin_i": report.worst_margin_i,
        "worst_margin_ii": report.worst_margin_ii,
        "fitted_c": report.fitted_c(),
    });
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

fn escape_params_from(config: &RunConfig, split: &SplittingData) -> Result<EscapeParams, RunError> {
    let mut params = EscapeParams::defaults(split, config.roof);
    let mut get = |key: &str| -> Result<Option<f64>, RunError> {
        match config.experiment.get(key) {
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|e| RunError::Usage(format!("experiment.{key}: {e}"))),
            None => Ok(None),
        }
    };
    if let Some(v) = get("delta")? {
        params.delta = v;
    }
    if let Some(v) = get("t0")? {
        params.t0 = v;
    }
    if let Some(v) = get("t1")? {
        params.t1 = v;
    }
    if let Some(v) = get("a_const")? {
        params.a_const = v;
    }
    if let Some(v) = get("gamma")? {
        params.gamma = v;
    }
    if let Some(v) = get("gamma1")? {
        params.gamma1 = v;
    }
    if let Some(v) = get("cutoff_radius")? {
        params.cutoff_radius = v;
    }
    params.validate()?;
    Ok(params)
}

/// `fbi`: transform a test signal and emit the CSV.
#[allow(clippy::too_many_arguments)]
pub fn run_fbi(
    config: &RunConfig,
    s: f64,
    c: f64,
    h: f64,
    variant: &str,
    l_max: usize,
    xi_max: f64,
    n_xi: usize,
    jump_at: Option<f64>,
    out: &str,
) -> Result<RunOutput, RunError> {
    let variant = match variant {
        "flat" => FbiVariant::Flat,
        "scaled" => FbiVariant::ScaledPhase,
        "gabor" => FbiVariant::Gabor,
        other => return Err(RunError::Usage(format!("unknown variant `{other}`"))),
    };
    let base = GevreySignal::with_decay(s, c, l_max)?;
    let x_nodes = FbiGrid::uniform_x(-std::f64::consts::PI, std::f64::consts::PI, h);
    let xi_nodes: Vec<f64> = if jump_at.is_some() {
        // two-sided geometric grid for wavefront scans
        let per_side = (n_xi / 2).max(4);
        let mut nodes: Vec<f64> = (0..per_side)
            .map(|i| 0.2 * (xi_max / 0.2f64).powf(i as f64 / (per_side - 1) as f64))
            .collect();
        let mut all: Vec<f64> = nodes.iter().map(|v| -v).collect();
        all.append(&mut nodes);
        all.sort_by(f64::total_cmp);
        all
    } else {
        (0..n_xi)
            .map(|i| 0.2 * (xi_max / 0.2f64).powf(i as f64 / (n_xi - 1) as f64))
            .collect()
    };
    let grid = FbiGrid::new(h, x_nodes, xi_nodes, variant)?;
    let values = match jump_at {
        Some(at) => {
            let signal = SingularSignal::new(base, Singularity::Jump { at, height: 1.0 });
            fbi_transform(&signal, &grid)?
        }
        None => fbi_transform(&base, &grid)?,
    };
    let csv = transform_csv(&grid, &values, s, c);
    let result = json!({
        "points": grid.x_nodes.len() * grid.xi_nodes.len(),
        "global_max": values.global_max(),
        "out": out,
    });
    Ok(RunOutput {
        envelope: envelope(config, result),
        files: vec![(out.to_string(), csv)],
    })
}

/// `fbi-fit`: decay fit over a transform CSV.
pub fn run_fbi_fit(config: &RunConfig, input: &str, s: f64) -> Result<RunOutput, RunError> {
    let text = std::fs::read_to_string(input)?;
    let (grid, values) = parse_transform_csv(&text).map_err(RunError::Usage)?;
    let fit = decay_fit(&values, &grid, s)?;
    let result = json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "xi_range": [fit.xi_range.0, fit.xi_range.1],
        "points_used": fit.points_used,
    });
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

/// `fbi-wf`: wavefront scan over a transform CSV.
pub fn run_fbi_wf(
    config: &RunConfig,
    input: &str,
    s: f64,
    threshold: f64,
) -> Result<RunOutput, RunError> {
    let text = std::fs::read_to_string(input)?;
    let (grid, values) = parse_transform_csv(&text).map_err(RunError::Usage)?;
    let report = wavefront_scan(&values, &grid, s, threshold)?;
    let result = json!({
        "smooth_rate": report.smooth_rate,
        "detected_x": report.detected_x(),
        "detected_plus": report.detected_plus,
        "detected_minus": report.detected_minus,
    });
    Ok(RunOutput { envelope: envelope(config, result), files: vec![] })
}

/// `spectra`: the stochastic-stability experiment table.
pub fn run_spectra(
    config: &RunConfig,
    eps_list: &str,
    z: f64,
    disk_radius: f64,
    out: &str,
) -> Result<RunOutput, RunError> {
    let eps = parse_f64_list(eps_list)?;
    let map = config.cat_map()?;
    let options = StabilityOptions {
        grid_per_cell: config.grid_per_cell,
        window: config.window,
        k_max: 0,
    };
    let rows = stability_experiment_par(&map, &eps, z, disk_radius, &options)?;
    let mut csv = String::from("eps,d_zH,n_eigs_in_disk\n");
    for row in &rows {
        csv.push_str(&format!("{},{},{}\n", row.eps, row.distance, row.eigenvalues_in_disk));
    }
    let sectors: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "eps": row.eps,
                "sectors": row.sector_eigenvalues.iter().map(|(seed, evs)| {
                    json!({
                        "seed": seed,
                        "eigenvalues": evs.iter().map(|v| json!({"re": v.re, "im": v.im})).collect::<Vec<_>>(),
                    })
                }).collect::<Vec<_>>(),
            })
        })
        .collect();
    let result = json!({
        "rows": rows.iter().map(|r| json!({
            "eps": r.eps,
            "d_zH": r.distance,
            "n_eigs_in_disk": r.eigenvalues_in_disk,
            "sectors_solved": r.sectors_solved,
        })).collect::<Vec<_>>(),
        "out": out,
    });
    let sectors_path = format!("{out}.sectors.json");
    Ok(RunOutput {
        envelope: envelope(config, result),
        files: vec![
            (out.to_string(), csv),
            (sectors_path, serde_json::to_string_pretty(&sectors)? + "\n"),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_envelope_carries_config_and_version() {
        let config = RunConfig::default();
        let out = run_orbits(&config, None).unwrap();
        assert_eq!(out.envelope["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(out.envelope["config"]["model.cat"], "2,1,1,1");
        assert!(out.envelope["result"]["entries"].as_u64().unwrap() > 0);
        assert!(out.files.is_empty());
    }

    #[test]
    fn orbits_writes_csv_or_json_by_extension() {
        let config = RunConfig::parse("numerics.horizon = 4").unwrap();
        let json_out = run_orbits(&config, Some("cat.json")).unwrap();
        assert!(json_out.files[0].1.contains("\"horizon_T\""));
        let csv_out = run_orbits(&config, Some("cat.csv")).unwrap();
        assert!(csv_out.files[0].1.starts_with("T,T_prim,intV,log_det,mult"));
    }

    #[test]
    fn radii_parse_both_forms() {
        assert_eq!(parse_radii("1,2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        let geo = parse_radii("5..50:3").unwrap();
        assert_eq!(geo.len(), 3);
        assert!((geo[0] - 5.0).abs() < 1e-12);
        assert!((geo[2] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn escape_params_accept_experiment_overrides() {
        let config = RunConfig::parse("experiment.a_const = 300\nexperiment.t1 = 14").unwrap();
        let map = config.cat_map().unwrap();
        let split = SplittingData::compute(&map);
        let params = escape_params_from(&config, &split).unwrap();
        assert_eq!(params.a_const, 300.0);
        assert_eq!(params.t1, 14.0);
    }
}
