//! Wire and file schemas: catalog JSON/CSV, resonance lists, series values,
//! and the CSV emitted by the transform tools.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::orbits::{OrbitCatalog, OrbitError, PeriodicOrbit};
use crate::zeros::Resonance;
use crate::zeta::SeriesValue;

/// Catalog interchange schema. `entropy_estimate` is an extension field
/// (absent in minimal files: loading then falls back to 0, flagging tails
/// as divergent unless the catalog is rebuilt from a model).
#[derive(Debug, Serialize, Deserialize)]
pub struct CatalogFile {
    pub model_id: String,
    #[serde(rename = "horizon_T")]
    pub horizon_t: f64,
    pub complete: bool,
    #[serde(default)]
    pub entropy_estimate: Option<f64>,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    #[serde(rename = "T")]
    pub length: f64,
    #[serde(rename = "T_prim")]
    pub primitive_length: f64,
    #[serde(rename = "intV")]
    pub potential_integral: f64,
    pub log_det: f64,
    pub mult: u64,
}

impl From<&OrbitCatalog> for CatalogFile {
    fn from(catalog: &OrbitCatalog) -> Self {
        Self {
            model_id: catalog.model_id.clone(),
            horizon_t: catalog.horizon_t,
            complete: catalog.complete,
            entropy_estimate: Some(catalog.topological_entropy_estimate),
            entries: catalog
                .orbits
                .iter()
                .map(|o| CatalogEntry {
                    length: o.length,
                    primitive_length: o.primitive_length,
                    potential_integral: o.potential_integral,
                    log_det: o.log_det_factor,
                    mult: o.multiplicity,
                })
                .collect(),
        }
    }
}

impl CatalogFile {
    pub fn into_catalog(self) -> Result<OrbitCatalog, OrbitError> {
        let orbits = self
            .entries
            .into_iter()
            .map(|e| {
                PeriodicOrbit::new(
                    e.length,
                    e.primitive_length,
                    e.potential_integral,
                    e.log_det,
                    e.mult,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrbitCatalog::new(
            self.model_id,
            orbits,
            self.horizon_t,
            self.complete,
            self.entropy_estimate.unwrap_or(0.0),
        ))
    }

    /// CSV with the same columns as the JSON entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,T_prim,intV,log_det,mult\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.length, e.primitive_length, e.potential_integral, e.log_det, e.mult
            ));
        }
        out
    }
}

/// Resonance list entry: JSON arrays of {re, im, mult}.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResonanceRecord {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
}

impl From<&Resonance> for ResonanceRecord {
    fn from(r: &Resonance) -> Self {
        Self { re: r.value.re, im: r.value.im, mult: r.multiplicity }
    }
}

impl ResonanceRecord {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub fn resonances_to_records(resonances: &[Resonance]) -> Vec<ResonanceRecord> {
    resonances.iter().map(ResonanceRecord::from).collect()
}

pub fn records_to_pairs(records: &[ResonanceRecord]) -> Vec<(Complex64, u32)> {
    records.iter().map(|r| (r.value(), r.mult)).collect()
}

/// CLI series-value schema {value_re, value_im, tail_bound}.
#[derive(Debug, Serialize, Deserialize)]
pub struct SeriesValueRecord {
    pub value_re: f64,
    pub value_im: f64,
    pub tail_bound: f64,
}

impl From<SeriesValue> for SeriesValueRecord {
    fn from(v: SeriesValue) -> Self {
        Self { value_re: v.value.re, value_im: v.value.im, tail_bound: v.tail_bound }
    }
}

/// One row of the transform CSV: (x, xi, re, im, abs).
pub fn transform_csv(
    grid: &crate::fbi::FbiGrid,
    values: &crate::fbi::TransformValues,
    s: f64,
    c: f64,
) -> String {
    let variant = match grid.variant {
        crate::fbi::FbiVariant::Flat => "flat",
        crate::fbi::FbiVariant::ScaledPhase => "scaled",
        crate::fbi::FbiVariant::Gabor => "gabor",
    };
    let mut out = format!("# h={} variant={variant} s={s} c={c}\n", grid.h);
    out.push_str("x,xi,re,im,abs\n");
    for (ix, &x) in grid.x_nodes.iter().enumerate() {
        for (ixi, &xi) in grid.xi_nodes.iter().enumerate() {
            let v = values.values[ix][ixi];
            out.push_str(&format!("{x},{xi},{},{},{}\n", v.re, v.im, v.norm()));
        }
    }
    out
}

/// Parse a transform CSV back into a grid and values; the header comment
/// carries h and the variant.
pub fn parse_transform_csv(
    text: &str,
) -> Result<(crate::fbi::FbiGrid, crate::fbi::TransformValues), String> {
    let mut h = None;
    let mut variant = crate::fbi::FbiVariant::Flat;
    let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("x,") {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for token in rest.split_whitespace() {
                if let Some(v) = token.strip_prefix("h=") {
                    h = Some(v.parse::<f64>().map_err(|e| e.to_string())?);
                }
                if let Some(v) = token.strip_prefix("variant=") {
                    variant = match v {
                        "flat" => crate::fbi::FbiVariant::Flat,
                        "scaled" => crate::fbi::FbiVariant::ScaledPhase,
                        "gabor" => crate::fbi::FbiVariant::Gabor,
                        other => return Err(format!("unknown variant {other}")),
                    };
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return Err(format!("bad row: {line}"));
        }
        let x: f64 = fields[0].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let xi: f64 = fields[1].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let re: f64 = fields[2].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let im: f64 = fields[3].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        rows.push((x, xi, Complex64::new(re, im)));
    }
    let h = h.ok_or("missing h in CSV header")?;
    let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut xis: Vec<f64> = rows.iter().map(|r| r.1).collect();
    xis.sort_by(f64::total_cmp);
    xis.dedup();
    let index_of = |v: f64, list: &[f64]| list.partition_point(|u| *u < v).min(list.len() - 1);
    let mut values = vec![vec![Complex64::ZERO; xis.len()]; xs.len()];
    for (x, xi, v) in rows {
        values[index_of(x, &xs)][index_of(xi, &xis)] = v;
    }
    let grid = crate::fbi::FbiGrid::new(h, xs, xis, variant).map_err(|e| e.to_string())?;
    Ok((grid, crate::fbi::TransformValues { values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{HyperbolicToralMap, SuspensionModel};

    #[test]
    fn catalog_roundtrips_through_json() {
        let model =
            SuspensionModel::new(HyperbolicToralMap::new(2, 1, 1, 1).unwrap(), 1.0, 0.3).unwrap();
        let catalog = model.enumerate_orbits(6.0).unwrap();
        let file = CatalogFile::from(&catalog);
        let json = serde_json::to_string_pretty(&file).unwrap();
        assert!(json.contains("\"horizon_T\""));
        assert!(json.contains("\"T_prim\""));
        let back: CatalogFile = serde_json::from_str(&json).unwrap();
        let rebuilt = back.into_catalog().unwrap();
        assert_eq!(rebuilt.len(), catalog.len());
        for (a, b) in rebuilt.orbits.iter().zip(&catalog.orbits) {
            assert_eq!(a, b);
        }
        assert_eq!(rebuilt.topological_entropy_estimate, catalog.topological_entropy_estimate);
    }

    #[test]
    fn catalog_csv_has_expected_columns() {
        let model =
            SuspensionModel::new(HyperbolicToralMap::new(2, 1, 1, 1).unwrap(), 1.0, 0.0).unwrap();
        let catalog = model.enumerate_orbits(3.0).unwrap();
        let csv = CatalogFile::from(&catalog).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "T,T_prim,intV,log_det,mult");
        assert_eq!(csv.lines().count(), catalog.len() + 1);
    }

    #[test]
    fn resonance_records_roundtrip() {
        let records = vec![
            ResonanceRecord { re: 0.0, im: 6.28, mult: 1 },
            ResonanceRecord { re: -1.0, im: 0.0, mult: 2 },
        ];
        let json = serde_json::to_string(&records).unwrap();
        let back: Vec<ResonanceRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].mult, 2);
        let pairs = records_to_pairs(&back);
        assert_eq!(pairs[0].0, Complex64::new(0.0, 6.28));
    }

    #[test]
    fn transform_csv_roundtrips() {
        use crate::fbi::{FbiGrid, FbiVariant, TransformValues};
        let grid = FbiGrid::new(
            0.09,
            vec![0.0, 0.03, 0.06],
            vec![-0.5, 0.5],
            FbiVariant::Flat,
        )
        .unwrap();
        let values = TransformValues {
            values: vec![
                vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)],
                vec![Complex64::new(-1.0, 0.25), Complex64::ZERO],
                vec![Complex64::new(0.0, -2.0), Complex64::new(3.0, 1.0)],
            ],
        };
        let csv = transform_csv(&grid, &values, 1.0, 1.0);
        let (grid2, values2) = parse_transform_csv(&csv).unwrap();
        assert_eq!(grid2.h, grid.h);
        assert_eq!(grid2.x_nodes, grid.x_nodes);
        assert_eq!(grid2.xi_nodes, grid.xi_nodes);
        for ix in 0..3 {
            for ixi in 0..2 {
                assert_eq!(values2.values[ix][ixi], values.values[ix][ixi]);
            }
        }
    }
}
