//! Exact verification of the golden constants against an expected table.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use yamabe_core::expansions::{
    compare_with_maximum, cross_polynomial, delta_gain, fww_coefficient, second_order_log_coefficient,
    total_polynomial,
};
use yamabe_core::pohozaev::MassRelation;
use yamabe_core::scalars::rat;
use yamabe_core::tensors::sff_second_flux_factor;
use yamabe_core::ExactScalar;

pub const DEFAULT_TABLE: &str = include_str!("expected.json");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ExpectedRow {
    pub dim: usize,
    pub name: String,
    pub expected: String,
    pub anchor: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Exact,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationRow {
    pub dim: usize,
    pub name: String,
    pub expected: String,
    pub computed: String,
    #[serde(rename = "match")]
    pub kind: MatchKind,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub dims: Vec<usize>,
    pub rows: Vec<VerificationRow>,
    pub failures: usize,
}

pub fn parse_table(text: &str) -> Result<Vec<ExpectedRow>> {
    serde_json::from_str(text).context("expected table must be a JSON array of {dim, name, expected, anchor}")
}

/// Computed constants for one dimension, keyed by row name.
pub fn computed_constants(dim: usize) -> Result<BTreeMap<String, ExactScalar>> {
    let mut out = BTreeMap::new();
    match dim {
        4 => {
            out.insert("fww_log_coefficient".into(), fww_coefficient(4)?.value);
            let d = delta_gain()?;
            out.insert("delta_base_total".into(), d.base_total);
            out.insert("delta_bulk".into(), d.bulk_delta);
            out.insert("delta_source".into(), d.source_delta);
            out.insert("delta_boundary".into(), d.boundary_delta);
            out.insert("delta_gain".into(), d.delta_total);
            let rel = MassRelation::new(4)?;
            out.insert("flux_slope".into(), ExactScalar::rational(rel.flux_slope));
            out.insert("mass_slope".into(), ExactScalar::rational(rel.mass_slope));
        }
        5 | 6 => {
            out.insert("fww_coefficient".into(), fww_coefficient(dim)?.value);
            for (m, c) in cross_polynomial(dim)?.total.coeffs() {
                out.insert(format!("cross_{}", m.label()), c.clone());
            }
            let poly = total_polynomial(dim)?;
            let max = poly.maximize()?;
            out.insert("argmax_a1".into(), ExactScalar::rational(max.argmax.0.clone()));
            out.insert("argmax_a2".into(), ExactScalar::rational(max.argmax.1.clone()));
            out.insert("max_value".into(), max.value);
            if dim == 5 {
                out.insert("second_order_log".into(), second_order_log_coefficient()?.total);
                let rel = MassRelation::new(5)?;
                out.insert("flux_slope".into(), ExactScalar::rational(rel.flux_slope));
                out.insert("flux_offset".into(), ExactScalar::rational(rel.flux_offset));
                out.insert("mass_slope".into(), ExactScalar::rational(rel.mass_slope));
                out.insert("mass_offset".into(), ExactScalar::rational(rel.mass_offset));
                out.insert("jet_flux_factor".into(), ExactScalar::rational(sff_second_flux_factor(5)));
            } else {
                let cmp = compare_with_maximum(&poly, rat(-128, 7), rat(544, 35))?;
                out.insert("point_value".into(), cmp.point_value);
            }
        }
        other => bail!("dimension {other} has no golden constants; choose 4, 5 or 6"),
    }
    Ok(out)
}

/// Compares every table row for the requested dimensions. Rows whose
/// expected value does not parse, or that name no computed constant, fail.
pub fn verify(dims: &[usize], table: &[ExpectedRow]) -> Result<VerificationReport> {
    let mut rows = Vec::new();
    for &dim in dims {
        let computed = computed_constants(dim)?;
        let mut seen = Vec::new();
        for e in table.iter().filter(|e| e.dim == dim) {
            seen.push(e.name.clone());
            let got = computed.get(&e.name);
            let (computed_str, kind, diagnosis) = match (got, e.expected.parse::<ExactScalar>()) {
                (None, _) => (String::new(), MatchKind::Fail, Some("no computed constant with this name".to_string())),
                (Some(c), Err(err)) => (c.to_string(), MatchKind::Fail, Some(format!("unparsable expected value: {err}"))),
                (Some(c), Ok(want)) if want.to_string() == c.to_string() => (c.to_string(), MatchKind::Exact, None),
                (Some(c), Ok(want)) => (
                    c.to_string(),
                    MatchKind::Fail,
                    Some(format!("differs by {}", c - &want)),
                ),
            };
            rows.push(VerificationRow {
                dim,
                name: e.name.clone(),
                expected: e.expected.clone(),
                computed: computed_str,
                kind,
                anchor: e.anchor.clone(),
                diagnosis,
            });
        }
        for (name, c) in &computed {
            if !seen.contains(name) {
                rows.push(VerificationRow {
                    dim,
                    name: name.clone(),
                    expected: String::new(),
                    computed: c.to_string(),
                    kind: MatchKind::Fail,
                    anchor: String::new(),
                    diagnosis: Some("computed constant missing from the expected table".into()),
                });
            }
        }
    }
    let failures = rows.iter().filter(|r| r.kind == MatchKind::Fail).count();
    Ok(VerificationReport {
        dims: dims.to_vec(),
        rows,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_matches() {
        let table = parse_table(DEFAULT_TABLE).unwrap();
        let rep = verify(&[4, 5, 6], &table).unwrap();
        let bad: Vec<_> = rep.rows.iter().filter(|r| r.kind == MatchKind::Fail).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert_eq!(rep.rows.len(), table.len());
    }

    #[test]
    fn tampered_row_fails() {
        let mut table = parse_table(DEFAULT_TABLE).unwrap();
        let row = table.iter_mut().find(|r| r.dim == 5 && r.name == "max_value").unwrap();
        row.expected = "3/2561".into();
        let rep = verify(&[5], &table).unwrap();
        assert_eq!(rep.failures, 1);
        let fail = rep.rows.iter().find(|r| r.kind == MatchKind::Fail).unwrap();
        assert_eq!(fail.name, "max_value");
        assert!(fail.diagnosis.as_deref().unwrap().starts_with("differs by"));
    }
}
