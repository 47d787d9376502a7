//! `--check name=target±tolerance` thresholds on report summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scan::parse_number;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub target: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: Check,
    /// `None` when the report has no such quantity.
    pub value: Option<f64>,
    pub passed: bool,
}

/// Accepts `±` or `+-` between target and tolerance.
pub fn parse_check(text: &str) -> Option<Check> {
    let (name, rest) = text.split_once('=')?;
    let (target, tol) = rest.split_once('±').or_else(|| rest.split_once("+-"))?;
    let name = name.trim().to_string();
    let target = parse_number(target).ok()?;
    let tolerance = parse_number(tol).ok()?;
    if name.is_empty() || !(tolerance >= 0.0) {
        return None;
    }
    Some(Check { name, target, tolerance })
}

pub fn evaluate(checks: &[Check], summary: &BTreeMap<String, f64>) -> Vec<CheckOutcome> {
    checks
        .iter()
        .map(|c| {
            let value = summary.get(&c.name).copied();
            let passed = value.is_some_and(|v| (v - c.target).abs() <= c.tolerance);
            CheckOutcome { check: c.clone(), value, passed }
        })
        .collect()
}
