//! Report type and its CSV, JSON and SVG renderings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use traplab_core::fit::ScalingFit;

use crate::check::CheckOutcome;
use crate::config::ExperimentConfig;
use crate::RunError;

pub const CSV_HEADER: [&str; 7] = ["experiment", "m", "param_name", "param_value", "quantity", "value", "valid_flag"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub m: u32,
    pub param_name: &'static str,
    pub param_value: f64,
    pub quantity: String,
    pub value: f64,
    pub valid: bool,
    /// Library module that produced the value.
    pub module: &'static str,
}

/// Extra table written next to the report, e.g. a time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub version: &'static str,
    pub config: ExperimentConfig,
    /// Which module produced each quantity.
    pub provenance: BTreeMap<String, &'static str>,
    pub fits: BTreeMap<String, ScalingFit>,
    /// Scalars that `--check` can refer to.
    pub summary: BTreeMap<String, f64>,
    pub checks: Vec<CheckOutcome>,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Fit drawn in the SVG plot.
    #[serde(skip)]
    pub primary_fit: Option<String>,
}

impl Report {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.clone(),
                r.m.to_string(),
                r.param_name.to_string(),
                format_value(r.param_value),
                r.quantity.clone(),
                format_value(r.value),
                (r.valid as u8).to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| RunError::Io(e.into_error()))
    }

    pub fn json_string(&self) -> Result<String, RunError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write `<experiment>.csv`, `<experiment>.json`, extra tables and the
    /// optional SVG into the configured directory. Returns the paths.
    pub fn write(&self) -> Result<Vec<PathBuf>, RunError> {
        let dir = &self.config.out;
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let base = dir.join(&self.experiment);
        let csv_path = base.with_extension("csv");
        fs::write(&csv_path, self.csv_bytes()?)?;
        written.push(csv_path);
        let json_path = base.with_extension("json");
        fs::write(&json_path, self.json_string()?)?;
        written.push(json_path);
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            write_table(&path, t)?;
            written.push(path);
        }
        if self.config.svg {
            if let Some(fit) = self.primary_fit.as_ref().and_then(|k| self.fits.get(k)) {
                let path = base.with_extension("svg");
                fs::write(&path, loglog_svg(&self.experiment, fit))?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

fn write_table(path: &Path, t: &Table) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r.iter().map(|v| format_value(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that round-trips.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

/// Log-log plot of the fit samples with the fitted line.
pub fn loglog_svg(title: &str, fit: &ScalingFit) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    let lx: Vec<f64> = fit.samples.iter().map(|s| s.0.log10()).collect();
    let ly: Vec<f64> = fit.samples.iter().map(|s| s.1.log10()).collect();
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pad = ((hi - lo) * 0.1).max(0.05);
        (lo - pad, hi + pad)
    };
    let (x0, x1) = range(&lx);
    let (y0, y1) = range(&ly);
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    ));
    let (fx0, fx1) = (lx[0].min(lx[lx.len() - 1]), lx[0].max(lx[lx.len() - 1]));
    let line_y = |x: f64| (fit.intercept + fit.slope * x * std::f64::consts::LN_10) / std::f64::consts::LN_10;
    s.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c33\"/>\n",
        px(fx0),
        py(line_y(fx0)),
        px(fx1),
        py(line_y(fx1))
    ));
    for (x, y) in lx.iter().zip(&ly) {
        s.push_str(&format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#236\"/>\n", px(*x), py(*y)));
    }
    s.push_str(&format!(
        "<text x=\"{PAD}\" y=\"{}\">{title}: slope {:.4}</text>\n",
        PAD - 12.0,
        fit.slope
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 parameter [{x0:.2}, {x1:.2}]</text>\n",
        W / 2.0,
        H - 14.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">log10 value [{y0:.2}, {y1:.2}]</text>\n",
        H / 2.0,
        H / 2.0
    ));
    s.push_str("</svg>\n");
    s
}
