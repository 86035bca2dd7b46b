//! Rendering of experiment outcomes: results table, machine-readable JSON,
//! importance chart, and the CSV writer.
//!
//! Everything here is deterministic given its inputs, so repeated runs with
//! the same seed produce byte-identical artifacts (timestamps aside).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::{CvSummary, MetricReport};

/// One (selector ensemble, regressor) cell of the results grid. Serializes
/// directly in the results-file schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub selector: String,
    pub regressor: String,
    pub cv_rmse_mean: f64,
    pub cv_rmse_std: f64,
    pub fold_rmse: Vec<f64>,
    pub test_rmse: f64,
    pub r_squared: f64,
    /// Feature (or component) names used by the final fit.
    pub selected_features: Vec<String>,
    /// Named forest importances, when the regressor provides them.
    pub importances: Option<BTreeMap<String, f64>>,
}

impl ExperimentResult {
    pub fn new(
        selector: impl Into<String>,
        regressor: impl Into<String>,
        cv: &CvSummary,
        test: MetricReport,
        selected_features: Vec<String>,
        importances: Option<BTreeMap<String, f64>>,
    ) -> Result<ExperimentResult> {
        let selector = selector.into();
        let regressor = regressor.into();
        if selector.is_empty() || regressor.is_empty() {
            return Err(Error::Param("result labels must be non-empty".into()));
        }
        if test.rmse.is_nan() || test.rmse < 0.0 {
            return Err(Error::Param(format!("invalid test RMSE {}", test.rmse)));
        }
        Ok(ExperimentResult {
            selector,
            regressor,
            cv_rmse_mean: cv.mean,
            cv_rmse_std: cv.std,
            fold_rmse: cv.fold_rmse.clone(),
            test_rmse: test.rmse,
            r_squared: test.r_squared,
            selected_features,
            importances,
        })
    }

    fn cv_display(&self) -> String {
        format!("{:.2} +/- {:.2}", self.cv_rmse_mean, self.cv_rmse_std)
    }
}

/// Output format for [`render_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// Renders one row per result with CV RMSE ("M.MM +/- S.SS"), test RMSE and
/// R². Rows keep their input order; in Markdown a selector label is printed
/// only on the first row of its group, mirroring a grouped results table.
pub fn render_table(results: &[ExperimentResult], format: TableFormat) -> Result<String> {
    if results.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut out = String::new();
    match format {
        TableFormat::Markdown => {
            out.push_str(
                "| Feature Selection | Regressor | CV RMSE | Test RMSE | R-squared |\n",
            );
            out.push_str("|---|---|---|---|---|\n");
            let mut previous: Option<&str> = None;
            for r in results {
                let group = if previous == Some(r.selector.as_str()) {
                    ""
                } else {
                    r.selector.as_str()
                };
                previous = Some(r.selector.as_str());
                out.push_str(&format!(
                    "| {} | {} | {} | {:.2} | {:.2} |\n",
                    group,
                    r.regressor,
                    r.cv_display(),
                    r.test_rmse,
                    r.r_squared
                ));
            }
        }
        TableFormat::Csv => {
            out.push_str("selector,regressor,cv_rmse,test_rmse,r_squared\n");
            for r in results {
                out.push_str(&format!(
                    "{},{},{},{:.2},{:.2}\n",
                    r.selector,
                    r.regressor,
                    r.cv_display(),
                    r.test_rmse,
                    r.r_squared
                ));
            }
        }
    }
    Ok(out)
}

const CHART_WIDTH: f64 = 800.0;
const ROW_HEIGHT: f64 = 40.0;
const LABEL_WIDTH: f64 = 210.0;
const VALUE_WIDTH: f64 = 60.0;

/// Renders a horizontal bar chart of named importances as a static SVG 1.1
/// document (no scripts, no external references). Bars are sorted descending
/// and scaled linearly so the largest spans the full bar area.
pub fn render_importance_chart(importances: &[(String, f64)]) -> Result<String> {
    if importances.is_empty() {
        return Err(Error::Chart("no importances to draw".into()));
    }
    for (name, value) in importances {
        if !value.is_finite() || *value < 0.0 {
            return Err(Error::Chart(format!(
                "importance '{name}' must be finite and >= 0, got {value}"
            )));
        }
    }
    let mut sorted = importances.to_vec();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let max = sorted[0].1.max(f64::MIN_POSITIVE);
    let bar_area = CHART_WIDTH - LABEL_WIDTH - VALUE_WIDTH;
    let height = ROW_HEIGHT * sorted.len() as f64;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{CHART_WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {CHART_WIDTH} {height}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (row, (name, value)) in sorted.iter().enumerate() {
        let y = row as f64 * ROW_HEIGHT;
        let bar = value / max * bar_area;
        let mid = y + ROW_HEIGHT / 2.0;
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" \
             dominant-baseline=\"middle\" text-anchor=\"end\">{}</text>\n",
            LABEL_WIDTH - 10.0,
            mid,
            escape_xml(name)
        ));
        svg.push_str(&format!(
            "  <rect x=\"{LABEL_WIDTH:.2}\" y=\"{:.2}\" width=\"{bar:.2}\" height=\"{:.2}\" \
             fill=\"#4878a8\"/>\n",
            y + 8.0,
            ROW_HEIGHT - 16.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{mid:.2}\" font-family=\"sans-serif\" font-size=\"14\" \
             dominant-baseline=\"middle\">{value:.2}</text>\n",
            LABEL_WIDTH + bar + 6.0
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders the chart and writes it atomically to `path`.
pub fn write_importance_chart(importances: &[(String, f64)], path: &Path) -> Result<()> {
    let svg = render_importance_chart(importances)?;
    write_atomic(path, svg.as_bytes())
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Reproducibility metadata stored alongside results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub config_digest: String,
    pub timestamp: String,
}

/// The on-disk results document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultsFile {
    pub metadata: RunMetadata,
    pub results: Vec<ExperimentResult>,
}

/// Serializes results (stable key order, full-precision numbers) and writes
/// them atomically: the file appears complete or not at all.
pub fn write_results_json(
    results: &[ExperimentResult],
    metadata: &RunMetadata,
    path: &Path,
) -> Result<()> {
    let doc = ResultsFile {
        metadata: metadata.clone(),
        results: results.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_results_json(path: &Path) -> Result<ResultsFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("bad results file: {e}")))
}

/// Serializes a dataset in the input CSV format (header row, then one row
/// per sample, target last). Numbers use the shortest round-trip decimal.
pub fn csv_string(ds: &Dataset) -> String {
    let mut out = String::new();
    for name in ds.feature_names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str(ds.target_name());
    out.push('\n');
    for r in 0..ds.n() {
        for v in ds.features().row(r) {
            out.push_str(&v.to_string());
            out.push(',');
        }
        out.push_str(&ds.target()[r].to_string());
        out.push('\n');
    }
    out
}

/// Writes a dataset as CSV, atomically.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<()> {
    write_atomic(path, csv_string(ds).as_bytes())
}

/// Write-to-temp-then-rename so readers never observe partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
