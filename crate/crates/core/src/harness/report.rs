//! Evaluation report rows and their CSV / text renderings.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const REPORT_HEADER: [&str; 8] = [
    "model",
    "dataset",
    "phase",
    "rmse_scaled",
    "map",
    "mape",
    "corr",
    "train_seconds",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Train,
    Test,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Train => "train",
            Phase::Test => "test",
        })
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Phase::Train),
            "test" => Ok(Phase::Test),
            _ => Err(Error::Csv(format!("unknown phase {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub dataset: String,
    pub phase: Phase,
    pub rmse_scaled: f64,
    pub map: f64,
    pub mape: f64,
    pub corr: Option<f64>,
    pub train_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    pub fn find(&self, model: &str, dataset: &str, phase: Phase) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.dataset == dataset && r.phase == phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

fn corr_cell(c: Option<f64>) -> String {
    c.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn emit_report(report: &EvalReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Text => Ok(emit_text(report)),
    }
}

fn emit_csv(report: &EvalReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(REPORT_HEADER).map_err(fail)?;
    for r in &report.rows {
        w.write_record([
            r.model.clone(),
            r.dataset.clone(),
            r.phase.to_string(),
            r.rmse_scaled.to_string(),
            r.map.to_string(),
            r.mape.to_string(),
            corr_cell(r.corr),
            r.train_seconds.to_string(),
        ])
        .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

/// Per dataset: train/test RMSE per model, then test-set statistics.
fn emit_text(report: &EvalReport) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    let mut models: Vec<&str> = Vec::new();
    for r in &report.rows {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    let cell = |v: Option<f64>, prec: usize| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.prec$}"));
    let mut out = String::new();
    for ds in &datasets {
        let _ = writeln!(out, "dataset: {ds}");
        let _ = writeln!(
            out,
            "  {:<8} {:>12} {:>12} {:>10}",
            "model", "train rmse", "test rmse", "train s"
        );
        for m in &models {
            let tr = report.find(m, ds, Phase::Train);
            let te = report.find(m, ds, Phase::Test);
            if tr.is_none() && te.is_none() {
                continue;
            }
            let _ = writeln!(
                out,
                "  {:<8} {:>12} {:>12} {:>10}",
                m,
                cell(tr.map(|r| r.rmse_scaled), 5),
                cell(te.map(|r| r.rmse_scaled), 5),
                cell(tr.or(te).map(|r| r.train_seconds), 3),
            );
        }
        let _ = writeln!(out, "  {:<8} {:>12} {:>12} {:>12}", "test", "corr", "MAP %", "MAPE %");
        for m in &models {
            if let Some(te) = report.find(m, ds, Phase::Test) {
                let _ = writeln!(
                    out,
                    "  {:<8} {:>12} {:>12} {:>12}",
                    m,
                    cell(te.corr, 4),
                    cell(Some(te.map), 3),
                    cell(Some(te.mape), 3),
                );
            }
        }
        out.push('\n');
    }
    out
}

/// Reads a report back from its CSV rendering.
pub fn parse_report_csv(text: &str) -> Result<EvalReport> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?;
    if header.iter().ne(REPORT_HEADER) {
        return Err(Error::Csv(format!("unexpected report header {header:?}")));
    }
    let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::Csv(format!("bad number {s:?}"))) };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        rows.push(ReportRow {
            model: rec[0].to_string(),
            dataset: rec[1].to_string(),
            phase: rec[2].parse()?,
            rmse_scaled: num(&rec[3])?,
            map: num(&rec[4])?,
            mape: num(&rec[5])?,
            corr: if &rec[6] == "NA" { None } else { Some(num(&rec[6])?) },
            train_seconds: num(&rec[7])?,
        });
    }
    Ok(EvalReport { rows })
}
