//! OHLC ingestion, min-max scaling, next-day windowing and chronological
//! train/test splitting.
//!
//! CSV input is UTF-8 with the header `date,open,high,low,close` (columns may
//! appear in any order), ISO-8601 dates, `.` as decimal point and LF or CRLF
//! line endings. Consecutive records are consecutive trade days; gaps for
//! weekends and holidays are not interpolated.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Column {
    Open,
    High,
    Low,
    Close,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::Open, Column::High, Column::Low, Column::Close];

    pub fn name(self) -> &'static str {
        match self {
            Column::Open => "open",
            Column::High => "high",
            Column::Low => "low",
            Column::Close => "close",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" => Ok(Column::Open),
            "high" => Ok(Column::High),
            "low" => Ok(Column::Low),
            "close" => Ok(Column::Close),
            other => Err(Error::InvalidArgument(format!("unknown column {other:?}"))),
        }
    }
}

/// Feature set used for the Nasdaq-100 style configuration (d = 3).
pub const NASDAQ_FEATURES: [Column; 3] = [Column::Open, Column::Low, Column::High];
/// Feature set used for the NIFTY style configuration (d = 4).
pub const NIFTY_FEATURES: [Column; 4] = [Column::Open, Column::Low, Column::High, Column::Close];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhlcRecord {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
}

impl OhlcRecord {
    pub fn get(&self, column: Column) -> f64 {
        match column {
            Column::Open => self.open,
            Column::High => self.high,
            Column::Low => self.low,
            Column::Close => self.close,
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        let vals = [self.open, self.high, self.low, self.close];
        if vals.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err("values must be finite and positive".into());
        }
        let top = self.open.max(self.close);
        let bottom = self.open.min(self.close);
        if self.high < top || self.low > bottom {
            return Err(format!(
                "inconsistent quote (open {}, high {}, low {}, close {})",
                self.open, self.high, self.low, self.close
            ));
        }
        Ok(())
    }
}

/// Dated series for one index, stored column-wise.
///
/// Frames built from records satisfy the OHLC ordering invariants; scaled
/// frames (from [`apply_scale`]) only keep the scaled columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFrame {
    index_name: String,
    dates: Vec<NaiveDate>,
    columns: BTreeMap<Column, Vec<f64>>,
}

impl TimeSeriesFrame {
    pub fn from_records(index_name: impl Into<String>, records: &[OhlcRecord]) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            r.check()
                .map_err(|e| Error::Csv(format!("record {} ({}): {e}", i + 1, r.date)))?;
            if i > 0 && records[i - 1].date >= r.date {
                return Err(Error::Csv(format!("dates not strictly increasing at {}", r.date)));
            }
        }
        let columns = Column::ALL
            .iter()
            .map(|&c| (c, records.iter().map(|r| r.get(c)).collect()))
            .collect();
        Ok(Self {
            index_name: index_name.into(),
            dates: records.iter().map(|r| r.date).collect(),
            columns,
        })
    }

    pub fn index_name(&self) -> &str {
        &self.index_name
    }

    pub fn with_index_name(mut self, name: impl Into<String>) -> Self {
        self.index_name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn column(&self, column: Column) -> Option<&[f64]> {
        self.columns.get(&column).map(Vec::as_slice)
    }

    fn require(&self, column: Column) -> Result<&[f64]> {
        self.column(column)
            .ok_or_else(|| Error::InvalidArgument(format!("column {column} not present in frame")))
    }

    /// Full OHLC record at `i`, if all four columns are present.
    pub fn record(&self, i: usize) -> Option<OhlcRecord> {
        Some(OhlcRecord {
            date: *self.dates.get(i)?,
            open: self.column(Column::Open)?[i],
            high: self.column(Column::High)?[i],
            low: self.column(Column::Low)?[i],
            close: self.column(Column::Close)?[i],
        })
    }

    /// First `n` records.
    pub fn head(&self, n: usize) -> TimeSeriesFrame {
        let n = n.min(self.len());
        TimeSeriesFrame {
            index_name: self.index_name.clone(),
            dates: self.dates[..n].to_vec(),
            columns: self.columns.iter().map(|(c, v)| (*c, v[..n].to_vec())).collect(),
        }
    }
}

/// Parses an OHLC CSV stream.
pub fn load_ohlc_csv<R: Read>(source: R, index_name: &str) -> Result<TimeSeriesFrame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();

    let mut slots: BTreeMap<&str, usize> = BTreeMap::new();
    let mut unknown = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        match h {
            "date" | "open" | "high" | "low" | "close" => {
                if slots.insert(h, i).is_some() {
                    return Err(Error::Csv(format!("duplicate column {h:?}")));
                }
            }
            other => unknown.push(other.to_string()),
        }
    }
    if !unknown.is_empty() {
        return Err(Error::Csv(format!("unknown columns: {}", unknown.join(", "))));
    }
    let missing: Vec<&str> = ["date", "open", "high", "low", "close"]
        .into_iter()
        .filter(|c| !slots.contains_key(c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Csv(format!("missing columns: {}", missing.join(", "))));
    }

    let mut records: Vec<OhlcRecord> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |name: &str| row.get(slots[name]).unwrap_or("");
        let number = |name: &str| -> Result<f64> {
            let raw = field(name);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Csv(format!("line {line}: bad {name} value {raw:?}")))
        };
        let date = NaiveDate::parse_from_str(field("date"), DATE_FORMAT)
            .map_err(|_| Error::Csv(format!("line {line}: bad date {:?}", field("date"))))?;
        let rec = OhlcRecord {
            date,
            open: number("open")?,
            high: number("high")?,
            low: number("low")?,
            close: number("close")?,
        };
        if let Some(prev) = records.last() {
            if prev.date >= rec.date {
                return Err(Error::Csv(format!(
                    "line {line}: date {} does not follow {}",
                    rec.date, prev.date
                )));
            }
        }
        rec.check().map_err(|e| Error::Csv(format!("line {line}: {e}")))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Csv("no data rows".into()));
    }
    TimeSeriesFrame::from_records(index_name, &records)
}

/// Writes a frame holding all four OHLC columns in the canonical layout.
pub fn write_ohlc_csv<W: Write>(frame: &TimeSeriesFrame, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let fail = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["date", "open", "high", "low", "close"]).map_err(fail)?;
    for i in 0..frame.len() {
        let r = frame
            .record(i)
            .ok_or_else(|| Error::InvalidArgument("frame lacks OHLC columns".into()))?;
        w.write_record([
            r.date.format(DATE_FORMAT).to_string(),
            r.open.to_string(),
            r.high.to_string(),
            r.low.to_string(),
            r.close.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Per-column min/max of a min-max scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub ranges: BTreeMap<Column, (f64, f64)>,
}

impl ScalerParams {
    fn range(&self, column: Column) -> Result<(f64, f64)> {
        self.ranges
            .get(&column)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("column {column} was not fitted by the scaler")))
    }

    pub fn scale(&self, column: Column, v: f64) -> Result<f64> {
        let (lo, hi) = self.range(column)?;
        Ok((v - lo) / (hi - lo))
    }

    pub fn unscale(&self, column: Column, v: f64) -> Result<f64> {
        let (lo, hi) = self.range(column)?;
        Ok(v * (hi - lo) + lo)
    }
}

pub fn fit_scaler(frame: &TimeSeriesFrame, columns: &[Column]) -> Result<ScalerParams> {
    if frame.is_empty() {
        return Err(Error::InvalidArgument("cannot fit scaler on empty frame".into()));
    }
    let mut ranges = BTreeMap::new();
    for &c in columns {
        let vals = frame.require(c)?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "column {c} is constant ({lo}); cannot scale"
            )));
        }
        ranges.insert(c, (lo, hi));
    }
    Ok(ScalerParams { ranges })
}

/// Scales every fitted column to `(v - min) / (max - min)`; unfitted columns
/// are dropped. Values outside the fitted range extrapolate linearly.
pub fn apply_scale(frame: &TimeSeriesFrame, params: &ScalerParams) -> Result<TimeSeriesFrame> {
    let mut columns = BTreeMap::new();
    for &c in params.ranges.keys() {
        let vals = frame.require(c)?;
        let scaled = vals.iter().map(|&v| params.scale(c, v)).collect::<Result<Vec<_>>>()?;
        columns.insert(c, scaled);
    }
    Ok(TimeSeriesFrame {
        index_name: frame.index_name.clone(),
        dates: frame.dates.clone(),
        columns,
    })
}

pub fn invert_scale(values: &[f64], params: &ScalerParams, column: Column) -> Result<Vec<f64>> {
    values.iter().map(|&v| params.unscale(column, v)).collect()
}

/// Feature rows paired with targets `horizon` trade days later.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedDataset {
    pub x: Matrix,
    pub t: Vec<f64>,
    pub feature_names: Vec<String>,
    pub horizon: usize,
    /// Date of each feature row.
    pub feature_dates: Vec<NaiveDate>,
    /// Date each target refers to.
    pub target_dates: Vec<NaiveDate>,
}

impl SupervisedDataset {
    /// Dataset without dates, for synthetic problems and tests.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], t: Vec<f64>) -> Result<Self> {
        let x = Matrix::from_rows(rows)?;
        if x.rows() != t.len() {
            return Err(Error::Dimension(format!(
                "{} feature rows but {} targets",
                x.rows(),
                t.len()
            )));
        }
        if t.is_empty() {
            return Err(Error::InvalidArgument("dataset must have at least one row".into()));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset target".into()));
        }
        let d = x.cols();
        let n = t.len();
        let base = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
        let dates: Vec<NaiveDate> = (0..=n as u64).map(|i| base + chrono::Days::new(i)).collect();
        Ok(Self {
            x,
            t,
            feature_names: (0..d).map(|i| format!("x{i}")).collect(),
            horizon: 1,
            feature_dates: dates[..n].to_vec(),
            target_dates: dates[1..].to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.x.row(i)
    }

    fn slice(&self, range: std::ops::Range<usize>) -> SupervisedDataset {
        let d = self.dim();
        let data = self.x.data()[range.start * d..range.end * d].to_vec();
        SupervisedDataset {
            x: Matrix::new(range.len(), d, data).expect("slice of valid matrix"),
            t: self.t[range.clone()].to_vec(),
            feature_names: self.feature_names.clone(),
            horizon: self.horizon,
            feature_dates: self.feature_dates[range.clone()].to_vec(),
            target_dates: self.target_dates[range].to_vec(),
        }
    }

    /// Appends `other` after `self`.
    pub fn concat(&self, other: &SupervisedDataset) -> Result<SupervisedDataset> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("concatenating datasets of different width".into()));
        }
        let mut data = self.x.data().to_vec();
        data.extend_from_slice(other.x.data());
        Ok(SupervisedDataset {
            x: Matrix::new(self.len() + other.len(), self.dim(), data)?,
            t: self.t.iter().chain(&other.t).copied().collect(),
            feature_names: self.feature_names.clone(),
            horizon: self.horizon,
            feature_dates: self.feature_dates.iter().chain(&other.feature_dates).copied().collect(),
            target_dates: self.target_dates.iter().chain(&other.target_dates).copied().collect(),
        })
    }
}

/// Row `i` holds `feature_columns` of day `i`; its target is `target_column`
/// of day `i + horizon`.
pub fn make_supervised(
    frame: &TimeSeriesFrame,
    feature_columns: &[Column],
    target_column: Column,
    horizon: usize,
) -> Result<SupervisedDataset> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    if feature_columns.is_empty() {
        return Err(Error::InvalidArgument("at least one feature column is required".into()));
    }
    if horizon >= frame.len() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} needs more than {} records",
            frame.len()
        )));
    }
    let n = frame.len() - horizon;
    let features = feature_columns
        .iter()
        .map(|&c| frame.require(c))
        .collect::<Result<Vec<_>>>()?;
    let target = frame.require(target_column)?;

    let mut data = Vec::with_capacity(n * features.len());
    for i in 0..n {
        data.extend(features.iter().map(|col| col[i]));
    }
    Ok(SupervisedDataset {
        x: Matrix::new(n, features.len(), data)?,
        t: target[horizon..].to_vec(),
        feature_names: feature_columns.iter().map(|c| c.name().to_string()).collect(),
        horizon,
        feature_dates: frame.dates[..n].to_vec(),
        target_dates: frame.dates[horizon..].to_vec(),
    })
}

/// Number of training rows for `n` rows at `train_fraction`: `⌈fraction·n⌉`.
pub fn train_rows(n: usize, train_fraction: f64) -> Result<usize> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let k = (train_fraction * n as f64).ceil() as usize;
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} on {n} rows leaves an empty side ({k}/{})",
            n.saturating_sub(k)
        )));
    }
    Ok(k)
}

/// First `⌈fraction·n⌉` rows train, the rest test; order is preserved.
pub fn chrono_split(
    dataset: &SupervisedDataset,
    train_fraction: f64,
) -> Result<(SupervisedDataset, SupervisedDataset)> {
    if dataset.len() < 2 {
        return Err(Error::InvalidArgument("split needs at least 2 rows".into()));
    }
    let k = train_rows(dataset.len(), train_fraction)?;
    Ok((dataset.slice(0..k), dataset.slice(k..dataset.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GOOD: &str = "date,open,high,low,close\n\
        2001-01-02,10,12,9,11\n\
        2001-01-03,11,13,10,12\n\
        2001-01-04,12,14,11,13\n";

    fn closes(vals: &[f64]) -> TimeSeriesFrame {
        let base = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let recs: Vec<OhlcRecord> = vals
            .iter()
            .enumerate()
            .map(|(i, &c)| OhlcRecord {
                date: base + chrono::Days::new(i as u64),
                open: c,
                high: c,
                low: c,
                close: c,
            })
            .collect();
        TimeSeriesFrame::from_records("t", &recs).unwrap()
    }

    #[test]
    fn loads_well_formed_csv() {
        let f = load_ohlc_csv(GOOD.as_bytes(), "x").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.column(Column::Close).unwrap(), &[11.0, 12.0, 13.0]);
        let crlf = GOOD.replace('\n', "\r\n");
        assert_eq!(load_ohlc_csv(crlf.as_bytes(), "x").unwrap(), f);
    }

    #[test]
    fn reordered_header_is_accepted() {
        let src = "close,low,high,open,date\n11,9,12,10,2001-01-02\n";
        let f = load_ohlc_csv(src.as_bytes(), "x").unwrap();
        assert_eq!(f.record(0).unwrap().open, 10.0);
    }

    #[test]
    fn missing_columns_are_named() {
        let err = load_ohlc_csv("date,open,close\n2001-01-02,1,1\n".as_bytes(), "x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("high") && msg.contains("low"), "{msg}");
    }

    #[test]
    fn unknown_column_rejected() {
        let src = "date,open,high,low,close,volume\n2001-01-02,10,12,9,11,5\n";
        assert!(load_ohlc_csv(src.as_bytes(), "x")
            .unwrap_err()
            .to_string()
            .contains("volume"));
    }

    #[test]
    fn repeated_date_cites_date() {
        let src = "date,open,high,low,close\n2001-01-02,10,12,9,11\n2001-01-02,10,12,9,11\n";
        let msg = load_ohlc_csv(src.as_bytes(), "x").unwrap_err().to_string();
        assert!(msg.contains("2001-01-02"), "{msg}");
    }

    #[test]
    fn bad_number_and_empty_body() {
        let src = "date,open,high,low,close\n2001-01-02,10,1x,9,11\n";
        assert!(load_ohlc_csv(src.as_bytes(), "x").is_err());
        assert!(load_ohlc_csv("date,open,high,low,close\n".as_bytes(), "x").is_err());
        let inconsistent = "date,open,high,low,close\n2001-01-02,10,9,8,9.5\n";
        assert!(load_ohlc_csv(inconsistent.as_bytes(), "x").is_err());
    }

    #[test]
    fn csv_write_read_round_trip() {
        let f = load_ohlc_csv(GOOD.as_bytes(), "x").unwrap();
        let mut buf = Vec::new();
        write_ohlc_csv(&f, &mut buf).unwrap();
        assert_eq!(load_ohlc_csv(buf.as_slice(), "x").unwrap(), f);
    }

    #[test]
    fn scaler_fit_and_apply() {
        let f = closes(&[0.5, 5.0, 10.0]);
        let p = fit_scaler(&f, &[Column::Close]).unwrap();
        assert_eq!(p.ranges[&Column::Close], (0.5, 10.0));
        let f = closes(&[1.0, 6.0, 11.0]);
        let p = fit_scaler(&f, &[Column::Close, Column::Open]).unwrap();
        let s = apply_scale(&f, &p).unwrap();
        assert_eq!(s.column(Column::Close).unwrap(), &[0.0, 0.5, 1.0]);
        assert!(s.column(Column::High).is_none());
        assert_eq!(p.scale(Column::Close, 21.0).unwrap(), 2.0);
    }

    #[test]
    fn scaler_independent_columns() {
        let recs = [
            OhlcRecord {
                date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                open: 1.0,
                high: 5.0,
                low: 1.0,
                close: 2.0,
            },
            OhlcRecord {
                date: NaiveDate::from_ymd_opt(2020, 1, 2).unwrap(),
                open: 3.0,
                high: 9.0,
                low: 2.0,
                close: 4.0,
            },
        ];
        let f = TimeSeriesFrame::from_records("x", &recs).unwrap();
        let p = fit_scaler(&f, &[Column::Open, Column::High]).unwrap();
        assert_eq!(p.ranges[&Column::Open], (1.0, 3.0));
        assert_eq!(p.ranges[&Column::High], (5.0, 9.0));
    }

    #[test]
    fn constant_column_rejected() {
        let f = closes(&[7.0, 7.0, 7.0]);
        assert!(fit_scaler(&f, &[Column::Close]).is_err());
    }

    #[test]
    fn invert_unknown_column() {
        let f = closes(&[1.0, 2.0]);
        let p = fit_scaler(&f, &[Column::Close]).unwrap();
        assert!(invert_scale(&[0.5], &p, Column::Open).is_err());
    }

    #[test]
    fn supervised_windowing() {
        let f = closes(&[1.0, 2.0, 3.0]);
        let ds = make_supervised(&f, &[Column::Close], Column::Close, 1).unwrap();
        assert_eq!(ds.x.data(), &[1.0, 2.0]);
        assert_eq!(ds.t, vec![2.0, 3.0]);
        let f5 = closes(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(
            make_supervised(&f5, &[Column::Open], Column::Close, 1).unwrap().len(),
            4
        );
        assert!(make_supervised(&f5, &[Column::Open], Column::Close, 5).is_err());
    }

    #[test]
    fn split_counts() {
        let f = closes(&(1..=11).map(f64::from).collect::<Vec<_>>());
        let ds = make_supervised(&f, &[Column::Close], Column::Close, 1).unwrap();
        let (a, b) = chrono_split(&ds, 0.5).unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        let f = closes(&(1..=10).map(f64::from).collect::<Vec<_>>());
        let ds = make_supervised(&f, &[Column::Close], Column::Close, 1).unwrap();
        let (a, b) = chrono_split(&ds, 0.5).unwrap();
        assert_eq!((a.len(), b.len()), (5, 4));
        let f = closes(&[1.0, 2.0, 3.0]);
        let ds = make_supervised(&f, &[Column::Close], Column::Close, 1).unwrap();
        assert!(chrono_split(&ds, 0.999).is_err());
        assert!(chrono_split(&ds, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn split_concat_identity(n in 3usize..60, frac in 0.05f64..0.95, h in 1usize..3) {
            let f = closes(&(0..n).map(|i| 1.0 + i as f64).collect::<Vec<_>>());
            let ds = make_supervised(&f, &[Column::Open, Column::Close], Column::Close, h).unwrap();
            if let Ok((a, b)) = chrono_split(&ds, frac) {
                prop_assert_eq!(a.concat(&b).unwrap(), ds.clone());
            }
            for (fd, td) in ds.feature_dates.iter().zip(&ds.target_dates) {
                prop_assert!(td > fd);
            }
        }

        #[test]
        fn scale_round_trip(vals in proptest::collection::vec(-1e6f64..1e6, 1..40)) {
            let p = ScalerParams { ranges: [(Column::Close, (-3.0, 17.5))].into_iter().collect() };
            for v in vals {
                let back = p.unscale(Column::Close, p.scale(Column::Close, v).unwrap()).unwrap();
                prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
