//! Synthetic OHLC series driven by the logistic map.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataio::{OhlcRecord, TimeSeriesFrame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub days: usize,
    pub seed: u64,
    /// Logistic map growth rate.
    pub r: f64,
    pub base_level: f64,
    pub amplitude: f64,
    /// Relative open-price jitter around the close.
    pub open_jitter: f64,
    /// Relative high/low envelope beyond open and close.
    pub envelope: f64,
}

impl SynthConfig {
    pub fn new(days: usize, seed: u64) -> Self {
        Self {
            days,
            seed,
            r: 3.9,
            base_level: 1000.0,
            amplitude: 1000.0,
            open_jitter: 0.002,
            envelope: 0.003,
        }
    }
}

pub fn first_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}

fn next_weekday(d: NaiveDate) -> NaiveDate {
    let mut n = d + Days::new(1);
    while matches!(n.weekday(), Weekday::Sat | Weekday::Sun) {
        n = n + Days::new(1);
    }
    n
}

/// Close follows `x ← r·x(1−x)` mapped to `base + amplitude·x`; open, high
/// and low are jittered around it. Dates are consecutive weekdays.
pub fn synth_ohlc(cfg: &SynthConfig) -> Result<TimeSeriesFrame> {
    if cfg.days < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 days, got {}",
            cfg.days
        )));
    }
    if !(cfg.r > 0.0 && cfg.r <= 4.0) {
        return Err(Error::InvalidArgument(format!("growth rate {} outside (0, 4]", cfg.r)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: f64 = rng.gen_range(0.1..0.9);
    let mut date = first_date();
    let mut records = Vec::with_capacity(cfg.days);
    for i in 0..cfg.days {
        if i > 0 {
            x = cfg.r * x * (1.0 - x);
            date = next_weekday(date);
        }
        let close = cfg.base_level + cfg.amplitude * x;
        let open = close * (1.0 + cfg.open_jitter * rng.gen_range(-1.0..=1.0));
        let high = open.max(close) * (1.0 + cfg.envelope * rng.gen_range(0.0..=1.0));
        let low = open.min(close) * (1.0 - cfg.envelope * rng.gen_range(0.0..=1.0));
        records.push(OhlcRecord {
            date,
            open,
            high,
            low,
            close,
        });
    }
    TimeSeriesFrame::from_records("synthetic", &records)
}
