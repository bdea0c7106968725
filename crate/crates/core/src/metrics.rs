//! Forecast evaluation statistics.
//!
//! MAP divides by the *predicted* value and MAPE by the *actual* value; the
//! two percentages are therefore not symmetric in their arguments.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalStats {
    pub rmse: f64,
    pub map: f64,
    pub mape: f64,
    /// `None` when either series has zero variance.
    pub corr: Option<f64>,
    pub n_days: usize,
}

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Dimension(format!(
            "{} actual values vs {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::InvalidArgument("empty series".into()));
    }
    Ok(())
}

/// `sqrt(mean((a - p)²))`.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sse: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok((sse / actual.len() as f64).sqrt())
}

/// Maximum absolute percentage error, `max |a - p| / p · 100`.
pub fn map_metric(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mut worst = 0.0f64;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *p == 0.0 {
            return Err(Error::InvalidArgument(format!("predicted value on day {i} is zero")));
        }
        // |p| keeps the percentage non-negative for negative forecasts
        worst = worst.max(100.0 * (a - p).abs() / p.abs());
    }
    Ok(worst)
}

/// Mean absolute percentage error, `mean |a - p| / a · 100`.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mut total = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *a == 0.0 {
            return Err(Error::InvalidArgument(format!("actual value on day {i} is zero")));
        }
        total += 100.0 * (a - p).abs() / a.abs();
    }
    Ok(total / actual.len() as f64)
}

/// Sample Pearson correlation; `Ok(None)` when either series is constant.
pub fn pearson_corr(actual: &[f64], predicted: &[f64]) -> Result<Option<f64>> {
    check_pair(actual, predicted)?;
    if actual.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least 2 days".into()));
    }
    let n = actual.len() as f64;
    let ma = actual.iter().sum::<f64>() / n;
    let mp = predicted.iter().sum::<f64>() / n;
    let (mut sap, mut saa, mut spp) = (0.0, 0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let (da, dp) = (a - ma, p - mp);
        sap += da * dp;
        saa += da * da;
        spp += dp * dp;
    }
    if saa == 0.0 || spp == 0.0 {
        return Ok(None);
    }
    Ok(Some((sap / (saa.sqrt() * spp.sqrt())).clamp(-1.0, 1.0)))
}

/// RMSE on one pair of series and MAP/MAPE/correlation on another.
///
/// The harness passes scaled values for the first pair and raw index values
/// for the second.
pub fn evaluate(
    scaled_actual: &[f64],
    scaled_predicted: &[f64],
    raw_actual: &[f64],
    raw_predicted: &[f64],
) -> Result<EvalStats> {
    Ok(EvalStats {
        rmse: rmse(scaled_actual, scaled_predicted)?,
        map: map_metric(raw_actual, raw_predicted)?,
        mape: mape(raw_actual, raw_predicted)?,
        corr: if raw_actual.len() >= 2 {
            pearson_corr(raw_actual, raw_predicted)?
        } else {
            None
        },
        n_days: raw_actual.len(),
    })
}
