use std::collections::HashMap;

use chrono::NaiveDate;
use serde::Serialize;

use super::quantile::{median, quantile_sorted};
use super::{CdsSeries, CrisisCalendar, ShockEvent, YEAR_DAYS};

/// Relative half-width of the window around each horizon.
pub const HORIZON_BAND: f64 = 0.05;

/// Change from `CDS(t)` to the median spread over
/// `[t + 0.95h, t + 1.05h)`, `h` in years. Negative values mean the spread
/// came back down.
///
/// `None` when `shock_date` is not a series date or the series ends before
/// `t + 1.05h`.
pub fn recovery_change(series: &CdsSeries, shock_date: NaiveDate, horizon_years: f64) -> Option<f64> {
    let at_shock = series.spread_on(shock_date)?;
    let lo = (1.0 - HORIZON_BAND) * horizon_years * YEAR_DAYS;
    let hi = (1.0 + HORIZON_BAND) * horizon_years * YEAR_DAYS;
    if ((series.last_date() - shock_date).num_days() as f64) < hi {
        return None;
    }
    let window: Vec<f64> = series
        .dates()
        .iter()
        .zip(series.spreads())
        .filter(|(u, _)| {
            let lag = (**u - shock_date).num_days() as f64;
            lo <= lag && lag < hi
        })
        .map(|(_, v)| *v)
        .collect();
    Some(median(&window)? - at_shock)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryCell {
    /// Events contributing to the cell.
    pub count: usize,
    /// One value per requested quantile; empty when `count` is zero.
    pub quantiles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryTable {
    pub thresholds_bps: Vec<f64>,
    pub horizons_years: Vec<f64>,
    pub quantile_levels: Vec<f64>,
    /// Indexed `[threshold][horizon]`.
    pub cells: Vec<Vec<RecoveryCell>>,
}

impl RecoveryTable {
    pub fn cell(&self, threshold_bps: f64, horizon_years: f64) -> Option<&RecoveryCell> {
        let i = self.thresholds_bps.iter().position(|&t| t == threshold_bps)?;
        let j = self.horizons_years.iter().position(|&h| h == horizon_years)?;
        Some(&self.cells[i][j])
    }
}

/// Quantiles of [`recovery_change`] over events dated in a crisis period,
/// per threshold and horizon.
///
/// `events` may hold events from several thresholds; each row uses those
/// whose `threshold_bps` matches. Events of names missing from `corpus`
/// are ignored.
pub fn recovery_quantile_table(
    events: &[ShockEvent],
    corpus: &[CdsSeries],
    calendar: &CrisisCalendar,
    thresholds_bps: &[f64],
    horizons_years: &[f64],
    quantile_levels: &[f64],
) -> RecoveryTable {
    let by_name: HashMap<&str, &CdsSeries> = corpus.iter().map(|s| (s.name(), s)).collect();
    let cells = thresholds_bps
        .iter()
        .map(|&thr| {
            let selected: Vec<(&CdsSeries, NaiveDate)> = events
                .iter()
                .filter(|e| e.threshold_bps == thr && calendar.is_crisis(e.date))
                .filter_map(|e| by_name.get(e.name.as_str()).map(|s| (*s, e.date)))
                .collect();
            horizons_years
                .iter()
                .map(|&h| {
                    let mut changes: Vec<f64> =
                        selected.iter().filter_map(|(s, t)| recovery_change(s, *t, h)).collect();
                    changes.sort_by(f64::total_cmp);
                    let quantiles = quantile_levels
                        .iter()
                        .filter_map(|&p| quantile_sorted(&changes, p))
                        .collect();
                    RecoveryCell {
                        count: changes.len(),
                        quantiles,
                    }
                })
                .collect()
        })
        .collect();
    RecoveryTable {
        thresholds_bps: thresholds_bps.to_vec(),
        horizons_years: horizons_years.to_vec(),
        quantile_levels: quantile_levels.to_vec(),
        cells,
    }
}
