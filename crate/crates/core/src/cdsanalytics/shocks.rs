use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use super::quantile::{quantile_sorted, SortedWindow};
use super::{CdsSeries, YEAR_DAYS};

/// Trailing-window quantile that sets the pre-shock level.
pub const BASELINE_QUANTILE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockEvent {
    pub name: String,
    pub date: NaiveDate,
    pub size_bps: f64,
    pub threshold_bps: f64,
}

/// Shock events of one prepared series.
///
/// At each date `t` with at least a year of history the shock size is
/// `CDS(t)` minus the 10% quantile of the spreads in `[t - 1y, t)`. The first
/// date reaching `threshold_bps` is an event, after which detection pauses
/// for a year.
pub fn detect_shocks(series: &CdsSeries, threshold_bps: f64) -> Vec<ShockEvent> {
    let dates = series.dates();
    let spreads = series.spreads();
    let first = series.first_date();
    let days = |a: NaiveDate, b: NaiveDate| (b - a).num_days() as f64;

    let mut events = Vec::new();
    let mut window = SortedWindow::default();
    // window holds indices [lo, i)
    let mut lo = 0;
    let mut last_event: Option<NaiveDate> = None;
    for (i, &t) in dates.iter().enumerate() {
        if i > 0 {
            window.insert(spreads[i - 1]);
        }
        while days(dates[lo], t) > YEAR_DAYS {
            window.remove(spreads[lo]);
            lo += 1;
        }
        if days(first, t) < YEAR_DAYS {
            continue;
        }
        if last_event.is_some_and(|e| days(e, t) < YEAR_DAYS) {
            continue;
        }
        let Some(base) = quantile_sorted(window.as_slice(), BASELINE_QUANTILE) else {
            continue;
        };
        let size = spreads[i] - base;
        if size >= threshold_bps {
            events.push(ShockEvent {
                name: series.name().to_string(),
                date: t,
                size_bps: size,
                threshold_bps,
            });
            last_event = Some(t);
        }
    }
    events
}

/// Events of every series at `threshold_bps`, ordered by name then date.
pub fn detect_shocks_all(corpus: &[CdsSeries], threshold_bps: f64) -> Vec<ShockEvent> {
    let mut events: Vec<ShockEvent> = corpus
        .par_iter()
        .flat_map_iter(|s| detect_shocks(s, threshold_bps))
        .collect();
    events.sort_by(|a, b| a.name.cmp(&b.name).then(a.date.cmp(&b.date)));
    events
}
