use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use super::{business_days, CdsSeries, ShockEvent, YEAR_DAYS};

/// Shock size that counts toward a crisis.
pub const CRISIS_SHOCK_BPS: f64 = 250.0;
/// Share of active names, in percent, that makes a crisis.
pub const CRISIS_MIN_PCT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrisisDay {
    pub date: NaiveDate,
    pub active: usize,
    /// Active names with an event in the trailing year.
    pub shocked: usize,
    /// `None` when no name is active.
    pub pct_shocked: Option<f64>,
    pub crisis: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrisisCalendar {
    pub min_pct: f64,
    /// Every weekday between the earliest and latest series date.
    pub days: Vec<CrisisDay>,
}

impl CrisisCalendar {
    pub fn day(&self, date: NaiveDate) -> Option<&CrisisDay> {
        self.days
            .binary_search_by(|d| d.date.cmp(&date))
            .ok()
            .map(|i| &self.days[i])
    }

    /// False for dates off the calendar or without active names.
    pub fn is_crisis(&self, date: NaiveDate) -> bool {
        self.day(date).and_then(|d| d.crisis).unwrap_or(false)
    }

    pub fn crisis_dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days.iter().filter(|d| d.crisis == Some(true)).map(|d| d.date)
    }

    pub fn undefined_dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.days.iter().filter(|d| d.crisis.is_none()).map(|d| d.date)
    }
}

/// Flags dates where at least `min_pct` percent of active names had an event
/// within the trailing year, `(date - 1y, date]`.
///
/// A name is active from its first to its last prepared date. Events should
/// come from a single detection threshold.
pub fn detect_crises(events: &[ShockEvent], corpus: &[CdsSeries], min_pct: f64) -> CrisisCalendar {
    let (Some(first), Some(last)) = (
        corpus.iter().map(CdsSeries::first_date).min(),
        corpus.iter().map(CdsSeries::last_date).max(),
    ) else {
        return CrisisCalendar {
            min_pct,
            days: Vec::new(),
        };
    };
    let grid = business_days(first, last);
    let idx = |d: NaiveDate| grid.partition_point(|&g| g < d);

    let mut by_name: BTreeMap<&str, Vec<NaiveDate>> = BTreeMap::new();
    for e in events {
        by_name.entry(e.name.as_str()).or_default().push(e.date);
    }

    // difference arrays over grid indices
    let mut active = vec![0i64; grid.len() + 1];
    let mut shocked = vec![0i64; grid.len() + 1];
    for s in corpus {
        let (a, b) = (idx(s.first_date()), idx(s.last_date()).min(grid.len() - 1));
        let b = if grid[b] > s.last_date() { b - 1 } else { b };
        if a > b {
            continue;
        }
        active[a] += 1;
        active[b + 1] -= 1;
        let mut dates = by_name.get(s.name()).cloned().unwrap_or_default();
        dates.sort();
        dates.dedup();
        // each event covers grid dates within a year on or after it
        let mut covered: Vec<(usize, usize)> = Vec::new();
        for e in dates {
            let lo = idx(e).max(a);
            let hi = grid
                .partition_point(|&g| ((g - e).num_days() as f64) < YEAR_DAYS)
                .min(b + 1);
            if lo >= hi {
                continue;
            }
            match covered.last_mut() {
                Some(prev) if lo <= prev.1 => prev.1 = prev.1.max(hi),
                _ => covered.push((lo, hi)),
            }
        }
        for (lo, hi) in covered {
            shocked[lo] += 1;
            shocked[hi] -= 1;
        }
    }

    let (mut act, mut sh) = (0i64, 0i64);
    let days = grid
        .iter()
        .enumerate()
        .map(|(i, &date)| {
            act += active[i];
            sh += shocked[i];
            let pct = (act > 0).then(|| 100.0 * sh as f64 / act as f64);
            CrisisDay {
                date,
                active: act as usize,
                shocked: sh as usize,
                pct_shocked: pct,
                crisis: pct.map(|p| p >= min_pct),
            }
        })
        .collect();
    CrisisCalendar { min_pct, days }
}
