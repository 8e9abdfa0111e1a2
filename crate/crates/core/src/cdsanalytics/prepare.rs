use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use rayon::prelude::*;

use super::quantile::quantile_sorted;
use super::{is_business_day, year_fraction, CdsSeries, RawQuote, Region};

/// Names with less history than this are dropped.
pub const MIN_SPAN_YEARS: f64 = 2.1;
pub const MEDIAN_FILTER_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrepareReport {
    /// Sorted by name.
    pub series: Vec<CdsSeries>,
    /// Quotes whose region is not Asia, Europe or North America.
    pub quotes_outside_regions: usize,
    /// Names dropped for spanning less than [`MIN_SPAN_YEARS`].
    pub short_names: Vec<String>,
    /// Names quoted under more than one region; the first region seen wins.
    pub conflicting_regions: Vec<String>,
}

/// Weekdays from `from` to `to` inclusive.
pub fn business_days(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
    from.iter_days()
        .take_while(|d| *d <= to)
        .filter(|d| is_business_day(*d))
        .collect()
}

/// Centered rolling median over `points` values; windows shrink at the ends.
pub fn median_filter(values: &[f64], points: usize) -> Vec<f64> {
    let half = points / 2;
    let mut buf = Vec::with_capacity(points);
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            buf.clear();
            buf.extend_from_slice(&values[lo..hi]);
            buf.sort_by(f64::total_cmp);
            quantile_sorted(&buf, 0.5).unwrap()
        })
        .collect()
}

/// Linear interpolation in calendar days of `(date, value)` knots onto
/// `grid`, which must lie within the knot range.
fn interpolate(knots: &[(NaiveDate, f64)], grid: &[NaiveDate]) -> Vec<f64> {
    let mut j = 0;
    grid.iter()
        .map(|&d| {
            while j + 1 < knots.len() && knots[j + 1].0 <= d {
                j += 1;
            }
            let (d0, v0) = knots[j];
            if d0 == d || j + 1 == knots.len() {
                return v0;
            }
            let (d1, v1) = knots[j + 1];
            let w = (d - d0).num_days() as f64 / (d1 - d0).num_days() as f64;
            v0 + w * (v1 - v0)
        })
        .collect()
}

struct NameQuotes {
    region: Region,
    conflicting: bool,
    // date -> max spread over tenors
    composite: BTreeMap<NaiveDate, f64>,
}

fn prepare_one(name: String, q: NameQuotes) -> Option<CdsSeries> {
    let knots: Vec<(NaiveDate, f64)> = q.composite.into_iter().collect();
    let (first, last) = (knots[0].0, knots.last().unwrap().0);
    if year_fraction(first, last) < MIN_SPAN_YEARS {
        return None;
    }
    // weekend knots still anchor the interpolation
    let start = first.iter_days().find(|d| is_business_day(*d)).unwrap();
    let end = (0..7)
        .map(|k| last.checked_sub_days(Days::new(k)).unwrap())
        .find(|d| is_business_day(*d))
        .unwrap();
    let grid = business_days(start, end);
    let filtered = median_filter(&interpolate(&knots, &grid), MEDIAN_FILTER_POINTS);
    Some(CdsSeries::new(name, q.region, grid, filtered).expect("prepared series satisfies invariants"))
}

/// Builds one prepared series per name from raw quotes.
///
/// Per name and date the composite spread is the larger of the 1Y and 5Y
/// quotes available. The composite is interpolated onto weekdays and then
/// median filtered.
pub fn prepare(quotes: &[RawQuote]) -> PrepareReport {
    let mut report = PrepareReport::default();
    let mut by_name: BTreeMap<String, NameQuotes> = BTreeMap::new();
    for q in quotes {
        let Ok(region) = q.region.parse::<Region>() else {
            report.quotes_outside_regions += 1;
            continue;
        };
        let entry = by_name.entry(q.name.clone()).or_insert_with(|| NameQuotes {
            region,
            conflicting: false,
            composite: BTreeMap::new(),
        });
        entry.conflicting |= entry.region != region;
        let v = entry.composite.entry(q.date).or_insert(q.spread_bps);
        *v = v.max(q.spread_bps);
    }
    report.conflicting_regions = by_name
        .iter()
        .filter(|(_, q)| q.conflicting)
        .map(|(n, _)| n.clone())
        .collect();

    let prepared: Vec<(String, Option<CdsSeries>)> = by_name
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(name, q)| (name.clone(), prepare_one(name, q)))
        .collect();
    for (name, s) in prepared {
        match s {
            Some(s) => report.series.push(s),
            None => report.short_names.push(name),
        }
    }
    report
}
