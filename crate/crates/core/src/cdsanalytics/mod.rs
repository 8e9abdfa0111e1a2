//! Historical CDS shock analytics.
//!
//! The pipeline reads raw 1Y/5Y quotes, prepares one daily series per name
//! (composite spread, business-day interpolation, 21-point median filter),
//! detects shocks against the trailing-year 10% quantile, flags crisis
//! periods by the share of active names shocked, and tabulates how far
//! spreads have moved at fixed horizons after each shock.
//!
//! One year is 365.25 calendar days throughout. Quantiles use linear
//! interpolation between order statistics (see [`quantile`]).

mod crisis;
mod ingest;
mod output;
mod prepare;
pub mod quantile;
mod recovery;
mod shocks;

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crisis::{detect_crises, CrisisCalendar, CrisisDay, CRISIS_MIN_PCT, CRISIS_SHOCK_BPS};
pub use ingest::{read_quotes, read_quotes_path, IngestReport, RawQuote, RowError};
pub use output::{write_events_csv, write_recovery_csv, write_timeline_csv};
pub use prepare::{business_days, median_filter, prepare, PrepareReport, MEDIAN_FILTER_POINTS, MIN_SPAN_YEARS};
pub use recovery::{recovery_change, recovery_quantile_table, RecoveryCell, RecoveryTable};
pub use shocks::{detect_shocks, detect_shocks_all, ShockEvent};

/// Calendar days in one year.
pub const YEAR_DAYS: f64 = 365.25;

/// Calendar days from `from` to `to` as a fraction of a year.
pub fn year_fraction(from: NaiveDate, to: NaiveDate) -> f64 {
    (to - from).num_days() as f64 / YEAR_DAYS
}

pub(crate) fn is_business_day(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Asia,
    Europe,
    NorthAmerica,
}

impl FromStr for Region {
    type Err = Error;

    /// Case-insensitive; spaces, dashes and underscores are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "asia" => Ok(Region::Asia),
            "europe" => Ok(Region::Europe),
            "northamerica" => Ok(Region::NorthAmerica),
            _ => Err(Error::Data(format!("unsupported region {s:?}"))),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Asia => "Asia",
            Region::Europe => "Europe",
            Region::NorthAmerica => "NorthAmerica",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tenor {
    #[serde(rename = "1Y")]
    OneYear,
    #[serde(rename = "5Y")]
    FiveYear,
}

/// Daily spread history of one name.
#[derive(Debug, Clone, PartialEq)]
pub struct CdsSeries {
    name: String,
    region: Region,
    dates: Vec<NaiveDate>,
    spreads: Vec<f64>,
}

impl CdsSeries {
    /// Requires strictly increasing dates and positive finite spreads.
    pub fn new(name: impl Into<String>, region: Region, dates: Vec<NaiveDate>, spreads: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if dates.is_empty() || dates.len() != spreads.len() {
            return Err(Error::Data(format!(
                "series {name}: dates and spreads must be non-empty and equal length"
            )));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Data(format!("series {name}: dates must be strictly increasing")));
        }
        if let Some(s) = spreads.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::Data(format!("series {name}: spread {s} is not positive")));
        }
        Ok(Self {
            name,
            region,
            dates,
            spreads,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn spreads(&self) -> &[f64] {
        &self.spreads
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        *self.dates.last().unwrap()
    }

    pub fn span_years(&self) -> f64 {
        year_fraction(self.first_date(), self.last_date())
    }

    pub fn covers(&self, date: NaiveDate) -> bool {
        self.first_date() <= date && date <= self.last_date()
    }

    /// Spread observed on `date`, if it is one of the series dates.
    pub fn spread_on(&self, date: NaiveDate) -> Option<f64> {
        self.dates.binary_search(&date).ok().map(|i| self.spreads[i])
    }
}
