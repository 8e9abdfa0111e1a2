//! Run configuration read from a TOML file.
//!
//! Every section has defaults reproducing the reference setup, so an empty
//! file is a valid configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cdsanalytics::{CRISIS_MIN_PCT, CRISIS_SHOCK_BPS};
use crate::curves::{FundingCurve, PiecewiseConstant, YieldCurve, DEFAULT_RECOVERY};
use crate::error::{Error, Result};
use crate::exposure::{Direction, MarketState, Strike, SwapSpec};
use crate::strategies::{ChangeSpec, ContinuationDiscounting, GridSpec, PricingSetup, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    /// `(maturity, continuously compounded zero rate)` nodes.
    pub curve: Vec<(f64, f64)>,
    pub normal_vol_bps: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            curve: vec![
                (1.0, -0.0045),
                (2.0, -0.0042),
                (5.0, -0.0035),
                (10.0, -0.002),
                (30.0, 0.0),
            ],
            normal_vol_bps: 50.0,
        }
    }
}

/// A flat spread or `(end, bps)` pillars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpreadSpec {
    Flat(f64),
    Pillars(Vec<(f64, f64)>),
}

impl SpreadSpec {
    fn to_curve(&self) -> Result<PiecewiseConstant> {
        match self {
            SpreadSpec::Flat(v) => Ok(PiecewiseConstant::flat(*v)),
            SpreadSpec::Pillars(p) => PiecewiseConstant::new(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FundingConfig {
    pub spread_bps: SpreadSpec,
}

impl Default for FundingConfig {
    fn default() -> Self {
        Self {
            spread_bps: SpreadSpec::Flat(50.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreditConfig {
    pub base_cds_bps: f64,
    pub recovery: f64,
}

impl Default for CreditConfig {
    fn default() -> Self {
        Self {
            base_cds_bps: 100.0,
            recovery: DEFAULT_RECOVERY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwapConfig {
    pub maturity: f64,
    pub direction: Direction,
    pub frequency: u32,
    pub notional: f64,
    /// Fixed rate as a decimal; the par rate when absent.
    pub fixed_rate: Option<f64>,
}

impl Default for SwapConfig {
    fn default() -> Self {
        Self {
            maturity: 10.0,
            direction: Direction::ReceiveFixed,
            frequency: 1,
            notional: 1.0,
            fixed_rate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DiscountingConfig {
    #[default]
    Undiscounted,
    Riskless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Exposure grid step in years.
    pub step: f64,
    pub shocks_bps: Vec<f64>,
    pub event_times: Vec<f64>,
    /// CDS changes as fractions of each shock; ignored when `changes_bps` is set.
    pub change_fractions: Vec<f64>,
    pub changes_bps: Option<Vec<f64>>,
    pub dvols_bps: Vec<f64>,
    pub breakeven_event_time: f64,
    pub continuation_discounting: DiscountingConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            step: 1.0 / 12.0,
            shocks_bps: vec![500.0, 1000.0],
            event_times: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            change_fractions: vec![-0.5, 0.0, 0.25, 0.5, 1.0],
            changes_bps: None,
            dvols_bps: vec![-10.0, 0.0, 10.0],
            breakeven_event_time: 2.0,
            continuation_discounting: DiscountingConfig::Undiscounted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdsConfig {
    /// Quote file; relative paths resolve against the config file's directory.
    pub corpus: Option<PathBuf>,
    pub thresholds_bps: Vec<f64>,
    pub crisis_shock_bps: f64,
    pub crisis_min_pct: f64,
    pub horizons_years: Vec<f64>,
    pub quantiles: Vec<f64>,
}

impl Default for CdsConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            thresholds_bps: vec![250.0, 500.0, 1000.0],
            crisis_shock_bps: CRISIS_SHOCK_BPS,
            crisis_min_pct: CRISIS_MIN_PCT,
            horizons_years: vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0],
            quantiles: vec![0.05, 0.25, 0.5, 0.75, 0.95],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub market: MarketConfig,
    pub funding: FundingConfig,
    pub credit: CreditConfig,
    pub swap: SwapConfig,
    pub grid: GridConfig,
    pub cds: CdsConfig,
}

struct Problems(Vec<String>);

impl Problems {
    fn check(&mut self, ok: bool, field: &str, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(format!("{field}: {}", msg()));
        }
    }

    fn result<T>(&mut self, field: &str, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.0.push(format!("{field}: {e}"))).ok()
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, parses and validates a config file, resolving the corpus path
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(c) = cfg.cds.corpus.as_mut() {
            if c.is_relative() {
                *c = path.parent().unwrap_or(Path::new(".")).join(&*c);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut p = Problems(Vec::new());
        let curve = p.result("market.curve", YieldCurve::new(self.market.curve.clone()));
        if let Some(curve) = curve.clone() {
            p.result(
                "market.normal_vol_bps",
                MarketState::new(curve, self.market.normal_vol_bps),
            );
        }
        if let Some(curve) = curve.clone() {
            if let Some(spread) = p.result("funding.spread_bps", self.funding.spread_bps.to_curve()) {
                p.result("funding.spread_bps", FundingCurve::new(curve, spread));
            }
        }
        p.check(
            self.credit.base_cds_bps.is_finite() && self.credit.base_cds_bps >= 0.0,
            "credit.base_cds_bps",
            || format!("must be non-negative, got {}", self.credit.base_cds_bps),
        );
        p.check((0.0..1.0).contains(&self.credit.recovery), "credit.recovery", || {
            format!("must lie in [0, 1), got {}", self.credit.recovery)
        });
        p.result("swap", self.swap_spec().validate());
        if let (Some(curve), true) = (curve, p.0.is_empty()) {
            let market = MarketState::new(curve, self.market.normal_vol_bps).expect("checked above");
            p.result("swap", self.swap_spec().fixed_rate(&market));
        }

        let g = &self.grid;
        p.check(
            g.step.is_finite() && g.step > 0.0 && g.step <= self.swap.maturity,
            "grid.step",
            || format!("must lie in (0, swap.maturity], got {}", g.step),
        );
        p.check(
            !g.shocks_bps.is_empty() && g.shocks_bps.iter().all(|s| s.is_finite() && *s > 0.0),
            "grid.shocks_bps",
            || "must be a non-empty list of positive values".into(),
        );
        let inside = |t: &f64| t.is_finite() && *t > 0.0 && *t < self.swap.maturity;
        p.check(
            !g.event_times.is_empty() && g.event_times.iter().all(inside),
            "grid.event_times",
            || format!("must be a non-empty list inside (0, {})", self.swap.maturity),
        );
        p.check(inside(&g.breakeven_event_time), "grid.breakeven_event_time", || {
            format!(
                "must lie inside (0, {}), got {}",
                self.swap.maturity, g.breakeven_event_time
            )
        });
        match &g.changes_bps {
            Some(c) => p.check(!c.is_empty() && all_finite(c), "grid.changes_bps", || {
                "must be a non-empty finite list".into()
            }),
            None => p.check(
                !g.change_fractions.is_empty() && all_finite(&g.change_fractions),
                "grid.change_fractions",
                || "must be a non-empty finite list".into(),
            ),
        }
        p.check(
            !g.dvols_bps.is_empty() && all_finite(&g.dvols_bps),
            "grid.dvols_bps",
            || "must be a non-empty finite list".into(),
        );
        p.check(
            g.dvols_bps.iter().all(|dv| self.market.normal_vol_bps + dv >= 0.0),
            "grid.dvols_bps",
            || {
                format!(
                    "shifted vol must stay non-negative from {}bps",
                    self.market.normal_vol_bps
                )
            },
        );

        let c = &self.cds;
        if let Some(path) = &c.corpus {
            p.check(path.is_file(), "cds.corpus", || {
                format!("{} does not exist", path.display())
            });
        }
        p.check(
            !c.thresholds_bps.is_empty() && c.thresholds_bps.iter().all(|t| t.is_finite() && *t > 0.0),
            "cds.thresholds_bps",
            || "must be a non-empty list of positive values".into(),
        );
        p.check(
            c.crisis_shock_bps.is_finite() && c.crisis_shock_bps > 0.0,
            "cds.crisis_shock_bps",
            || format!("must be positive, got {}", c.crisis_shock_bps),
        );
        p.check(
            c.crisis_min_pct.is_finite() && c.crisis_min_pct > 0.0 && c.crisis_min_pct <= 100.0,
            "cds.crisis_min_pct",
            || format!("must lie in (0, 100], got {}", c.crisis_min_pct),
        );
        p.check(
            !c.horizons_years.is_empty() && c.horizons_years.iter().all(|h| h.is_finite() && *h > 0.0),
            "cds.horizons_years",
            || "must be a non-empty list of positive values".into(),
        );
        p.check(
            !c.quantiles.is_empty()
                && c.quantiles.iter().all(|q| (0.0..=1.0).contains(q))
                && c.quantiles.windows(2).all(|w| w[0] < w[1]),
            "cds.quantiles",
            || "must be an increasing list in [0, 1]".into(),
        );

        if p.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p.0.join("; ")))
        }
    }

    pub fn swap_spec(&self) -> SwapSpec {
        SwapSpec {
            notional: self.swap.notional,
            maturity: self.swap.maturity,
            direction: self.swap.direction,
            strike: self.swap.fixed_rate.map_or(Strike::Atm, Strike::Fixed),
            frequency: self.swap.frequency,
        }
    }

    pub fn pricing_setup(&self) -> Result<PricingSetup> {
        let curve = YieldCurve::new(self.market.curve.clone())?;
        let market = MarketState::new(curve.clone(), self.market.normal_vol_bps)?;
        let funding = FundingCurve::new(curve, self.funding.spread_bps.to_curve()?)?;
        let mut setup = PricingSetup::new(self.swap_spec(), market, funding)
            .with_grid_step(self.grid.step)
            .with_recovery(self.credit.recovery);
        setup.continuation_discounting = match self.grid.continuation_discounting {
            DiscountingConfig::Undiscounted => ContinuationDiscounting::Undiscounted,
            DiscountingConfig::Riskless => ContinuationDiscounting::Riskless,
        };
        Ok(setup)
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            base_cds_bps: self.credit.base_cds_bps,
            shocks_bps: self.grid.shocks_bps.clone(),
            event_times: self.grid.event_times.clone(),
            changes: match &self.grid.changes_bps {
                Some(c) => ChangeSpec::Absolute(c.clone()),
                None => ChangeSpec::ShockFractions(self.grid.change_fractions.clone()),
            },
            dvols_bps: self.grid.dvols_bps.clone(),
        }
    }

    pub fn scenario(&self, shock_bps: f64) -> Scenario {
        Scenario::new(self.credit.base_cds_bps, shock_bps)
    }
}
