//! Client-side pricing of vanilla, Reset and Mandatory Break strategies.
//!
//! A Reset restrikes the trade to zero NPV at the reset date inside one
//! contract, so it is priced entirely at inception with the inception credit
//! level locked in. A Mandatory Break ends the trade at the break date; the
//! surviving client then enters an ATM continuation trade to the original
//! maturity, priced same-as-now (today's curve and vol, shifted by the
//! scenario) at the client's credit level at that date. Only surviving clients
//! enter continuation trades, so the continuation XVA is not weighted by
//! survival to the break date. Restructuring with a full XVA rebate is priced
//! as a Mandatory Break.

mod breakeven;
mod grid;

pub use breakeven::{bisect, break_even_recovery, BracketStatus, BreakEven};
pub use grid::{scenario_grid, BreakCell, CellResult, ChangeSpec, GridSpec, ResetCell, ScenarioGrid};

use crate::curves::{CreditCurve, FundingCurve, DEFAULT_RECOVERY};
use crate::error::{Error, Result};
use crate::exposure::{
    exposure_profile_reset, exposure_profile_truncated, exposure_profile_vanilla, ExposureProfile, MarketState, Strike,
    SwapSpec, TIME_EPS,
};
use crate::xva::{xva_total, Window, XvaBreakdown};

/// Credit state of the client around a strategy event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub base_cds_bps: f64,
    pub shock_bps: f64,
    /// Improvement of the CDS by the event date; positive means the spread fell.
    pub cds_change_bps: f64,
    /// Normal-vol shift applied to the continuation market.
    pub dvol_bps: f64,
}

impl Scenario {
    pub fn new(base_cds_bps: f64, shock_bps: f64) -> Self {
        Self {
            base_cds_bps,
            shock_bps,
            cds_change_bps: 0.0,
            dvol_bps: 0.0,
        }
    }

    pub fn with_change(self, cds_change_bps: f64) -> Self {
        Self { cds_change_bps, ..self }
    }

    pub fn with_dvol(self, dvol_bps: f64) -> Self {
        Self { dvol_bps, ..self }
    }

    /// CDS level at trade inception.
    pub fn reached_bps(&self) -> f64 {
        self.base_cds_bps + self.shock_bps
    }

    /// CDS level at which the continuation trade is entered.
    pub fn continuation_cds_bps(&self) -> f64 {
        self.reached_bps() - self.cds_change_bps
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.base_cds_bps, self.shock_bps, self.cds_change_bps, self.dvol_bps];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite scenario field in {self:?}")));
        }
        if self.reached_bps() < 0.0 {
            return Err(Error::Domain(format!(
                "inception CDS {}bps is negative",
                self.reached_bps()
            )));
        }
        if self.continuation_cds_bps() <= 0.0 {
            return Err(Error::Domain(format!(
                "continuation CDS {}bps must be positive (reached {}, change {})",
                self.continuation_cds_bps(),
                self.reached_bps(),
                self.cds_change_bps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Vanilla,
    Reset {
        reset_time: f64,
    },
    MandatoryBreak {
        break_time: f64,
    },
    /// Post-trade restructuring with a 100% XVA rebate.
    Restructuring {
        time: f64,
    },
}

impl Strategy {
    pub fn event_time(&self) -> Option<f64> {
        match *self {
            Strategy::Vanilla => None,
            Strategy::Reset { reset_time } => Some(reset_time),
            Strategy::MandatoryBreak { break_time } => Some(break_time),
            Strategy::Restructuring { time } => Some(time),
        }
    }

    /// Whether the client enters a continuation trade after the event.
    pub fn has_continuation(&self) -> bool {
        matches!(self, Strategy::MandatoryBreak { .. } | Strategy::Restructuring { .. })
    }
}

/// How the continuation-leg XVA, valued at the break date, is added to the
/// first leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContinuationDiscounting {
    /// Added as valued at the break date.
    #[default]
    Undiscounted,
    /// Discounted to inception on the riskless curve.
    Riskless,
}

/// Everything needed to price a strategy apart from the credit scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingSetup {
    pub swap: SwapSpec,
    pub market: MarketState,
    pub funding: FundingCurve,
    pub recovery: f64,
    pub grid_step: f64,
    pub continuation_discounting: ContinuationDiscounting,
}

impl PricingSetup {
    pub fn new(swap: SwapSpec, market: MarketState, funding: FundingCurve) -> Self {
        Self {
            swap,
            market,
            funding,
            recovery: DEFAULT_RECOVERY,
            grid_step: 1.0 / 12.0,
            continuation_discounting: ContinuationDiscounting::default(),
        }
    }

    pub fn with_grid_step(self, grid_step: f64) -> Self {
        Self { grid_step, ..self }
    }

    pub fn with_recovery(self, recovery: f64) -> Self {
        Self { recovery, ..self }
    }

    pub fn inception_credit(&self, scenario: &Scenario) -> Result<CreditCurve> {
        CreditCurve::flat(scenario.reached_bps(), self.recovery)
    }

    pub fn vanilla_xva(&self, scenario: &Scenario) -> Result<XvaBreakdown> {
        let profile = exposure_profile_vanilla(&self.swap, &self.market, self.grid_step)?;
        xva_total(
            &profile,
            &self.inception_credit(scenario)?,
            &self.funding,
            Window::full(&profile),
        )
    }

    /// Swap, market and credit of the continuation trade entered at `t_m`.
    pub fn continuation(&self, scenario: &Scenario, t_m: f64) -> Result<(SwapSpec, MarketState, CreditCurve)> {
        let swap = SwapSpec {
            maturity: self.swap.maturity - t_m,
            strike: Strike::Atm,
            ..self.swap.clone()
        };
        let market = self.market.with_vol_shift(scenario.dvol_bps)?;
        let credit = CreditCurve::flat(scenario.continuation_cds_bps(), self.recovery)?;
        Ok((swap, market, credit))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyPrice {
    pub total: XvaBreakdown,
    pub first_leg: XvaBreakdown,
    pub continuation_leg: Option<XvaBreakdown>,
    pub reduction_pct: f64,
}

/// Vanilla XVA per unit notional treated as zero.
pub const VANILLA_XVA_FLOOR: f64 = 1e-12;

/// Percentage XVA reduction of a strategy relative to the vanilla trade.
/// Negative values are increases.
pub fn reduction_pct(strategy_xva: f64, vanilla_xva: f64) -> Result<f64> {
    if !(vanilla_xva > 0.0) {
        return Err(Error::Domain(format!(
            "reduction is undefined for non-positive vanilla XVA {vanilla_xva}"
        )));
    }
    Ok(100.0 * (vanilla_xva - strategy_xva) / vanilla_xva)
}

fn check_event_time(setup: &PricingSetup, t: f64) -> Result<()> {
    if !(t > TIME_EPS && t < setup.swap.maturity - TIME_EPS) {
        return Err(Error::Domain(format!(
            "event time {t} must lie strictly inside (0, {})",
            setup.swap.maturity
        )));
    }
    Ok(())
}

/// Exposure profiles behind a strategy price. The continuation profile is
/// in its own time, starting at zero on the break date.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfiles {
    pub first: ExposureProfile,
    pub continuation: Option<ExposureProfile>,
}

pub fn strategy_profiles(setup: &PricingSetup, scenario: &Scenario, strategy: &Strategy) -> Result<StrategyProfiles> {
    scenario.validate()?;
    let (swap, market, step) = (&setup.swap, &setup.market, setup.grid_step);
    match *strategy {
        Strategy::Vanilla => Ok(StrategyProfiles {
            first: exposure_profile_vanilla(swap, market, step)?,
            continuation: None,
        }),
        Strategy::Reset { reset_time } => {
            check_event_time(setup, reset_time)?;
            Ok(StrategyProfiles {
                first: exposure_profile_reset(swap, market, reset_time, step)?,
                continuation: None,
            })
        }
        Strategy::MandatoryBreak { break_time: t_m } | Strategy::Restructuring { time: t_m } => {
            check_event_time(setup, t_m)?;
            let (c_swap, c_market, _) = setup.continuation(scenario, t_m)?;
            Ok(StrategyProfiles {
                first: exposure_profile_truncated(swap, market, t_m, step)?,
                continuation: Some(exposure_profile_vanilla(&c_swap, &c_market, step.min(c_swap.maturity))?),
            })
        }
    }
}

/// Legs of a strategy without the comparison to vanilla.
pub fn strategy_legs(
    setup: &PricingSetup,
    scenario: &Scenario,
    strategy: &Strategy,
) -> Result<(XvaBreakdown, Option<XvaBreakdown>)> {
    let profiles = strategy_profiles(setup, scenario, strategy)?;
    let credit = setup.inception_credit(scenario)?;
    let first_window = match strategy.event_time() {
        Some(t_m) if strategy.has_continuation() => Window::new(0.0, t_m),
        _ => Window::full(&profiles.first),
    };
    let first = xva_total(&profiles.first, &credit, &setup.funding, first_window)?;
    let Some(c_profile) = profiles.continuation else {
        return Ok((first, None));
    };
    let t_m = strategy.event_time().expect("continuation follows an event");
    let (_, _, c_credit) = setup.continuation(scenario, t_m)?;
    let mut cont = xva_total(&c_profile, &c_credit, &setup.funding, Window::full(&c_profile))?;
    if setup.continuation_discounting == ContinuationDiscounting::Riskless {
        cont = cont.scaled(setup.market.curve.discount_factor(t_m)?);
    }
    Ok((first, Some(cont)))
}

pub fn price_strategy(setup: &PricingSetup, scenario: &Scenario, strategy: &Strategy) -> Result<StrategyPrice> {
    let (first_leg, continuation_leg) = strategy_legs(setup, scenario, strategy)?;
    let total = match continuation_leg {
        Some(c) => first_leg + c,
        None => first_leg,
    };
    let vanilla = match strategy {
        Strategy::Vanilla => first_leg,
        _ => setup.vanilla_xva(scenario)?,
    };
    // rounding noise on a riskless, deterministic trade is not a charge
    if vanilla.xva().abs() <= VANILLA_XVA_FLOOR * setup.swap.notional.abs() {
        return Err(Error::Domain(format!(
            "vanilla XVA {} is zero to rounding; reduction is undefined",
            vanilla.xva()
        )));
    }
    Ok(StrategyPrice {
        total,
        first_leg,
        continuation_leg,
        reduction_pct: reduction_pct(total.xva(), vanilla.xva())?,
    })
}
