use super::{price_strategy, PricingSetup, Scenario, Strategy};
use crate::error::{Error, Result};

/// Bisection tolerance on the CDS change, in bps.
pub const BREAK_EVEN_TOL_BPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketStatus {
    Bracketed,
    /// The break already beats the reset at the lower end of the bracket.
    BelowBracket,
    /// The break never catches up with the reset inside the bracket.
    AboveBracket,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEven {
    pub shock_bps: f64,
    pub event_time: f64,
    /// Root, or the bracket end nearest to it when not bracketed.
    pub change_bps: f64,
    pub status: BracketStatus,
    pub reset_reduction: f64,
    pub break_reduction: f64,
}

impl BreakEven {
    pub fn fraction_of_shock(&self) -> f64 {
        self.change_bps / self.shock_bps
    }
}

/// Bisection for a root of an increasing-or-decreasing `f` on `[lo, hi]`
/// with `f(lo)` and `f(hi)` of opposite sign. Returns the midpoint of the
/// final bracket once it is narrower than `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// CDS improvement at which a Mandatory Break at `event_time` matches the
/// XVA reduction of a Reset at the same time.
///
/// Searches `[−shock, 2·shock]`, with the upper end capped so the
/// continuation CDS stays positive.
pub fn break_even_recovery(
    setup: &PricingSetup,
    base_cds_bps: f64,
    shock_bps: f64,
    event_time: f64,
) -> Result<BreakEven> {
    if !(shock_bps > 0.0) {
        return Err(Error::InvalidInput(format!("shock must be positive, got {shock_bps}")));
    }
    let scenario = Scenario::new(base_cds_bps, shock_bps);
    let reset = price_strategy(setup, &scenario, &Strategy::Reset { reset_time: event_time })?.reduction_pct;
    let mb = |change: f64| {
        price_strategy(
            setup,
            &scenario.with_change(change),
            &Strategy::MandatoryBreak { break_time: event_time },
        )
        .map(|p| p.reduction_pct)
    };

    let lo = -shock_bps;
    let hi = (2.0 * shock_bps).min(scenario.reached_bps() - BREAK_EVEN_TOL_BPS);
    let result = |change_bps: f64, status: BracketStatus| -> Result<BreakEven> {
        Ok(BreakEven {
            shock_bps,
            event_time,
            change_bps,
            status,
            reset_reduction: reset,
            break_reduction: mb(change_bps)?,
        })
    };
    if mb(lo)? >= reset {
        return result(lo, BracketStatus::BelowBracket);
    }
    if mb(hi)? <= reset {
        return result(hi, BracketStatus::AboveBracket);
    }
    let root = bisect(|c| Ok(mb(c)? - reset), lo, hi, BREAK_EVEN_TOL_BPS)?;
    result(root, BracketStatus::Bracketed)
}
