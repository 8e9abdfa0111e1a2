//! Swap exposure profiles under a one-factor normal model of the forward
//! swap rate.
//!
//! At a future date `u` the remaining swap is worth `N · A(u) · (S(u) − K)`
//! to a fixed-rate payer, where `A(u)` is the forward value of the fixed
//! payments still due and `S(u) ~ Normal(F(u), σ²·h)`. `F(u)` is the time-0
//! forward rate of the remaining inception schedule measured from the start of
//! the current accrual period, and `h` is the time since the strike was last
//! set. Expected positive/negative exposure are Bachelier option values.
//!
//! Profiles are right-continuous. Breaks and resets make the value jump at the
//! event date; the value just before the jump is kept as a [`LeftLimit`] so
//! quadrature over a window ending at the event uses the pre-event exposure.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::curves::YieldCurve;
use crate::error::{check_time, Error, Result};

/// Times closer than this are treated as the same grid point.
pub const TIME_EPS: f64 = 1e-9;

const BPS: f64 = 1.0e-4;

/// Side of the swap held by the party whose exposure is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    PayFixed,
    ReceiveFixed,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::PayFixed => Direction::ReceiveFixed,
            Direction::ReceiveFixed => Direction::PayFixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strike {
    /// Par rate at inception.
    Atm,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapSpec {
    pub notional: f64,
    pub maturity: f64,
    pub direction: Direction,
    pub strike: Strike,
    /// Fixed-leg payments per year.
    pub frequency: u32,
}

impl SwapSpec {
    pub fn atm(maturity: f64, direction: Direction) -> Self {
        Self {
            notional: 1.0,
            maturity,
            direction,
            strike: Strike::Atm,
            frequency: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.maturity > 0.0) || !self.maturity.is_finite() {
            return Err(Error::InvalidInput(format!(
                "swap maturity must be positive, got {}",
                self.maturity
            )));
        }
        if !(self.notional > 0.0) || !self.notional.is_finite() {
            return Err(Error::InvalidInput(format!(
                "swap notional must be positive, got {}",
                self.notional
            )));
        }
        if self.frequency == 0 {
            return Err(Error::InvalidInput("payment frequency must be at least 1".into()));
        }
        if let Strike::Fixed(k) = self.strike {
            if !k.is_finite() {
                return Err(Error::InvalidInput(format!("fixed rate must be finite, got {k}")));
            }
        }
        Ok(())
    }

    /// Fixed rate, with the ATM marker resolved against `market`.
    pub fn fixed_rate(&self, market: &MarketState) -> Result<f64> {
        match self.strike {
            Strike::Fixed(k) => Ok(k),
            Strike::Atm => par_rate(market, 0.0, self.maturity, self.frequency),
        }
    }

    /// The same swap with the ATM marker replaced by the resolved rate.
    pub fn resolved(&self, market: &MarketState) -> Result<Self> {
        Ok(Self {
            strike: Strike::Fixed(self.fixed_rate(market)?),
            ..self.clone()
        })
    }
}

/// Yield curve and normal volatility of the forward swap rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub curve: YieldCurve,
    pub normal_vol_bps: f64,
}

impl MarketState {
    pub fn new(curve: YieldCurve, normal_vol_bps: f64) -> Result<Self> {
        if !(normal_vol_bps >= 0.0) || !normal_vol_bps.is_finite() {
            return Err(Error::InvalidInput(format!(
                "normal vol must be non-negative, got {normal_vol_bps}bps"
            )));
        }
        Ok(Self { curve, normal_vol_bps })
    }

    /// Decimal vol per √year.
    pub fn normal_vol(&self) -> f64 {
        self.normal_vol_bps * BPS
    }

    pub fn with_vol_shift(&self, dvol_bps: f64) -> Result<Self> {
        Self::new(self.curve.clone(), self.normal_vol_bps + dvol_bps)
    }
}

/// Fixed-leg schedule of `[start, end]` as `(payment time, accrual)` pairs.
///
/// Payment dates roll back from `end` in steps of `1 / frequency`; the first
/// period is a stub starting at `start`.
pub fn schedule(start: f64, end: f64, frequency: u32) -> Vec<(f64, f64)> {
    let period = 1.0 / frequency as f64;
    let mut dates = Vec::new();
    let mut k = 0u32;
    loop {
        let t = end - k as f64 * period;
        if t <= start + TIME_EPS {
            break;
        }
        dates.push(t);
        k += 1;
    }
    dates.reverse();
    let mut prev = start;
    dates
        .into_iter()
        .map(|t| {
            let accrual = t - prev;
            prev = t;
            (t, accrual)
        })
        .collect()
}

/// Time-0 value of the fixed-leg annuity of `[start, end]`.
pub fn annuity(curve: &YieldCurve, start: f64, end: f64, frequency: u32) -> Result<f64> {
    schedule(start, end, frequency)
        .into_iter()
        .map(|(t, tau)| Ok(tau * curve.discount_factor(t)?))
        .sum()
}

/// Time-0 forward swap rate of `[start, end]`, without period-length checks.
pub fn forward_swap_rate(curve: &YieldCurve, start: f64, end: f64, frequency: u32) -> Result<f64> {
    check_time(start)?;
    if !(end > start + TIME_EPS) {
        return Err(Error::Domain(format!(
            "forward swap needs start < end, got [{start}, {end}]"
        )));
    }
    let a = annuity(curve, start, end, frequency)?;
    Ok((curve.discount_factor(start)? - curve.discount_factor(end)?) / a)
}

/// Par rate of the swap `[start, end]`.
pub fn par_rate(market: &MarketState, start: f64, end: f64, frequency: u32) -> Result<f64> {
    check_time(start)?;
    if frequency == 0 {
        return Err(Error::InvalidInput("payment frequency must be at least 1".into()));
    }
    if end - start < 1.0 / frequency as f64 - TIME_EPS {
        return Err(Error::Domain(format!(
            "swap [{start}, {end}] is shorter than one payment period"
        )));
    }
    forward_swap_rate(&market.curve, start, end, frequency)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// `E[(F + σ√τ·Z − K)⁺]`.
pub fn bachelier_call(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    let sd = vol * expiry.max(0.0).sqrt();
    if sd <= 0.0 {
        return (forward - strike).max(0.0);
    }
    let d = (forward - strike) / sd;
    let n = std_normal();
    sd * (n.pdf(d) + d * n.cdf(d))
}

/// `E[(K − F − σ√τ·Z)⁺]`.
pub fn bachelier_put(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    let sd = vol * expiry.max(0.0).sqrt();
    if sd <= 0.0 {
        return (strike - forward).max(0.0);
    }
    let d = (forward - strike) / sd;
    let n = std_normal();
    sd * (n.pdf(d) - d * n.cdf(-d))
}

/// Expected exposures at a single date.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ExposurePoint {
    pub epe: f64,
    pub ene: f64,
    pub ev: f64,
}

/// Pre-jump exposure at a time where the profile is discontinuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeftLimit {
    pub time: f64,
    pub point: ExposurePoint,
}

/// Which side of a payment or event date an exposure is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Just before: payments due at `u` are still outstanding.
    Before,
    /// At `u` itself, after any payment or event at `u`.
    After,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExposureProfile {
    grid: Vec<f64>,
    epe: Vec<f64>,
    ene: Vec<f64>,
    ev: Vec<f64>,
    // sorted by time, each time on the grid
    left_limits: Vec<LeftLimit>,
}

impl ExposureProfile {
    /// Builds a continuous profile from raw columns, checking shape and sign
    /// invariants.
    pub fn new(grid: Vec<f64>, epe: Vec<f64>, ene: Vec<f64>, ev: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if n < 2 || epe.len() != n || ene.len() != n || ev.len() != n {
            return Err(Error::InvalidInput(
                "profile columns must share a grid of at least two points".into(),
            ));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "profile grid must be non-negative and strictly increasing".into(),
            ));
        }
        for i in 0..n {
            let scale = 1.0f64.max(epe[i].abs()).max(ene[i].abs());
            if epe[i] < 0.0 || ene[i] > 0.0 || (ev[i] - epe[i] - ene[i]).abs() > 1e-10 * scale {
                return Err(Error::InvalidInput(format!(
                    "profile point {i} violates epe >= 0, ene <= 0, ev = epe + ene"
                )));
            }
        }
        Ok(Self {
            grid,
            epe,
            ene,
            ev,
            left_limits: Vec::new(),
        })
    }

    /// Attaches pre-jump values; each time must be a grid point.
    pub fn with_left_limits(mut self, mut limits: Vec<LeftLimit>) -> Result<Self> {
        limits.sort_by(|a, b| a.time.total_cmp(&b.time));
        for ll in &limits {
            let on_grid = self.grid.iter().any(|&g| (g - ll.time).abs() <= TIME_EPS);
            let p = ll.point;
            let scale = 1.0f64.max(p.epe.abs()).max(p.ene.abs());
            if !on_grid || p.epe < 0.0 || p.ene > 0.0 || (p.ev - p.epe - p.ene).abs() > 1e-10 * scale {
                return Err(Error::InvalidInput(format!("invalid left limit at {}", ll.time)));
            }
        }
        if limits.windows(2).any(|w| w[1].time - w[0].time <= TIME_EPS) {
            return Err(Error::InvalidInput("duplicate left limit times".into()));
        }
        self.left_limits = limits;
        Ok(self)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn epe(&self) -> &[f64] {
        &self.epe
    }

    pub fn ene(&self) -> &[f64] {
        &self.ene
    }

    pub fn ev(&self) -> &[f64] {
        &self.ev
    }

    /// Pre-jump values at payment and event dates.
    pub fn left_limits(&self) -> &[LeftLimit] {
        &self.left_limits
    }

    pub fn left_limit_at(&self, t: f64) -> Option<LeftLimit> {
        let i = self.left_limits.partition_point(|ll| ll.time < t - TIME_EPS);
        self.left_limits
            .get(i)
            .copied()
            .filter(|ll| (ll.time - t).abs() <= TIME_EPS)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Right-continuous value at grid index `i`.
    pub fn point(&self, i: usize) -> ExposurePoint {
        ExposurePoint {
            epe: self.epe[i],
            ene: self.ene[i],
            ev: self.ev[i],
        }
    }

    /// Value approaching grid index `i` from the left.
    pub fn point_before(&self, i: usize) -> ExposurePoint {
        self.left_limit_at(self.grid[i])
            .map_or_else(|| self.point(i), |ll| ll.point)
    }

    /// Linear interpolation of the profile at `t` within the grid.
    pub fn value_at(&self, t: f64, side: Side) -> Option<ExposurePoint> {
        let (first, last) = (self.grid[0], *self.grid.last().unwrap());
        if t < first - TIME_EPS || t > last + TIME_EPS {
            return None;
        }
        let j = self.grid.partition_point(|&g| g < t - TIME_EPS);
        if (self.grid[j] - t).abs() <= TIME_EPS {
            return Some(match side {
                Side::Before => self.point_before(j),
                Side::After => self.point(j),
            });
        }
        let (t0, t1) = (self.grid[j - 1], self.grid[j]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.point(j - 1), self.point_before(j));
        Some(ExposurePoint {
            epe: a.epe + (b.epe - a.epe) * w,
            ene: a.ene + (b.ene - a.ene) * w,
            ev: a.ev + (b.ev - a.ev) * w,
        })
    }

    /// Writes `t,epe,ene,ev` rows; each jump produces two rows at its time.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "epe", "ene", "ev"])?;
        for i in 0..self.grid.len() {
            let t = self.grid[i];
            if let Some(ll) = self.left_limit_at(t) {
                let p = ll.point;
                w.serialize((t, p.epe, p.ene, p.ev))?;
            }
            w.serialize((t, self.epe[i], self.ene[i], self.ev[i]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exposure grid: multiples of `step` below `maturity`, the maturity itself,
/// and the supplied event or payment times.
pub fn exposure_grid(maturity: f64, step: f64, events: &[f64]) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("grid step must be positive, got {step}")));
    }
    if step > maturity + TIME_EPS {
        return Err(Error::Domain(format!("grid step {step} exceeds maturity {maturity}")));
    }
    let mut grid: Vec<f64> = (0..)
        .map(|k| k as f64 * step)
        .take_while(|&t| t < maturity - TIME_EPS)
        .collect();
    grid.push(maturity);
    grid.extend(
        events
            .iter()
            .copied()
            .filter(|&e| e > TIME_EPS && e < maturity - TIME_EPS),
    );
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= TIME_EPS);
    Ok(grid)
}

/// Accrual start of the period containing `u` on the inception schedule of
/// `[0, maturity]`, and the time-0 value of the fixed payments still due.
pub fn remaining_fixed_leg(
    curve: &YieldCurve,
    maturity: f64,
    frequency: u32,
    u: f64,
    side: Side,
) -> Result<(f64, f64)> {
    let paid = |t: f64| match side {
        Side::After => t <= u + TIME_EPS,
        Side::Before => t < u - TIME_EPS,
    };
    let mut period_start = 0.0;
    let mut remaining = 0.0;
    for (t, tau) in schedule(0.0, maturity, frequency) {
        if paid(t) {
            period_start = t;
        } else {
            remaining += tau * curve.discount_factor(t)?;
        }
    }
    Ok((period_start, remaining))
}

/// Swap rate of the remaining inception-schedule swap at `u`, seen at time 0.
///
/// The current period's floating coupon runs from its accrual start, so on a
/// flat curve the rate equals the par rate.
pub fn remaining_swap_rate(curve: &YieldCurve, maturity: f64, frequency: u32, u: f64) -> Result<f64> {
    let (period_start, remaining) = remaining_fixed_leg(curve, maturity, frequency, u, Side::After)?;
    if remaining <= 0.0 {
        return Err(Error::Domain(format!("no fixed payments remain after {u}")));
    }
    Ok((curve.discount_factor(period_start)? - curve.discount_factor(maturity)?) / remaining)
}

/// Exposure of the remaining swap at `u` given strike `strike`, with the
/// swap rate dispersed over `horizon` years around its time-0 forward.
pub fn exposure_at(
    swap: &SwapSpec,
    market: &MarketState,
    strike: f64,
    u: f64,
    horizon: f64,
    side: Side,
) -> Result<ExposurePoint> {
    check_time(u)?;
    let curve = &market.curve;
    let (period_start, remaining) = remaining_fixed_leg(curve, swap.maturity, swap.frequency, u, side)?;
    if remaining <= 0.0 {
        return Ok(ExposurePoint::default());
    }
    let annuity = remaining / curve.discount_factor(u)?;
    let forward = (curve.discount_factor(period_start)? - curve.discount_factor(swap.maturity)?) / remaining;
    let vol = market.normal_vol();
    let scale = swap.notional * annuity;
    let call = bachelier_call(forward, strike, vol, horizon);
    let put = bachelier_put(forward, strike, vol, horizon);
    Ok(match swap.direction {
        Direction::PayFixed => ExposurePoint {
            epe: scale * call,
            ene: -scale * put,
            ev: scale * (forward - strike),
        },
        Direction::ReceiveFixed => ExposurePoint {
            epe: scale * put,
            ene: -scale * call,
            ev: scale * (strike - forward),
        },
    })
}

fn check_event(swap: &SwapSpec, t: f64, what: &str) -> Result<()> {
    if !(t > TIME_EPS && t < swap.maturity - TIME_EPS) {
        return Err(Error::Domain(format!(
            "{what} time {t} must lie strictly inside (0, {})",
            swap.maturity
        )));
    }
    Ok(())
}

/// Builds a profile on the grid for `step`, the payment dates and `events`,
/// with a left limit wherever the payment schedule or an event makes the
/// value jump. `value(u, side)` gives the exposure at `u`.
fn build_profile<F>(swap: &SwapSpec, step: f64, events: &[f64], mut value: F) -> Result<ExposureProfile>
where
    F: FnMut(f64, Side) -> Result<ExposurePoint>,
{
    swap.validate()?;
    let payments: Vec<f64> = schedule(0.0, swap.maturity, swap.frequency)
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    let mut knots = payments.clone();
    knots.extend_from_slice(events);
    let grid = exposure_grid(swap.maturity, step, &knots)?;
    let is_jump = |u: f64| knots.iter().any(|&k| (k - u).abs() <= TIME_EPS);

    let mut points = Vec::with_capacity(grid.len());
    let mut left_limits = Vec::new();
    for &u in &grid {
        points.push(value(u, Side::After)?);
        if u > TIME_EPS && is_jump(u) {
            left_limits.push(LeftLimit {
                time: u,
                point: value(u, Side::Before)?,
            });
        }
    }
    Ok(ExposureProfile {
        grid,
        epe: points.iter().map(|p| p.epe).collect(),
        ene: points.iter().map(|p| p.ene).collect(),
        ev: points.iter().map(|p| p.ev).collect(),
        left_limits,
    })
}

pub fn exposure_profile_vanilla(swap: &SwapSpec, market: &MarketState, grid_step: f64) -> Result<ExposureProfile> {
    swap.validate()?;
    let strike = swap.fixed_rate(market)?;
    build_profile(swap, grid_step, &[], |u, side| {
        exposure_at(swap, market, strike, u, u, side)
    })
}

/// Vanilla profile up to `break_time`, zero from `break_time` on.
pub fn exposure_profile_truncated(
    swap: &SwapSpec,
    market: &MarketState,
    break_time: f64,
    grid_step: f64,
) -> Result<ExposureProfile> {
    swap.validate()?;
    check_event(swap, break_time, "break")?;
    let strike = swap.fixed_rate(market)?;
    build_profile(swap, grid_step, &[break_time], |u, side| {
        let live = u < break_time - TIME_EPS || (side == Side::Before && u <= break_time + TIME_EPS);
        if live {
            exposure_at(swap, market, strike, u, u, side)
        } else {
            Ok(ExposurePoint::default())
        }
    })
}

/// Vanilla profile before `reset_time`; afterwards the strike is the ATM
/// rate of the remaining swap at `reset_time` and dispersion accrues from
/// `reset_time` only.
pub fn exposure_profile_reset(
    swap: &SwapSpec,
    market: &MarketState,
    reset_time: f64,
    grid_step: f64,
) -> Result<ExposureProfile> {
    swap.validate()?;
    check_event(swap, reset_time, "reset")?;
    let strike = swap.fixed_rate(market)?;
    let reset_strike = remaining_swap_rate(&market.curve, swap.maturity, swap.frequency, reset_time)?;
    build_profile(swap, grid_step, &[reset_time], |u, side| {
        let before_reset = u < reset_time - TIME_EPS || (side == Side::Before && u <= reset_time + TIME_EPS);
        if before_reset {
            exposure_at(swap, market, strike, u, u, side)
        } else {
            exposure_at(swap, market, reset_strike, u, (u - reset_time).max(0.0), side)
        }
    })
}
