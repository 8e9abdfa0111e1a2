//! Discount, funding and credit curves.
//!
//! All times are year fractions from the valuation date. Curves are immutable
//! once built, so they can be shared freely between scenario-grid workers.

use serde::{Deserialize, Serialize};

use crate::error::{check_time, Error, Result};

/// Recovery rate used when none is configured.
pub const DEFAULT_RECOVERY: f64 = 0.4;

const BPS: f64 = 1.0e-4;

/// Continuously-compounded zero curve with flat-forward interpolation.
///
/// `ln D(t)` is linear between nodes. Before the first node the first zero
/// rate applies, after the last node the last forward rate is extended, so a
/// single node gives a flat curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct YieldCurve {
    nodes: Vec<(f64, f64)>,
    // knot times (starting at 0) and the integrated short rate at each knot
    knots: Vec<f64>,
    integrated: Vec<f64>,
    forwards: Vec<f64>,
}

impl YieldCurve {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCurve("yield curve needs at least one node".into()));
        }
        for &(t, r) in &nodes {
            if !t.is_finite() || t < 0.0 || !r.is_finite() {
                return Err(Error::InvalidCurve(format!("bad node ({t}, {r})")));
            }
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidCurve("node times must be strictly increasing".into()));
        }

        let mut knots = vec![0.0];
        let mut integrated = vec![0.0];
        let mut forwards = Vec::with_capacity(nodes.len());
        for &(t, r) in nodes.iter().filter(|(t, _)| *t > 0.0) {
            let (t0, i0) = (*knots.last().unwrap(), *integrated.last().unwrap());
            let i1 = r * t;
            forwards.push((i1 - i0) / (t - t0));
            knots.push(t);
            integrated.push(i1);
        }
        if forwards.is_empty() {
            // only a node at t = 0
            forwards.push(nodes[0].1);
        }
        Ok(Self {
            nodes,
            knots,
            integrated,
            forwards,
        })
    }

    pub fn flat(rate: f64) -> Self {
        Self::new(vec![(1.0, rate)]).expect("finite flat rate")
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// `∫₀ᵗ r(s) ds`.
    pub fn integrated_rate(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        // index of the last knot <= t
        let i = self.knots.partition_point(|&k| k <= t) - 1;
        let fwd = self.forwards[i.min(self.forwards.len() - 1)];
        Ok(self.integrated[i] + fwd * (t - self.knots[i]))
    }

    pub fn discount_factor(&self, t: f64) -> Result<f64> {
        Ok((-self.integrated_rate(t)?).exp())
    }

    /// Discount factor from `t1` to `t2`, i.e. `D(t2) / D(t1)`.
    pub fn forward_discount(&self, t1: f64, t2: f64) -> Result<f64> {
        if t2 < t1 {
            return Err(Error::InvalidInput(format!(
                "forward discount needs t1 <= t2, got {t1} > {t2}"
            )));
        }
        Ok((self.integrated_rate(t1)? - self.integrated_rate(t2)?).exp())
    }
}

impl TryFrom<Vec<(f64, f64)>> for YieldCurve {
    type Error = Error;
    fn try_from(nodes: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(nodes)
    }
}

impl From<YieldCurve> for Vec<(f64, f64)> {
    fn from(curve: YieldCurve) -> Self {
        curve.nodes
    }
}

/// Right-continuous step function of time.
///
/// Pillars are `(end, value)`: `value` applies up to `end`, the last value
/// extends to infinity. A single pillar is a flat function.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    ends: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(pillars: Vec<(f64, f64)>) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::InvalidCurve("step function needs at least one pillar".into()));
        }
        if pillars
            .iter()
            .any(|&(t, v)| !t.is_finite() || t <= 0.0 || !v.is_finite())
        {
            return Err(Error::InvalidCurve(
                "pillar ends must be positive and values finite".into(),
            ));
        }
        if pillars.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidCurve("pillar ends must be strictly increasing".into()));
        }
        let (ends, values): (Vec<f64>, Vec<f64>) = pillars.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(ends.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (&end, &v) in ends.iter().zip(&values) {
            acc += v * (end - prev);
            cumulative.push(acc);
            prev = end;
        }
        Ok(Self {
            ends,
            values,
            cumulative,
        })
    }

    pub fn flat(value: f64) -> Self {
        Self::new(vec![(1.0, value)]).expect("finite flat value")
    }

    pub fn pillars(&self) -> Vec<(f64, f64)> {
        self.ends.iter().copied().zip(self.values.iter().copied()).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.ends.partition_point(|&e| e <= t);
        self.values[i.min(self.values.len() - 1)]
    }

    /// `∫₀ᵗ f(s) ds`.
    pub fn integral(&self, t: f64) -> f64 {
        let i = self.ends.partition_point(|&e| e <= t);
        if i == 0 {
            return self.values[0] * t;
        }
        let base = self.cumulative[i - 1];
        let v = self.values[i.min(self.values.len() - 1)];
        base + v * (t - self.ends[i - 1])
    }

    fn scaled(&self, factor: f64) -> Self {
        Self::new(self.pillars().into_iter().map(|(t, v)| (t, v * factor)).collect())
            .expect("scaling keeps pillars valid")
    }
}

/// Riskless curve plus a non-negative funding spread: `r_F = r + s_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundingCurve {
    base: YieldCurve,
    spread_bps: PiecewiseConstant,
}

impl FundingCurve {
    pub fn new(base: YieldCurve, spread_bps: PiecewiseConstant) -> Result<Self> {
        if spread_bps.min_value() < 0.0 {
            return Err(Error::InvalidCurve("funding spread must be non-negative".into()));
        }
        Ok(Self { base, spread_bps })
    }

    pub fn flat_spread(base: YieldCurve, spread_bps: f64) -> Result<Self> {
        Self::new(base, PiecewiseConstant::flat(spread_bps))
    }

    pub fn base(&self) -> &YieldCurve {
        &self.base
    }

    pub fn spread_bps(&self) -> &PiecewiseConstant {
        &self.spread_bps
    }

    /// Funding spread `s_F(t)` as a decimal rate.
    pub fn spread(&self, t: f64) -> f64 {
        self.spread_bps.value(t) * BPS
    }

    /// `r_F(t) = r(t) + s_F(t)` integrated from 0.
    pub fn integrated_rate(&self, t: f64) -> Result<f64> {
        Ok(self.base.integrated_rate(t)? + self.spread_bps.integral(t) * BPS)
    }

    pub fn discount_factor(&self, t: f64) -> Result<f64> {
        Ok((-self.integrated_rate(t)?).exp())
    }
}

/// CDS-implied credit curve with piecewise-constant hazard `λ = s / (1 − R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CreditCurve {
    spread_bps: PiecewiseConstant,
    recovery: f64,
    hazard: PiecewiseConstant,
}

impl CreditCurve {
    pub fn new(spread_bps: PiecewiseConstant, recovery: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&recovery) {
            return Err(Error::InvalidCurve(format!(
                "recovery must lie in [0, 1), got {recovery}"
            )));
        }
        if spread_bps.min_value() < 0.0 {
            return Err(Error::InvalidCurve("CDS spread must be non-negative".into()));
        }
        let hazard = spread_bps.scaled(BPS / (1.0 - recovery));
        Ok(Self {
            spread_bps,
            recovery,
            hazard,
        })
    }

    pub fn flat(spread_bps: f64, recovery: f64) -> Result<Self> {
        if !spread_bps.is_finite() {
            return Err(Error::InvalidCurve(format!(
                "CDS spread must be finite, got {spread_bps}"
            )));
        }
        Self::new(PiecewiseConstant::flat(spread_bps), recovery)
    }

    pub fn spread_bps(&self) -> &PiecewiseConstant {
        &self.spread_bps
    }

    pub fn recovery(&self) -> f64 {
        self.recovery
    }

    pub fn lgd(&self) -> f64 {
        1.0 - self.recovery
    }

    pub fn hazard(&self, t: f64) -> f64 {
        self.hazard.value(t)
    }

    pub fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.hazard.integral(t))
    }

    pub fn survival_probability(&self, t: f64) -> Result<f64> {
        Ok((-self.cumulative_hazard(t)?).exp())
    }

    /// Survival from `from` to `to` conditional on survival to `from`.
    pub fn conditional_survival(&self, from: f64, to: f64) -> Result<f64> {
        if to < from {
            return Err(Error::InvalidInput(format!(
                "conditional survival needs from <= to, got {from} > {to}"
            )));
        }
        Ok((self.cumulative_hazard(from)? - self.cumulative_hazard(to)?).exp())
    }

    /// Probability of default in `(t, t + width]`.
    pub fn default_probability_bucket(&self, t: f64, width: f64) -> Result<f64> {
        if !(width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bucket width must be positive, got {width}"
            )));
        }
        let p = self.survival_probability(t)? - self.survival_probability(t + width)?;
        Ok(p.clamp(0.0, 1.0))
    }
}

pub fn discount_factor(curve: &YieldCurve, t: f64) -> Result<f64> {
    curve.discount_factor(t)
}

pub fn funding_discount_factor(curve: &FundingCurve, t: f64) -> Result<f64> {
    curve.discount_factor(t)
}

pub fn survival_probability(credit: &CreditCurve, t: f64) -> Result<f64> {
    credit.survival_probability(t)
}

pub fn default_probability_bucket(credit: &CreditCurve, t: f64, width: f64) -> Result<f64> {
    credit.default_probability_bucket(t, width)
}
