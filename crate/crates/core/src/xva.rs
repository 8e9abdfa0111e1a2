//! CVA and FVA by trapezoidal quadrature over an exposure profile.
//!
//! Over a window `[t_a, t_b]`:
//!
//! ```text
//! CVA = LGD ∫ λ(u) · S(t_a, u) · D_F(u) · EPE(u) du
//! FVA =     ∫ s_F(u) · S(t_a, u) · D_F(u) · EV(u) du
//! ```
//!
//! `S(t_a, u)` is client survival conditional on survival to `t_a` and `D_F`
//! discounts at the funding rate from the profile's time origin. Exposure and
//! default are taken as independent.

use serde::Serialize;

use crate::curves::{CreditCurve, FundingCurve};
use crate::error::{Error, Result};
use crate::exposure::{ExposurePoint, ExposureProfile, TIME_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XvaBreakdown {
    pub cva: f64,
    pub fva: f64,
}

impl XvaBreakdown {
    pub fn xva(&self) -> f64 {
        self.cva + self.fva
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cva: self.cva * factor,
            fva: self.fva * factor,
        }
    }
}

impl std::ops::Add for XvaBreakdown {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            cva: self.cva + rhs.cva,
            fva: self.fva + rhs.fva,
        }
    }
}

impl Serialize for XvaBreakdown {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("XvaBreakdown", 3)?;
        s.serialize_field("cva", &self.cva)?;
        s.serialize_field("fva", &self.fva)?;
        s.serialize_field("xva", &self.xva())?;
        s.end()
    }
}

/// Integration window `[start, end]` in profile time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    /// The whole profile grid.
    pub fn full(profile: &ExposureProfile) -> Self {
        let g = profile.grid();
        Self::new(g[0], g[g.len() - 1])
    }
}

fn check_window(profile: &ExposureProfile, window: Window) -> Result<()> {
    let g = profile.grid();
    let (first, last) = (g[0], g[g.len() - 1]);
    let bad = window.start.is_nan()
        || window.end.is_nan()
        || window.start < 0.0
        || window.start >= window.end
        || window.start < first - TIME_EPS
        || window.end > last + TIME_EPS;
    if bad {
        return Err(Error::WindowOutsideGrid {
            start: window.start,
            end: window.end,
            grid_start: first,
            grid_end: last,
        });
    }
    Ok(())
}

/// Trapezoidal integral of `f(u, exposure)` over the window, one trapezoid per
/// grid segment clipped to the window.
fn integrate<F>(profile: &ExposureProfile, window: Window, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64, ExposurePoint) -> Result<(f64, f64)>,
{
    check_window(profile, window)?;
    let g = profile.grid();
    let mut acc = (0.0, 0.0);
    for i in 0..g.len() - 1 {
        let (t0, t1) = (g[i], g[i + 1]);
        let lo = t0.max(window.start);
        let hi = t1.min(window.end);
        if hi - lo <= TIME_EPS {
            continue;
        }
        let (p0, p1) = (profile.point(i), profile.point_before(i + 1));
        let at = |t: f64| {
            let w = (t - t0) / (t1 - t0);
            ExposurePoint {
                epe: p0.epe + (p1.epe - p0.epe) * w,
                ene: p0.ene + (p1.ene - p0.ene) * w,
                ev: p0.ev + (p1.ev - p0.ev) * w,
            }
        };
        let (a0, b0) = f(lo, at(lo))?;
        let (a1, b1) = f(hi, at(hi))?;
        let h = 0.5 * (hi - lo);
        acc.0 += h * (a0 + a1);
        acc.1 += h * (b0 + b1);
    }
    Ok(acc)
}

pub fn xva_total(
    profile: &ExposureProfile,
    credit: &CreditCurve,
    funding: &FundingCurve,
    window: Window,
) -> Result<XvaBreakdown> {
    let lgd = credit.lgd();
    let (cva, fva) = integrate(profile, window, |u, p| {
        let weight = credit.conditional_survival(window.start, u)? * funding.discount_factor(u)?;
        Ok((
            lgd * credit.hazard(u) * weight * p.epe,
            funding.spread(u) * weight * p.ev,
        ))
    })?;
    Ok(XvaBreakdown { cva, fva })
}

pub fn cva(profile: &ExposureProfile, credit: &CreditCurve, funding: &FundingCurve, window: Window) -> Result<f64> {
    Ok(xva_total(profile, credit, funding, window)?.cva)
}

pub fn fva(profile: &ExposureProfile, credit: &CreditCurve, funding: &FundingCurve, window: Window) -> Result<f64> {
    Ok(xva_total(profile, credit, funding, window)?.fva)
}
