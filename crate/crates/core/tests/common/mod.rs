#![allow(dead_code)]

use chrono::{Datelike, Days, NaiveDate, Weekday};
use clientxva::cdsanalytics::{CdsSeries, RawQuote, Region, ShockEvent, Tenor};
use clientxva::curves::{CreditCurve, FundingCurve, YieldCurve};
use clientxva::exposure::{Direction, MarketState, SwapSpec};
use clientxva::strategies::PricingSetup;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn reference_curve() -> YieldCurve {
    YieldCurve::new(vec![
        (1.0, -0.0045),
        (2.0, -0.0042),
        (5.0, -0.0035),
        (10.0, -0.002),
        (30.0, 0.0),
    ])
    .unwrap()
}

pub fn reference_setup() -> PricingSetup {
    let curve = reference_curve();
    let market = MarketState::new(curve.clone(), 50.0).unwrap();
    let funding = FundingCurve::flat_spread(curve, 50.0).unwrap();
    PricingSetup::new(SwapSpec::atm(10.0, Direction::ReceiveFixed), market, funding)
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle for the one-factor swap-rate model.
//
// Swap values are rebuilt from discount factors only: annual payments on
// the inception schedule, the remaining annuity, and the forward from the
// current accrual start. The swap rate moves with a Brownian path.

pub struct McSwap {
    pub curve: YieldCurve,
    pub maturity: f64,
    pub vol: f64,
    pub receive_fixed: bool,
    pub strike: f64,
}

impl McSwap {
    pub fn df(&self, t: f64) -> f64 {
        self.curve.discount_factor(t).unwrap()
    }

    fn payments(&self) -> Vec<f64> {
        (1..=self.maturity.round() as i32).map(f64::from).collect()
    }

    /// Par rate of the whole swap at inception.
    pub fn par(&self) -> f64 {
        let a: f64 = self.payments().iter().map(|&t| self.df(t)).sum();
        (1.0 - self.df(self.maturity)) / a
    }

    /// `(annuity seen at u, forward)` after any payment at `u`.
    pub fn state(&self, u: f64) -> Option<(f64, f64)> {
        let due: Vec<f64> = self.payments().into_iter().filter(|&t| t > u + 1e-9).collect();
        if due.is_empty() {
            return None;
        }
        let start = self
            .payments()
            .into_iter()
            .filter(|&t| t <= u + 1e-9)
            .fold(0.0, f64::max);
        let a0: f64 = due.iter().map(|&t| self.df(t)).sum();
        Some((a0 / self.df(u), (self.df(start) - self.df(self.maturity)) / a0))
    }

    pub fn value(&self, u: f64, rate: f64, strike: f64) -> f64 {
        match self.state(u) {
            None => 0.0,
            Some((a, _)) => {
                let pay = a * (rate - strike);
                if self.receive_fixed {
                    -pay
                } else {
                    pay
                }
            }
        }
    }
}

pub struct McStat {
    pub mean: f64,
    pub se: f64,
}

pub fn stat(samples: &[f64]) -> McStat {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    McStat {
        mean,
        se: (var / n).sqrt(),
    }
}

/// EPE at each of `dates` by path simulation; `reset` restrikes each path to
/// its own swap rate at the reset time.
pub fn mc_epe(swap: &McSwap, dates: &[f64], reset: Option<f64>, paths: usize, seed: u64) -> Vec<McStat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = dates.to_vec();
    if let Some(t) = reset {
        times.push(t);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut samples = vec![Vec::with_capacity(paths); dates.len()];
    for _ in 0..paths {
        let mut w = 0.0;
        let mut prev = 0.0;
        let mut w_reset = None;
        let mut k = 0;
        for &t in &times {
            let z: f64 = StandardNormal.sample(&mut rng);
            w += swap.vol * (t - prev).sqrt() * z;
            prev = t;
            if Some(t) == reset {
                w_reset = Some(w);
            }
            while k < dates.len() && dates[k] == t {
                let v = match (reset, w_reset) {
                    (Some(t_r), Some(wr)) if t >= t_r => {
                        let (_, f_r) = swap.state(t_r).unwrap();
                        let (_, f) = swap.state(t).map_or((0.0, 0.0), |s| s);
                        swap.value(t, f + w, f_r + wr)
                    }
                    _ => {
                        let f = swap.state(t).map_or(0.0, |s| s.1);
                        swap.value(t, f + w, swap.strike)
                    }
                };
                samples[k].push(v.max(0.0));
                k += 1;
            }
        }
    }
    samples.iter().map(|s| stat(s)).collect()
}

/// CVA by sampling the default time and the swap rate at default.
pub fn mc_cva(swap: &McSwap, credit: &CreditCurve, funding: &FundingCurve, paths: usize, seed: u64) -> McStat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = credit.hazard(0.0);
    let samples: Vec<f64> = (0..paths)
        .map(|_| {
            let u: f64 = rng.random();
            let tau = -(1.0 - u).ln() / lambda;
            if tau >= swap.maturity {
                return 0.0;
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let f = swap.state(tau).map_or(0.0, |s| s.1);
            let v = swap.value(tau, f + swap.vol * tau.sqrt() * z, swap.strike);
            credit.lgd() * funding.discount_factor(tau).unwrap() * v.max(0.0)
        })
        .collect();
    stat(&samples)
}

// ---------------------------------------------------------------------------
// Naive CDS reference: direct scans and sorts, no incremental state.

pub const YEAR: f64 = 365.25;

fn days(a: NaiveDate, b: NaiveDate) -> f64 {
    (b - a).num_days() as f64
}

fn weekday(d: NaiveDate) -> bool {
    !matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

pub fn naive_quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = if i + 1 < v.len() { i + 1 } else { i };
    Some(v[i] + (pos - i as f64) * (v[j] - v[i]))
}

/// Composite, interpolated and filtered series for each name with enough history.
pub fn naive_prepare(quotes: &[RawQuote]) -> Vec<CdsSeries> {
    let mut names: Vec<String> = quotes
        .iter()
        .filter(|q| q.region.parse::<Region>().is_ok())
        .map(|q| q.name.clone())
        .collect();
    names.sort();
    names.dedup();
    let mut out = Vec::new();
    for name in names {
        let mine: Vec<&RawQuote> = quotes
            .iter()
            .filter(|q| q.name == name && q.region.parse::<Region>().is_ok())
            .collect();
        let region: Region = mine[0].region.parse().unwrap();
        let mut dates: Vec<NaiveDate> = mine.iter().map(|q| q.date).collect();
        dates.sort();
        dates.dedup();
        let knots: Vec<(NaiveDate, f64)> = dates
            .iter()
            .map(|&d| {
                let v = mine
                    .iter()
                    .filter(|q| q.date == d)
                    .map(|q| q.spread_bps)
                    .fold(f64::MIN, f64::max);
                (d, v)
            })
            .collect();
        let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
        if days(first, last) / YEAR < 2.1 {
            continue;
        }
        let mut grid = Vec::new();
        let mut d = first;
        while d <= last {
            if weekday(d) {
                grid.push(d);
            }
            d = d + Days::new(1);
        }
        let raw: Vec<f64> = grid
            .iter()
            .map(|&g| {
                if let Some(k) = knots.iter().find(|k| k.0 == g) {
                    return k.1;
                }
                let before = knots.iter().rev().find(|k| k.0 < g).unwrap();
                let after = knots.iter().find(|k| k.0 > g).unwrap();
                before.1 + days(before.0, g) / days(before.0, after.0) * (after.1 - before.1)
            })
            .collect();
        let n = raw.len();
        let filtered: Vec<f64> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(10);
                let hi = (i + 10).min(n - 1);
                naive_quantile(&raw[lo..=hi], 0.5).unwrap()
            })
            .collect();
        out.push(CdsSeries::new(name, region, grid, filtered).unwrap());
    }
    out
}

pub fn naive_shocks(s: &CdsSeries, threshold: f64) -> Vec<ShockEvent> {
    let mut out: Vec<ShockEvent> = Vec::new();
    for (i, &t) in s.dates().iter().enumerate() {
        if days(s.first_date(), t) < YEAR {
            continue;
        }
        if let Some(last) = out.last() {
            if days(last.date, t) < YEAR {
                continue;
            }
        }
        let window: Vec<f64> = s
            .dates()
            .iter()
            .zip(s.spreads())
            .filter(|(u, _)| days(**u, t) > 0.0 && days(**u, t) <= YEAR)
            .map(|(_, v)| *v)
            .collect();
        let size = s.spreads()[i] - naive_quantile(&window, 0.1).unwrap();
        if size >= threshold {
            out.push(ShockEvent {
                name: s.name().to_string(),
                date: t,
                size_bps: size,
                threshold_bps: threshold,
            });
        }
    }
    out
}

/// `(date, active, shocked)` for every weekday of the corpus span.
pub fn naive_crisis_counts(events: &[ShockEvent], corpus: &[CdsSeries]) -> Vec<(NaiveDate, usize, usize)> {
    let first = corpus.iter().map(|s| s.first_date()).min().unwrap();
    let last = corpus.iter().map(|s| s.last_date()).max().unwrap();
    let mut out = Vec::new();
    let mut d = first;
    while d <= last {
        if weekday(d) {
            let active: Vec<&CdsSeries> = corpus
                .iter()
                .filter(|s| s.first_date() <= d && d <= s.last_date())
                .collect();
            let shocked = active
                .iter()
                .filter(|s| {
                    events
                        .iter()
                        .any(|e| e.name == s.name() && days(e.date, d) >= 0.0 && days(e.date, d) < YEAR)
                })
                .count();
            out.push((d, active.len(), shocked));
        }
        d = d + Days::new(1);
    }
    out
}

pub fn naive_is_crisis(active: usize, shocked: usize, min_pct: f64) -> Option<bool> {
    (active > 0).then(|| 100.0 * shocked as f64 / active as f64 >= min_pct)
}

pub fn naive_recovery_change(s: &CdsSeries, t: NaiveDate, h: f64) -> Option<f64> {
    let at = s.spread_on(t)?;
    if days(t, s.last_date()) < 1.05 * h * YEAR {
        return None;
    }
    let w: Vec<f64> = s
        .dates()
        .iter()
        .zip(s.spreads())
        .filter(|(u, _)| {
            let lag = days(t, **u);
            0.95 * h * YEAR <= lag && lag < 1.05 * h * YEAR
        })
        .map(|(_, v)| *v)
        .collect();
    Some(naive_quantile(&w, 0.5)? - at)
}

// ---------------------------------------------------------------------------
// Synthetic corpus with injected step shocks.

pub struct Synthetic {
    pub quotes: Vec<RawQuote>,
    /// `(name, first business day at the shocked level, step size)`.
    pub injected: Vec<(String, NaiveDate, f64)>,
}

pub fn corpus_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 1, 5).unwrap()
}

fn business_after(start: NaiveDate, offset_days: u64) -> NaiveDate {
    let mut d = start + Days::new(offset_days);
    while !weekday(d) {
        d = d + Days::new(1);
    }
    d
}

/// `names` names over `years` years of weekday quotes, both tenors, with a
/// handful of rows dropped to leave gaps. Shocks are `(name index, day
/// offset, size, recovery fraction over the following year)`.
pub fn synthetic_corpus(names: usize, years: u64, shocks: &[(usize, u64, f64, f64)], seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = corpus_start();
    let end = start + Days::new((years as f64 * YEAR) as u64);
    let regions = ["Europe", "Asia", "North America"];
    let mut quotes = Vec::new();
    let mut injected = Vec::new();
    for i in 0..names {
        let name = format!("N{i:03}");
        let base: f64 = rng.random_range(40.0..200.0);
        let mine: Vec<_> = shocks.iter().filter(|s| s.0 == i).collect();
        for s in &mine {
            injected.push((name.clone(), business_after(start, s.1), s.2));
        }
        let mut d = start;
        while d <= end {
            if weekday(d) && rng.random::<f64>() > 0.01 {
                let mut level = base * (1.0 + 0.02 * (days(start, d) / 90.0).sin());
                for s in &mine {
                    let at = business_after(start, s.1);
                    if d >= at {
                        let since = days(at, d) / YEAR;
                        level += s.2 * (1.0 - s.3 * since.min(1.0));
                    }
                }
                let noise: f64 = rng.random_range(-1.0..1.0);
                for (tenor, bump) in [(Tenor::OneYear, 0.9), (Tenor::FiveYear, 1.0)] {
                    quotes.push(RawQuote {
                        date: d,
                        name: name.clone(),
                        region: regions[i % 3].to_string(),
                        tenor,
                        spread_bps: (level * bump + noise).max(1.0),
                    });
                }
            }
            d = d + Days::new(1);
        }
    }
    Synthetic { quotes, injected }
}

/// Ten names shocked by 300-1200bps within a month in year three, plus
/// scattered single-name shocks.
pub fn standard_shocks() -> Vec<(usize, u64, f64, f64)> {
    let mut v: Vec<(usize, u64, f64, f64)> = (0..10)
        .map(|i| {
            (
                i * 7,
                800 + 3 * i as u64,
                [300.0, 600.0, 1200.0][i % 3],
                [0.0, 0.5, 0.8][i % 3],
            )
        })
        .collect();
    v.extend([(3, 500, 700.0, 0.3), (11, 1300, 400.0, 0.0), (50, 1500, 1500.0, 0.6)]);
    v
}
