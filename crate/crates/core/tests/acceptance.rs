//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clientxva::cdsanalytics::{detect_crises, detect_shocks_all, prepare, recovery_quantile_table, ShockEvent};
use clientxva::config::RunConfig;
use clientxva::curves::{CreditCurve, FundingCurve, YieldCurve};
use clientxva::exposure::{exposure_profile_vanilla, Direction, ExposureProfile, MarketState, Side, SwapSpec};
use clientxva::strategies::{
    break_even_recovery, price_strategy, scenario_grid, BracketStatus, PricingSetup, ScenarioGrid, Strategy,
};
use clientxva::xva::{xva_total, Window};
use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn default_config() -> RunConfig {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/default.toml");
    RunConfig::load(path).expect("shipped default config loads")
}

fn reduction(grid: &ScenarioGrid, shock: f64, t: f64, change: f64, dvol: f64) -> f64 {
    grid.break_cell(shock, t, change, dvol)
        .and_then(|c| c.reduction.clone().ok())
        .unwrap_or(f64::NAN)
}

fn reset_reduction(grid: &ScenarioGrid, shock: f64, t: f64) -> f64 {
    grid.reset_cell(shock, t)
        .and_then(|c| c.reduction.clone().ok())
        .unwrap_or(f64::NAN)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let month = 1.0 / 12.0;
    let mut worst: f64 = 0.0;
    let cases: [(f64, f64, f64, f64, f64, f64); 3] = [
        (0.01, 0.005, 100.0, 10.0, 0.02, -0.01),
        (-0.004, 0.0075, 600.0, 10.0, 0.015, -0.004),
        (0.03, 0.01, 1100.0, 5.0, 0.05, -0.02),
    ];
    for &(r, s_f, cds, t_end, e, n) in &cases {
        let grid: Vec<f64> = (0..=(t_end / month).round() as usize)
            .map(|i| i as f64 * month)
            .collect();
        let len = grid.len();
        let p = ExposureProfile::new(grid, vec![e; len], vec![n; len], vec![e + n; len]).unwrap();
        let credit = CreditCurve::flat(cds, 0.4).unwrap();
        let funding = FundingCurve::flat_spread(YieldCurve::flat(r), s_f * 1e4).unwrap();
        let x = xva_total(&p, &credit, &funding, Window::full(&p)).unwrap();
        let lam = cds / 1e4 / 0.6;
        let k = lam + r + s_f;
        let integral = (1.0 - (-k * t_end).exp()) / k;
        let cva = 0.6 * lam * e * integral;
        let fva = s_f * (e + n) * integral;
        worst = worst.max((x.cva / cva - 1.0).abs()).max((x.fva / fva - 1.0).abs());
    }
    let elapsed = start.elapsed();
    ensure(worst < 1e-3, || format!("max relative error {worst:.2e} >= 1e-3"))?;
    within(elapsed, 1.0)?;
    Ok(format!("max relative error {worst:.2e}, {:.3}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let curve = reference_curve();
    let market = MarketState::new(curve.clone(), 50.0).unwrap();
    let p = exposure_profile_vanilla(&SwapSpec::atm(10.0, Direction::ReceiveFixed), &market, 1.0 / 12.0).unwrap();
    let mut swap = McSwap {
        curve: curve.clone(),
        maturity: 10.0,
        vol: 0.005,
        receive_fixed: true,
        strike: 0.0,
    };
    swap.strike = swap.par();
    let dates = [0.5, 1.0, 2.0, 3.5, 5.0, 6.5, 8.0, 9.5];
    let mc = mc_epe(&swap, &dates, None, 100_000, 2024);
    let mut worst_z: f64 = 0.0;
    for (t, m) in dates.iter().zip(&mc) {
        let z = (p.value_at(*t, Side::After).unwrap().epe - m.mean) / m.se;
        worst_z = worst_z.max(z.abs());
    }
    let credit = CreditCurve::flat(600.0, 0.4).unwrap();
    let funding = FundingCurve::flat_spread(curve, 50.0).unwrap();
    let cva = xva_total(&p, &credit, &funding, Window::full(&p)).unwrap().cva;
    let mc_cva = mc_cva(&swap, &credit, &funding, 100_000, 2025);
    let z_cva = (cva - mc_cva.mean) / mc_cva.se;
    let elapsed = start.elapsed();
    ensure(worst_z <= 3.0, || format!("EPE off by {worst_z:.2} standard errors"))?;
    ensure(z_cva.abs() <= 3.0, || format!("CVA off by {z_cva:.2} standard errors"))?;
    within(elapsed, 30.0)?;
    Ok(format!(
        "max |z| EPE {worst_z:.2}, CVA {:.2}, {:.2}s",
        z_cva.abs(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_3(cfg: &RunConfig, setup: &PricingSetup, grid: &ScenarioGrid) -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &shock in &[500.0, 1000.0] {
        for &t in &cfg.grid.event_times {
            let r = reset_reduction(grid, shock, t);
            ensure(r > 0.0 && (10.0..=35.0).contains(&r), || {
                format!("reset {r:.3} at shock {shock}, {t}y")
            })?;
            lo = lo.min(r);
            hi = hi.max(r);
            let base = cfg.scenario(shock);
            for change in cfg.grid_spec().changes.for_shock(shock) {
                for &dv in &cfg.grid.dvols_bps {
                    let other = price_strategy(
                        setup,
                        &base.with_change(change).with_dvol(dv),
                        &Strategy::Reset { reset_time: t },
                    )
                    .unwrap()
                    .reduction_pct;
                    ensure(other.to_bits() == r.to_bits(), || {
                        format!("reset at {t}y varies with change {change}, dvol {dv}")
                    })?;
                }
            }
        }
    }
    Ok(format!("reset reductions in [{lo:.2}, {hi:.2}], scenario-invariant"))
}

fn criterion_4(cfg: &RunConfig, grid: &ScenarioGrid) -> Outcome {
    let spec = cfg.grid_spec();
    for &shock in &cfg.grid.shocks_bps {
        let changes = spec.changes.for_shock(shock);
        for &t in &cfg.grid.event_times {
            for &dv in &cfg.grid.dvols_bps {
                let row: Vec<f64> = changes.iter().map(|&c| reduction(grid, shock, t, c, dv)).collect();
                ensure(row.windows(2).all(|w| w[1] > w[0]), || {
                    format!("not increasing at {shock}, {t}y, dvol {dv}: {row:?}")
                })?;
            }
            let mb0 = reduction(grid, shock, t, 0.0, 0.0);
            let reset = reset_reduction(grid, shock, t);
            ensure(reset > mb0, || {
                format!("reset {reset:.2} <= break {mb0:.2} at {shock}, {t}y")
            })?;
        }
        let neg = reduction(grid, shock, 1.0, -shock / 2.0, 0.0);
        ensure(neg < 0.0, || format!("1y break at change {} is {neg:.2}", -shock / 2.0))?;
    }
    let ratio = reset_reduction(grid, 500.0, 2.0) / reduction(grid, 500.0, 2.0, 0.0, 0.0);
    Ok(format!(
        "rows increasing, negative at -shock/2 (1y), reset/break at change 0 (500, 2y) = {ratio:.2}"
    ))
}

fn criterion_5(cfg: &RunConfig, setup: &PricingSetup) -> Outcome {
    let start = Instant::now();
    let t = cfg.grid.breakeven_event_time;
    let a = break_even_recovery(setup, cfg.credit.base_cds_bps, 500.0, t).unwrap();
    let b = break_even_recovery(setup, cfg.credit.base_cds_bps, 1000.0, t).unwrap();
    let elapsed = start.elapsed();
    ensure(
        a.status == BracketStatus::Bracketed && b.status == BracketStatus::Bracketed,
        || format!("not bracketed: {:?} / {:?}", a.status, b.status),
    )?;
    let (fa, fb) = (a.fraction_of_shock(), b.fraction_of_shock());
    ensure((0.15..=0.45).contains(&fa), || {
        format!("fraction {fa:.3} for shock 500")
    })?;
    ensure(fb >= fa, || format!("fraction {fb:.3} for 1000 below {fa:.3} for 500"))?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "break-even at {t}y: 500 -> {:.1}bps ({fa:.3}), 1000 -> {:.1}bps ({fb:.3}), {:.3}s",
        a.change_bps,
        b.change_bps,
        elapsed.as_secs_f64()
    ))
}

fn criterion_6(cfg: &RunConfig, grid: &ScenarioGrid) -> Outcome {
    let t = 2.0;
    let mut spreads = Vec::new();
    for &shock in &[500.0, 1000.0] {
        let all_changes = cfg.grid_spec().changes.for_shock(shock);
        for &c in &all_changes {
            let row: Vec<f64> = cfg
                .grid
                .dvols_bps
                .iter()
                .map(|&dv| reduction(grid, shock, t, c, dv))
                .collect();
            ensure(row.windows(2).all(|w| w[1] <= w[0]), || {
                format!("increasing in dvol at {shock}, change {c}: {row:?}")
            })?;
        }
        let gaps: Vec<f64> = all_changes
            .iter()
            .filter(|&&c| (0.0..=shock).contains(&c))
            .map(|&c| reduction(grid, shock, t, c, -10.0) - reduction(grid, shock, t, c, 10.0))
            .collect();
        ensure(gaps.windows(2).all(|w| w[1] < w[0]), || {
            format!("dvol spread does not shrink at {shock}: {gaps:?}")
        })?;
        spreads.push(format!("{shock}: {:.1} -> {:.1}", gaps[0], gaps[gaps.len() - 1]));
    }
    Ok(format!(
        "nonincreasing in dvol at 2y; -10/+10 spread {}",
        spreads.join(", ")
    ))
}

fn criterion_7() -> Outcome {
    let syn = synthetic_corpus(100, 5, &standard_shocks(), 77);
    let thresholds = [250.0, 500.0, 1000.0];
    let horizons = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0];
    let levels = [0.05, 0.25, 0.5, 0.75, 0.95];

    let start = Instant::now();
    let corpus = prepare(&syn.quotes).series;
    let events: Vec<ShockEvent> = thresholds.iter().flat_map(|&t| detect_shocks_all(&corpus, t)).collect();
    let at_250: Vec<ShockEvent> = events.iter().filter(|e| e.threshold_bps == 250.0).cloned().collect();
    let cal = detect_crises(&at_250, &corpus, 6.0);
    let table = recovery_quantile_table(&events, &corpus, &cal, &thresholds, &horizons, &levels);
    let elapsed = start.elapsed();

    ensure(corpus == naive_prepare(&syn.quotes), || {
        "prepared series differ from reference".into()
    })?;
    let naive_events: Vec<ShockEvent> = thresholds
        .iter()
        .flat_map(|&t| corpus.iter().flat_map(move |s| naive_shocks(s, t)))
        .collect();
    ensure(events == naive_events, || {
        format!("{} events vs {} in reference", events.len(), naive_events.len())
    })?;
    let counts = naive_crisis_counts(&at_250, &corpus);
    let flags_match = cal.days.len() == counts.len()
        && cal
            .days
            .iter()
            .zip(&counts)
            .all(|(d, (date, a, s))| d.date == *date && d.crisis == naive_is_crisis(*a, *s, 6.0));
    ensure(flags_match, || "crisis flags differ from reference".into())?;
    let mut cells = 0;
    for (i, &thr) in thresholds.iter().enumerate() {
        for (j, &h) in horizons.iter().enumerate() {
            let changes: Vec<f64> = events
                .iter()
                .filter(|e| e.threshold_bps == thr)
                .filter(|e| {
                    counts
                        .iter()
                        .find(|(d, _, _)| *d == e.date)
                        .is_some_and(|(_, a, s)| naive_is_crisis(*a, *s, 6.0) == Some(true))
                })
                .filter_map(|e| naive_recovery_change(corpus.iter().find(|s| s.name() == e.name).unwrap(), e.date, h))
                .collect();
            let want: Vec<f64> = levels.iter().filter_map(|&p| naive_quantile(&changes, p)).collect();
            let cell = &table.cells[i][j];
            ensure(cell.count == changes.len() && cell.quantiles == want, || {
                format!("cell {thr}bps {h}y differs")
            })?;
            ensure(cell.quantiles.windows(2).all(|w| w[0] <= w[1]), || {
                format!("cell {thr}bps {h}y unordered")
            })?;
            cells += usize::from(cell.count > 0);
        }
    }
    within(elapsed, 10.0)?;
    Ok(format!(
        "{} events, {} crisis dates, {cells} non-empty cells match reference; pipeline {:.2}s",
        events.len(),
        cal.crisis_dates().count(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_8(cfg: &RunConfig, setup: &PricingSetup, grid: &ScenarioGrid) -> Outcome {
    let fine_setup = setup.clone().with_grid_step(setup.grid_step / 2.0);
    let fine = scenario_grid(&fine_setup, &cfg.grid_spec());
    let mut worst: f64 = 0.0;
    for (a, b) in grid.reset.iter().zip(&fine.reset) {
        worst = worst.max((a.reduction.clone()? - b.reduction.clone()?).abs());
    }
    for (a, b) in grid.breaks.iter().zip(&fine.breaks) {
        worst = worst.max((a.reduction.clone()? - b.reduction.clone()?).abs());
    }
    let t = cfg.grid.breakeven_event_time;
    for shock in [500.0, 1000.0] {
        let x = break_even_recovery(setup, cfg.credit.base_cds_bps, shock, t).unwrap();
        let y = break_even_recovery(&fine_setup, cfg.credit.base_cds_bps, shock, t).unwrap();
        worst = worst.max((x.reset_reduction - y.reset_reduction).abs());
        worst = worst.max((x.break_reduction - y.break_reduction).abs());
    }
    ensure(worst < 0.2, || format!("max change {worst:.4} points"))?;
    Ok(format!(
        "max change on halving {worst:.2e} reduction points over {} cells",
        grid.reset.len() + grid.breaks.len()
    ))
}

fn criterion_9(cfg: &RunConfig, setup: &PricingSetup) -> Outcome {
    let spec = cfg.grid_spec();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let base = one.install(|| scenario_grid(setup, &spec));
    let elapsed = start.elapsed();
    ensure(base.failed_cells() == 0, || {
        format!("{} failed cells", base.failed_cells())
    })?;
    for n in [2, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let other = pool.install(|| scenario_grid(setup, &spec));
        ensure(other == base, || format!("output differs with {n} threads"))?;
    }
    within(elapsed, 10.0)?;
    Ok(format!(
        "{} cells single-threaded in {:.3}s, identical at 2/4/8 threads",
        base.reset.len() + base.breaks.len(),
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let cfg = default_config();
    let setup = cfg.pricing_setup().unwrap();
    let grid = scenario_grid(&setup, &cfg.grid_spec());

    let results: Vec<(&str, Outcome)> = vec![
        ("closed-form CVA/FVA vs quadrature", criterion_1()),
        ("Monte Carlo EPE and CVA oracles", criterion_2()),
        ("Reset pattern", criterion_3(&cfg, &setup, &grid)),
        ("Mandatory Break patterns", criterion_4(&cfg, &grid)),
        ("break-even recovery", criterion_5(&cfg, &setup)),
        ("vol pattern", criterion_6(&cfg, &grid)),
        ("CDS pipeline vs brute force", criterion_7()),
        ("quadrature convergence", criterion_8(&cfg, &setup, &grid)),
        ("full grid runtime and determinism", criterion_9(&cfg, &setup)),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
