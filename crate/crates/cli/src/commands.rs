use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clientxva::cdsanalytics::{
    detect_crises, detect_shocks_all, prepare, read_quotes_path, recovery_quantile_table, write_events_csv,
    write_recovery_csv, write_timeline_csv, CdsSeries, PrepareReport, ShockEvent,
};
use clientxva::config::RunConfig;
use clientxva::report::{break_table, reset_table, vol_table, Cell, Table};
use clientxva::strategies::{
    break_even_recovery, price_strategy, scenario_grid, strategy_profiles, Strategy, StrategyPrice,
};
use clientxva::xva::XvaBreakdown;

use crate::{Cli, Command, CorpusArgs, PriceArgs, StrategyArg};

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_DATA: u8 = 2;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        error: e.into(),
    }
}

fn data_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_DATA,
        error: e.into(),
    }
}

type CmdResult = Result<(), Failure>;

pub fn run(cli: Cli) -> CmdResult {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(config_err)?,
        None => RunConfig::default(),
    };
    if let Some(step) = cli.grid_step {
        config.grid.step = step;
        config.validate().map_err(config_err)?;
    }
    let threads = cli.threads.unwrap_or(0);
    if cli.threads == Some(0) {
        return Err(config_err(anyhow!("--threads must be at least 1")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(config_err)?;
    let out = cli.out;
    pool.install(|| match cli.command {
        Command::Price(args) => price(&config, &out, &args),
        Command::Grid => grid(&config, &out),
        Command::Breakeven { event_time } => breakeven(&config, &out, event_time),
        Command::CdsAnalyze(args) => cds(&config, &out, &args, CdsStage::Analyze),
        Command::CdsCrises(args) => cds(&config, &out, &args, CdsStage::Crises),
        Command::CdsRecovery(args) => cds(&config, &out, &args, CdsStage::Recovery),
    })
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(config_err)?;
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(config_err)
}

fn write_table(out: &Path, stem: &str, table: &Table) -> CmdResult {
    table
        .write_csv(create(out, &format!("{stem}.csv"))?)
        .map_err(config_err)?;
    let mut txt = create(out, &format!("{stem}.txt"))?;
    txt.write_all(table.to_text().as_bytes()).map_err(config_err)?;
    Ok(())
}

fn strategy_from(args: &PriceArgs) -> Result<Strategy, Failure> {
    let time = || {
        args.event_time
            .ok_or_else(|| config_err(anyhow!("--event-time is required for {:?}", args.strategy)))
    };
    Ok(match args.strategy {
        StrategyArg::Vanilla => Strategy::Vanilla,
        StrategyArg::Reset => Strategy::Reset { reset_time: time()? },
        StrategyArg::MandatoryBreak => Strategy::MandatoryBreak { break_time: time()? },
        StrategyArg::Restructuring => Strategy::Restructuring { time: time()? },
    })
}

fn breakdown_line(label: &str, x: &XvaBreakdown) -> String {
    format!("{label:<13} {:>24} {:>24} {:>24}", x.cva, x.fva, x.xva())
}

fn format_price(strategy: &Strategy, p: &StrategyPrice, vanilla: &XvaBreakdown) -> String {
    let mut s = String::new();
    let name = match strategy {
        Strategy::Vanilla => "vanilla".to_string(),
        Strategy::Reset { reset_time } => format!("reset at {reset_time}y"),
        Strategy::MandatoryBreak { break_time } => format!("mandatory break at {break_time}y"),
        Strategy::Restructuring { time } => format!("restructuring at {time}y"),
    };
    s.push_str(&format!("strategy      {name}\n"));
    s.push_str(&format!("{:<13} {:>24} {:>24} {:>24}\n", "leg", "cva", "fva", "xva"));
    if let Some(c) = &p.continuation_leg {
        s.push_str(&breakdown_line("first", &p.first_leg));
        s.push('\n');
        s.push_str(&breakdown_line("continuation", c));
        s.push('\n');
    }
    s.push_str(&breakdown_line("total", &p.total));
    s.push('\n');
    s.push_str(&breakdown_line("vanilla", vanilla));
    s.push('\n');
    s.push_str(&format!("reduction_pct {}\n", p.reduction_pct));
    s
}

fn price(config: &RunConfig, out: &Path, args: &PriceArgs) -> CmdResult {
    let setup = config.pricing_setup().map_err(config_err)?;
    let shock = args.shock.unwrap_or(config.grid.shocks_bps[0]);
    let scenario = config.scenario(shock).with_change(args.change).with_dvol(args.dvol);
    let strategy = strategy_from(args)?;
    let p = price_strategy(&setup, &scenario, &strategy).map_err(config_err)?;
    let vanilla = price_strategy(&setup, &scenario, &Strategy::Vanilla).map_err(config_err)?;
    println!(
        "scenario      base {}bps, shock {}bps, reached {}bps, change {}bps, dvol {}bps",
        scenario.base_cds_bps,
        scenario.shock_bps,
        scenario.reached_bps(),
        scenario.cds_change_bps,
        scenario.dvol_bps
    );
    print!("{}", format_price(&strategy, &p, &vanilla.total));
    if args.profiles {
        let profiles = strategy_profiles(&setup, &scenario, &strategy).map_err(config_err)?;
        profiles
            .first
            .write_csv(create(out, "profile.csv")?)
            .map_err(config_err)?;
        if let Some(c) = &profiles.continuation {
            c.write_csv(create(out, "continuation_profile.csv")?)
                .map_err(config_err)?;
        }
        println!("profiles written to {}", out.display());
    }
    Ok(())
}

fn grid(config: &RunConfig, out: &Path) -> CmdResult {
    let setup = config.pricing_setup().map_err(config_err)?;
    let grid = scenario_grid(&setup, &config.grid_spec());
    let maturity = config.swap.maturity;

    let mut tables = vec![("reset".to_string(), reset_table(&grid, maturity))];
    for &dv in &config.grid.dvols_bps {
        tables.push((format!("break_dvol_{dv}"), break_table(&grid, maturity, dv)));
    }
    for &t in &config.grid.event_times {
        tables.push((format!("break_vol_at_{t}y"), vol_table(&grid, maturity, t)));
    }
    for (stem, table) in &tables {
        write_table(out, stem, table)?;
        println!("{}", table.to_text());
    }
    let failed = grid.failed_cells();
    if failed > 0 {
        eprintln!("warning: {failed} grid cells could not be priced (marked ERR)");
    }
    println!(
        "{} reset cells, {} break cells written to {}",
        grid.reset.len(),
        grid.breaks.len(),
        out.display()
    );
    Ok(())
}

fn breakeven(config: &RunConfig, out: &Path, event_time: Option<f64>) -> CmdResult {
    let setup = config.pricing_setup().map_err(config_err)?;
    let t = event_time.unwrap_or(config.grid.breakeven_event_time);
    let header = [
        "shock",
        "event_time",
        "change_bps",
        "fraction_of_shock",
        "status",
        "reset_reduction",
        "break_reduction",
    ];
    let mut table = Table::new(
        format!("Break-even CDS improvement, Mandatory Break vs Reset at {t}y"),
        header.map(String::from).to_vec(),
    )
    .with_decimals(3);
    for &shock in &config.grid.shocks_bps {
        let be = break_even_recovery(&setup, config.credit.base_cds_bps, shock, t).map_err(config_err)?;
        table.push(vec![
            Cell::Number(be.shock_bps),
            Cell::Number(be.event_time),
            Cell::Number(be.change_bps),
            Cell::Number(be.fraction_of_shock()),
            Cell::Text(format!("{:?}", be.status).to_lowercase()),
            Cell::Number(be.reset_reduction),
            Cell::Number(be.break_reduction),
        ]);
    }
    write_table(out, "breakeven", &table)?;
    print!("{}", table.to_text());
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum CdsStage {
    Analyze,
    Crises,
    Recovery,
}

const MAX_ROW_ERRORS_SHOWN: usize = 20;

fn load_corpus(config: &RunConfig, args: &CorpusArgs) -> Result<Option<PrepareReport>, Failure> {
    let path: PathBuf = args
        .corpus
        .clone()
        .or_else(|| config.cds.corpus.clone())
        .ok_or_else(|| config_err(anyhow!("no corpus given: pass --corpus or set cds.corpus")))?;
    if !path.is_file() {
        return Err(config_err(anyhow!("corpus {} does not exist", path.display())));
    }
    let ingest = read_quotes_path(&path).map_err(data_err)?;
    for e in ingest.errors.iter().take(MAX_ROW_ERRORS_SHOWN) {
        eprintln!("{}:{}: {}", path.display(), e.line, e.message);
    }
    if ingest.errors.len() > MAX_ROW_ERRORS_SHOWN {
        eprintln!("... {} more row errors", ingest.errors.len() - MAX_ROW_ERRORS_SHOWN);
    }
    println!(
        "rows read {}, parsed {}, rejected {}",
        ingest.rows_read(),
        ingest.quotes.len(),
        ingest.errors.len()
    );
    if ingest.rows_read() == 0 {
        eprintln!("warning: corpus {} has no rows", path.display());
        return Ok(None);
    }
    if ingest.quotes.is_empty() {
        return Err(data_err(anyhow!("no usable rows in {}", path.display())));
    }
    let prepared = prepare(&ingest.quotes);
    println!(
        "names kept {}, dropped short {}, quotes outside regions {}",
        prepared.series.len(),
        prepared.short_names.len(),
        prepared.quotes_outside_regions
    );
    for name in &prepared.conflicting_regions {
        eprintln!("warning: {name} is quoted under several regions; keeping the first");
    }
    Ok(Some(prepared))
}

fn cds(config: &RunConfig, out: &Path, args: &CorpusArgs, stage: CdsStage) -> CmdResult {
    let c = &config.cds;
    let corpus: Vec<CdsSeries> = load_corpus(config, args)?.map(|p| p.series).unwrap_or_default();

    let mut thresholds = c.thresholds_bps.clone();
    if stage >= CdsStage::Crises && !thresholds.contains(&c.crisis_shock_bps) {
        thresholds.push(c.crisis_shock_bps);
    }
    let events: Vec<ShockEvent> = thresholds
        .iter()
        .flat_map(|&thr| detect_shocks_all(&corpus, thr))
        .collect();

    if stage == CdsStage::Analyze {
        write_events_csv(&events, create(out, "events.csv")?).map_err(config_err)?;
        for &thr in &c.thresholds_bps {
            let n = events.iter().filter(|e| e.threshold_bps == thr).count();
            println!("threshold {thr}bps: {n} events");
        }
        return Ok(());
    }

    let crisis_events: Vec<ShockEvent> = events
        .iter()
        .filter(|e| e.threshold_bps == c.crisis_shock_bps)
        .cloned()
        .collect();
    let calendar = detect_crises(&crisis_events, &corpus, c.crisis_min_pct);
    let undefined = calendar.undefined_dates().count();
    if undefined > 0 {
        eprintln!("warning: {undefined} dates have no active names; crisis flag undefined");
    }
    if stage == CdsStage::Crises {
        write_timeline_csv(&calendar, create(out, "timeline.csv")?).map_err(config_err)?;
        println!(
            "{} dates, {} crisis dates at {}% of active names with a {}bps shock",
            calendar.days.len(),
            calendar.crisis_dates().count(),
            c.crisis_min_pct,
            c.crisis_shock_bps
        );
        return Ok(());
    }

    let table = recovery_quantile_table(
        &events,
        &corpus,
        &calendar,
        &c.thresholds_bps,
        &c.horizons_years,
        &c.quantiles,
    );
    write_recovery_csv(&table, create(out, "recovery.csv")?).map_err(config_err)?;
    for (i, &thr) in table.thresholds_bps.iter().enumerate() {
        let counts: Vec<String> = table
            .horizons_years
            .iter()
            .zip(&table.cells[i])
            .map(|(h, cell)| format!("{h}y:{}", cell.count))
            .collect();
        println!("threshold {thr}bps events in crisis by horizon {}", counts.join(" "));
    }
    Ok(())
}
