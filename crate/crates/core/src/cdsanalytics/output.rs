use std::io::Write;

use super::{CrisisCalendar, RecoveryTable, ShockEvent};

/// `name,date,threshold,size_bps`
pub fn write_events_csv<W: Write>(events: &[ShockEvent], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["name", "date", "threshold", "size_bps"])?;
    for e in events {
        w.write_record([
            e.name.clone(),
            e.date.to_string(),
            e.threshold_bps.to_string(),
            e.size_bps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `date,active,pct_shocked,crisis_flag`; dates without active names leave
/// the last two fields empty.
pub fn write_timeline_csv<W: Write>(calendar: &CrisisCalendar, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "active", "pct_shocked", "crisis_flag"])?;
    for d in &calendar.days {
        w.write_record([
            d.date.to_string(),
            d.active.to_string(),
            d.pct_shocked.map_or_else(String::new, |p| p.to_string()),
            d.crisis.map_or_else(String::new, |c| u8::from(c).to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn level_label(p: f64) -> String {
    format!("{}%", 100.0 * p)
}

fn horizon_label(h: f64) -> String {
    format!("{h}y")
}

/// One block per threshold: a row per quantile level and a final `n` row
/// of event counts, with a column per horizon. Empty cells are blank.
pub fn write_recovery_csv<W: Write>(table: &RecoveryTable, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["shock".to_string(), "quantile".to_string()];
    header.extend(table.horizons_years.iter().map(|&h| horizon_label(h)));
    w.write_record(&header)?;
    for (i, &thr) in table.thresholds_bps.iter().enumerate() {
        for (k, &p) in table.quantile_levels.iter().enumerate() {
            let mut row = vec![thr.to_string(), level_label(p)];
            row.extend(
                table.cells[i]
                    .iter()
                    .map(|c| c.quantiles.get(k).map_or_else(String::new, |q| q.to_string())),
            );
            w.write_record(&row)?;
        }
        let mut row = vec![thr.to_string(), "n".to_string()];
        row.extend(table.cells[i].iter().map(|c| c.count.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
