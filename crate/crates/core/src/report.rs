//! Tabular output of scenario grids: CSV at full precision and aligned text
//! rounded to one decimal by default.

use std::fmt::Write as _;
use std::io::Write;

use crate::strategies::{CellResult, ScenarioGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    Failed(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(v) => v.to_string(),
            Cell::Failed(_) => "ERR".into(),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self, decimals: usize) -> String {
        match self {
            Cell::Number(v) => format!("{v:.decimals$}"),
            other => other.csv(),
        }
    }
}

impl From<&CellResult> for Cell {
    fn from(r: &CellResult) -> Self {
        match r {
            Ok(v) => Cell::Number(*v),
            Err(e) => Cell::Failed(e.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Decimals shown in the text rendering.
    pub decimals: usize,
}

impl Table {
    pub fn new(title: impl Into<String>, header: Vec<String>) -> Self {
        Self {
            title: title.into(),
            header,
            rows: Vec::new(),
            decimals: 1,
        }
    }

    pub fn with_decimals(self, decimals: usize) -> Self {
        Self { decimals, ..self }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Right-aligned columns; failed cells are listed under the table.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.text(self.decimals)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.header[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| {
            fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            writeln!(out, "{}", self.title).unwrap();
        }
        writeln!(out, "{}", line(&self.header)).unwrap();
        for r in &cells {
            writeln!(out, "{}", line(r)).unwrap();
        }
        for (i, row) in self.rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let Cell::Failed(msg) = c {
                    writeln!(out, "ERR row {} column {}: {msg}", i + 1, self.header[j]).unwrap();
                }
            }
        }
        out
    }
}

fn years(t: f64) -> String {
    format!("{t}y")
}

fn num(v: f64) -> Cell {
    Cell::Number(v)
}

/// One row per shock, one column per reset time.
pub fn reset_table(grid: &ScenarioGrid, maturity: f64) -> Table {
    let spec = &grid.spec;
    let mut header: Vec<String> = ["maturity", "shock", "reached"].map(String::from).to_vec();
    header.extend(spec.event_times.iter().map(|&t| years(t)));
    let mut table = Table::new("XVA reduction (%) with a Reset, by reset time", header);
    for &shock in &spec.shocks_bps {
        let mut row = vec![num(maturity), num(shock), num(spec.base_cds_bps + shock)];
        row.extend(spec.event_times.iter().map(|&t| {
            grid.reset_cell(shock, t)
                .map_or(Cell::Empty, |c| Cell::from(&c.reduction))
        }));
        table.push(row);
    }
    table
}

/// Mandatory Break reductions at one vol shift: a row per shock and CDS
/// change, a column per break time.
pub fn break_table(grid: &ScenarioGrid, maturity: f64, dvol_bps: f64) -> Table {
    let spec = &grid.spec;
    let mut header: Vec<String> = ["maturity", "dvol", "shock", "reached", "cds_change"]
        .map(String::from)
        .to_vec();
    header.extend(spec.event_times.iter().map(|&t| years(t)));
    let mut table = Table::new(
        format!("XVA reduction (%) with a Mandatory Break, dvol {dvol_bps}bps, by break time"),
        header,
    );
    for &shock in &spec.shocks_bps {
        for change in spec.changes.for_shock(shock) {
            let mut row = vec![
                num(maturity),
                num(dvol_bps),
                num(shock),
                num(spec.base_cds_bps + shock),
                num(change),
            ];
            row.extend(spec.event_times.iter().map(|&t| {
                grid.break_cell(shock, t, change, dvol_bps)
                    .map_or(Cell::Empty, |c| Cell::from(&c.reduction))
            }));
            table.push(row);
        }
    }
    table
}

/// Mandatory Break reductions at one break time: a row per shock and CDS
/// change, a column per vol shift.
pub fn vol_table(grid: &ScenarioGrid, maturity: f64, break_time: f64) -> Table {
    let spec = &grid.spec;
    let mut header: Vec<String> = ["maturity", "shock", "reached", "split", "cds_change"]
        .map(String::from)
        .to_vec();
    header.extend(spec.dvols_bps.iter().map(|dv| format!("dvol {dv}")));
    let mut table = Table::new(
        format!("XVA reduction (%) with a Mandatory Break at {break_time}y, by vol shift"),
        header,
    );
    for &shock in &spec.shocks_bps {
        for change in spec.changes.for_shock(shock) {
            let mut row = vec![
                num(maturity),
                num(shock),
                num(spec.base_cds_bps + shock),
                num(break_time),
                num(change),
            ];
            row.extend(spec.dvols_bps.iter().map(|&dv| {
                grid.break_cell(shock, break_time, change, dv)
                    .map_or(Cell::Empty, |c| Cell::from(&c.reduction))
            }));
            table.push(row);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{ChangeSpec, GridSpec, ResetCell};

    fn grid() -> ScenarioGrid {
        ScenarioGrid {
            spec: GridSpec {
                base_cds_bps: 100.0,
                shocks_bps: vec![500.0],
                event_times: vec![1.0, 2.0],
                changes: ChangeSpec::Absolute(vec![0.0]),
                dvols_bps: vec![0.0],
            },
            reset: vec![
                ResetCell {
                    shock_bps: 500.0,
                    event_time: 1.0,
                    reduction: Ok(19.94),
                },
                ResetCell {
                    shock_bps: 500.0,
                    event_time: 2.0,
                    reduction: Err("boom".into()),
                },
            ],
            breaks: vec![],
        }
    }

    #[test]
    fn reset_table_layout() {
        let t = reset_table(&grid(), 10.0);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "maturity,shock,reached,1y,2y\n10,500,600,19.94,ERR\n"
        );
        let text = t.to_text();
        assert!(text.contains("19.9"));
        assert!(text.contains("ERR row 1 column 2y: boom"));
    }

    #[test]
    fn missing_cells_are_blank() {
        let t = break_table(&grid(), 10.0, 0.0);
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0][5..].iter().all(|c| *c == Cell::Empty));
    }
}
