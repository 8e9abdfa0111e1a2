use rayon::prelude::*;

use super::{price_strategy, PricingSetup, Scenario, Strategy};

/// CDS changes to evaluate, either in bps or as fractions of each shock.
#[derive(Debug, Clone, PartialEq)]
pub enum ChangeSpec {
    Absolute(Vec<f64>),
    ShockFractions(Vec<f64>),
}

impl ChangeSpec {
    pub fn for_shock(&self, shock_bps: f64) -> Vec<f64> {
        match self {
            ChangeSpec::Absolute(v) => v.clone(),
            ChangeSpec::ShockFractions(f) => f.iter().map(|x| x * shock_bps).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ChangeSpec::Absolute(v) | ChangeSpec::ShockFractions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub base_cds_bps: f64,
    pub shocks_bps: Vec<f64>,
    pub event_times: Vec<f64>,
    pub changes: ChangeSpec,
    pub dvols_bps: Vec<f64>,
}

/// A reduction percentage, or the reason the cell could not be priced.
pub type CellResult = std::result::Result<f64, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct ResetCell {
    pub shock_bps: f64,
    pub event_time: f64,
    pub reduction: CellResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakCell {
    pub shock_bps: f64,
    pub event_time: f64,
    pub change_bps: f64,
    pub dvol_bps: f64,
    pub reduction: CellResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGrid {
    pub spec: GridSpec,
    /// Ordered by shock, then event time.
    pub reset: Vec<ResetCell>,
    /// Ordered by shock, event time, change, dvol.
    pub breaks: Vec<BreakCell>,
}

impl ScenarioGrid {
    pub fn reset_cell(&self, shock_bps: f64, event_time: f64) -> Option<&ResetCell> {
        self.reset
            .iter()
            .find(|c| c.shock_bps == shock_bps && c.event_time == event_time)
    }

    pub fn break_cell(&self, shock_bps: f64, event_time: f64, change_bps: f64, dvol_bps: f64) -> Option<&BreakCell> {
        self.breaks.iter().find(|c| {
            c.shock_bps == shock_bps
                && c.event_time == event_time
                && c.change_bps == change_bps
                && c.dvol_bps == dvol_bps
        })
    }

    pub fn failed_cells(&self) -> usize {
        self.reset.iter().filter(|c| c.reduction.is_err()).count()
            + self.breaks.iter().filter(|c| c.reduction.is_err()).count()
    }
}

/// Reset and Mandatory Break reductions over the cross product of the
/// `GridSpec` lists.
///
/// Cells are priced in parallel on the current rayon pool; output order is
/// fixed by the list order, and a failing cell is flagged rather than aborting.
pub fn scenario_grid(setup: &PricingSetup, spec: &GridSpec) -> ScenarioGrid {
    let reset_keys: Vec<(f64, f64)> = spec
        .shocks_bps
        .iter()
        .flat_map(|&s| spec.event_times.iter().map(move |&t| (s, t)))
        .collect();
    let break_keys: Vec<(f64, f64, f64, f64)> = spec
        .shocks_bps
        .iter()
        .flat_map(|&s| {
            let changes = spec.changes.for_shock(s);
            spec.event_times.iter().flat_map(move |&t| {
                let changes = changes.clone();
                changes
                    .into_iter()
                    .flat_map(move |c| spec.dvols_bps.iter().map(move |&v| (s, t, c, v)))
            })
        })
        .collect();

    let reset = reset_keys
        .par_iter()
        .map(|&(shock_bps, event_time)| {
            let sc = Scenario::new(spec.base_cds_bps, shock_bps);
            let reduction = price_strategy(setup, &sc, &Strategy::Reset { reset_time: event_time })
                .map(|p| p.reduction_pct)
                .map_err(|e| e.to_string());
            ResetCell {
                shock_bps,
                event_time,
                reduction,
            }
        })
        .collect();
    let breaks = break_keys
        .par_iter()
        .map(|&(shock_bps, event_time, change_bps, dvol_bps)| {
            let sc = Scenario::new(spec.base_cds_bps, shock_bps)
                .with_change(change_bps)
                .with_dvol(dvol_bps);
            let reduction = price_strategy(setup, &sc, &Strategy::MandatoryBreak { break_time: event_time })
                .map(|p| p.reduction_pct)
                .map_err(|e| e.to_string());
            BreakCell {
                shock_bps,
                event_time,
                change_bps,
                dvol_bps,
                reduction,
            }
        })
        .collect();
    ScenarioGrid {
        spec: spec.clone(),
        reset,
        breaks,
    }
}
