// SPDX-License-Identifier: Apache-2.0

//! Report rows and their CSV / JSON encodings.
//!
//! CSV files start with a `# schema=1` comment line; the column order of
//! each row type is part of that schema. Floats carry 6 significant digits.

use nop_explorer_core::costmodel::{BudgetGroup, ResourceBudget};
use nop_explorer_core::{CostSummary, LayerCost, LayerSpec, RowScope, SweepAxis, SweepRow};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_LINE: &str = "# schema=1";
pub const TOTAL: &str = "TOTAL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Rounds to 6 significant digits.
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub layer: String,
    pub layer_class: String,
    pub strategy: String,
    pub chiplets: u64,
    pub pes_per_chiplet: u64,
    pub bandwidth: u64,
    pub distribution_cycles: u64,
    pub compute_cycles: u64,
    pub collection_cycles: u64,
    pub total_cycles: u64,
    pub macs_per_cycle: f64,
    pub multicast_factor: f64,
    pub distribution_energy_pj: f64,
    pub collection_energy_pj: f64,
}

impl ReportRow {
    pub fn from_cost(c: &LayerCost) -> Self {
        ReportRow {
            layer: c.layer.clone(),
            layer_class: c.layer_class.to_string(),
            strategy: c.strategy.to_string(),
            chiplets: c.chiplets,
            pes_per_chiplet: c.pes_per_chiplet,
            bandwidth: c.bandwidth,
            distribution_cycles: c.distribution_cycles,
            compute_cycles: c.compute_cycles,
            collection_cycles: c.collection_cycles,
            total_cycles: c.total_cycles,
            macs_per_cycle: round6(c.macs_per_cycle),
            multicast_factor: round6(c.multicast_factor),
            distribution_energy_pj: round6(c.distribution_energy_pj),
            collection_energy_pj: round6(c.collection_energy_pj),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_summary(
        layer: &str,
        layer_class: &str,
        strategy: &str,
        chiplets: u64,
        pes_per_chiplet: u64,
        bandwidth: u64,
        s: &CostSummary,
    ) -> Self {
        ReportRow {
            layer: layer.to_owned(),
            layer_class: layer_class.to_owned(),
            strategy: strategy.to_owned(),
            chiplets,
            pes_per_chiplet,
            bandwidth,
            distribution_cycles: s.distribution_cycles,
            compute_cycles: s.compute_cycles,
            collection_cycles: s.collection_cycles,
            total_cycles: s.total_cycles,
            macs_per_cycle: round6(s.macs_per_cycle()),
            multicast_factor: round6(s.multicast_factor()),
            distribution_energy_pj: round6(s.distribution_energy_pj),
            collection_energy_pj: round6(s.collection_energy_pj),
        }
    }
}

/// One sweep cell: a layer-class aggregate (`@Class`) or the end-to-end total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis: String,
    pub value: u64,
    pub layer: String,
    pub layer_class: String,
    pub strategy: String,
    pub chiplets: u64,
    pub pes_per_chiplet: u64,
    pub bandwidth: u64,
    pub layers: u64,
    pub distribution_cycles: u64,
    pub compute_cycles: u64,
    pub collection_cycles: u64,
    pub total_cycles: u64,
    pub macs: u64,
    pub macs_per_cycle: f64,
    pub multicast_factor: f64,
    pub distribution_energy_pj: f64,
    pub collection_energy_pj: f64,
}

pub fn axis_name(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::DistributionBandwidth => "bandwidth",
        SweepAxis::ChipletCount => "chiplets",
    }
}

impl SweepRecord {
    pub fn new(axis: SweepAxis, row: &SweepRow) -> Self {
        let (layer, class) = match row.scope {
            RowScope::Class(c) => (format!("@{c}"), c.to_string()),
            RowScope::EndToEnd => (TOTAL.to_owned(), TOTAL.to_owned()),
        };
        let s = &row.summary;
        SweepRecord {
            axis: axis_name(axis).to_owned(),
            value: row.value,
            layer,
            layer_class: class,
            strategy: row.strategy.to_string(),
            chiplets: row.chiplets,
            pes_per_chiplet: row.pes_per_chiplet,
            bandwidth: row.bandwidth,
            layers: s.layers,
            distribution_cycles: s.distribution_cycles,
            compute_cycles: s.compute_cycles,
            collection_cycles: s.collection_cycles,
            total_cycles: s.total_cycles,
            macs: s.macs,
            macs_per_cycle: round6(s.macs_per_cycle()),
            multicast_factor: round6(s.multicast_factor()),
            distribution_energy_pj: round6(s.distribution_energy_pj),
            collection_energy_pj: round6(s.collection_energy_pj),
        }
    }
}

/// Side-by-side cost of one layer on systems `a` and `b`. Ratios are a / b,
/// so values above 1 favour `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub layer: String,
    pub layer_class: String,
    pub a: String,
    pub b: String,
    pub a_strategy: String,
    pub b_strategy: String,
    pub a_total_cycles: u64,
    pub b_total_cycles: u64,
    pub a_macs_per_cycle: f64,
    pub b_macs_per_cycle: f64,
    pub speedup: f64,
    pub a_distribution_energy_pj: f64,
    pub b_distribution_energy_pj: f64,
    pub energy_ratio: f64,
}

pub fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub group: String,
    pub component: String,
    pub count: u64,
    pub unit_area_mm2: f64,
    pub area_mm2: f64,
    pub area_pct: f64,
    pub unit_power_mw: f64,
    pub power_mw: f64,
    pub power_pct: f64,
}

pub fn resource_rows(b: &ResourceBudget) -> Vec<ResourceRow> {
    let pct = |part: f64, whole: f64| round6(100.0 * part / whole);
    let mut rows: Vec<ResourceRow> = b
        .items
        .iter()
        .map(|i| ResourceRow {
            group: match i.group {
                BudgetGroup::Chiplets => "chiplets",
                BudgetGroup::Memory => "memory",
            }
            .to_owned(),
            component: i.name.clone(),
            count: i.count,
            unit_area_mm2: round6(i.unit_area_mm2),
            area_mm2: round6(i.area_mm2),
            area_pct: pct(i.area_mm2, b.total_area_mm2),
            unit_power_mw: round6(i.unit_power_mw),
            power_mw: round6(i.power_mw),
            power_pct: pct(i.power_mw, b.total_power_mw),
        })
        .collect();
    rows.push(ResourceRow {
        group: TOTAL.to_owned(),
        component: TOTAL.to_owned(),
        count: 1,
        unit_area_mm2: round6(b.total_area_mm2),
        area_mm2: round6(b.total_area_mm2),
        area_pct: 100.0,
        unit_power_mw: round6(b.total_power_mw),
        power_mw: round6(b.total_power_mw),
        power_pct: 100.0,
    });
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub layer: String,
    pub kind: String,
    pub layer_class: String,
}

impl ClassRow {
    pub fn new(l: &LayerSpec) -> Self {
        ClassRow {
            layer: l.name.clone(),
            kind: l.kind.to_string(),
            layer_class: nop_explorer_core::classify_layer(l).to_string(),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    Ok(format!("{SCHEMA_LINE}\n{}", String::from_utf8_lossy(&body)))
}

pub fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report rows serialize");
    s.push('\n');
    s
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, csv::Error> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => Ok(to_json(rows)),
    }
}
