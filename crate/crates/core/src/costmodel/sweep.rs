// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_model, CostSummary, SystemConfig};
use crate::error::{ModelError, Result};
use crate::partition::StrategyChoice;
use crate::workload::{LayerClass, LayerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    DistributionBandwidth,
    ChipletCount,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bandwidth" | "bw" => Ok(SweepAxis::DistributionBandwidth),
            "chiplets" | "chiplet-count" => Ok(SweepAxis::ChipletCount),
            _ => Err(format!("unknown sweep axis `{s}` (valid: bandwidth, chiplets)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowScope {
    Class(LayerClass),
    EndToEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: u64,
    pub strategy: StrategyChoice,
    pub scope: RowScope,
    pub chiplets: u64,
    pub pes_per_chiplet: u64,
    pub bandwidth: u64,
    pub summary: CostSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn end_to_end(&self) -> impl Iterator<Item = &SweepRow> + '_ {
        self.rows.iter().filter(|r| r.scope == RowScope::EndToEnd)
    }

    pub fn for_class(&self, class: LayerClass) -> impl Iterator<Item = &SweepRow> + '_ {
        self.rows.iter().filter(move |r| r.scope == RowScope::Class(class))
    }
}

fn configure(template: &SystemConfig, axis: SweepAxis, value: u64) -> Result<SystemConfig> {
    match axis {
        SweepAxis::DistributionBandwidth => {
            if value == 0 {
                return Err(ModelError::config("bandwidth must be positive"));
            }
            Ok(template.with_distribution_bandwidth(value))
        }
        SweepAxis::ChipletCount => template.with_chiplets(value),
    }
}

/// Evaluates every (value, strategy) cell. Rows are value-major,
/// strategy-minor; within a cell the class aggregates come first, then the
/// end-to-end row.
pub fn sweep(
    workload: &[LayerSpec],
    template: &SystemConfig,
    axis: SweepAxis,
    values: &[u64],
    strategies: &[StrategyChoice],
) -> Result<SweepReport> {
    if values.is_empty() || strategies.is_empty() {
        return Err(ModelError::config("a sweep needs at least one value and one strategy"));
    }
    let systems = values
        .iter()
        .map(|&v| configure(template, axis, v).map(|sys| (v, sys)))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(u64, &SystemConfig, StrategyChoice)> = systems
        .iter()
        .flat_map(|(v, sys)| strategies.iter().map(move |&s| (*v, sys, s)))
        .collect();

    let blocks = cells
        .par_iter()
        .map(|&(value, sys, strategy)| {
            let report = run_model(workload, strategy, sys)?;
            let row = |scope, summary| SweepRow {
                value,
                strategy,
                scope,
                chiplets: sys.chiplets,
                pes_per_chiplet: sys.pes_per_chiplet,
                bandwidth: sys.distribution_nop.injection_bandwidth(),
                summary,
            };
            let mut rows: Vec<SweepRow> = report
                .class_summaries()
                .into_iter()
                .map(|(class, s)| row(RowScope::Class(class), s))
                .collect();
            rows.push(row(RowScope::EndToEnd, report.summary));
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepReport {
        axis,
        rows: blocks.into_iter().flatten().collect(),
    })
}
