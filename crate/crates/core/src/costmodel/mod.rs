// SPDX-License-Identifier: Apache-2.0

//! Per-layer and end-to-end cost of a workload on a chiplet system.
//!
//! A layer runs in three phases: inputs and filters are distributed from the
//! global SRAM, chiplets compute, and outputs are collected back over the
//! wired mesh. Collection overlaps compute; distribution does not:
//!
//! ```text
//! total = distribution + max(compute, collection)
//! ```
//!
//! Layers execute strictly one after another.

mod resources;
mod sweep;

pub use resources::{resource_budget, BudgetGroup, BudgetItem, ResourceBudget, ResourceConstants};
pub use sweep::{sweep, RowScope, SweepAxis, SweepReport, SweepRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chiplet::{layer_compute_cycles, style_for, ChipletConfig, DEFAULT_CLOCK_MHZ};
use crate::error::{ModelError, Result};
use crate::nop::{collection_cycles, default_presets, distribution_cycles, transfer_energy_pj, NopKind, NopModel};
use crate::partition::{build_plan, multicast_factor, Strategy, StrategyChoice, TensorTraffic};
use crate::workload::{classify_layer, LayerClass, LayerSpec};

pub const DEFAULT_TOTAL_PES: u64 = 16384;
pub const DEFAULT_SRAM_BYTES: u64 = 13 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub total_pes: u64,
    pub chiplets: u64,
    pub pes_per_chiplet: u64,
    pub distribution_nop: NopModel,
    pub collection_nop: NopModel,
    pub sram_bytes: u64,
    pub clock_mhz: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let presets = default_presets();
        SystemConfig {
            total_pes: DEFAULT_TOTAL_PES,
            chiplets: 256,
            pes_per_chiplet: 64,
            distribution_nop: presets["wienna-C"].clone(),
            collection_nop: presets["interposer-A"].clone(),
            sram_bytes: DEFAULT_SRAM_BYTES,
            clock_mhz: DEFAULT_CLOCK_MHZ,
        }
    }
}

impl SystemConfig {
    pub fn new(chiplets: u64, pes_per_chiplet: u64, distribution: NopModel, collection: NopModel) -> Result<Self> {
        let total_pes = chiplets
            .checked_mul(pes_per_chiplet)
            .ok_or(ModelError::Overflow("total_pes"))?;
        let sys = SystemConfig {
            total_pes,
            chiplets,
            pes_per_chiplet,
            distribution_nop: distribution,
            collection_nop: collection,
            ..SystemConfig::default()
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Interposer-only system: the mesh carries both distribution and collection.
    pub fn baseline(chiplets: u64, pes_per_chiplet: u64, mesh: NopModel) -> Result<Self> {
        SystemConfig::new(chiplets, pes_per_chiplet, mesh.clone(), mesh)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chiplets == 0 || self.pes_per_chiplet == 0 {
            return Err(ModelError::config("chiplets and pes_per_chiplet must be positive"));
        }
        if self.chiplets.checked_mul(self.pes_per_chiplet) != Some(self.total_pes) {
            return Err(ModelError::config(format!(
                "chiplets ({}) x pes_per_chiplet ({}) must equal total_pes ({})",
                self.chiplets, self.pes_per_chiplet, self.total_pes
            )));
        }
        if self.clock_mhz.is_nan() || self.clock_mhz <= 0.0 {
            return Err(ModelError::config("clock must be positive"));
        }
        if self.collection_nop.kind != NopKind::WiredMesh {
            return Err(ModelError::Kind(format!(
                "collection NoP `{}` must be a wired mesh",
                self.collection_nop.label
            )));
        }
        self.distribution_nop.validate()?;
        self.collection_nop.validate()
    }

    /// Departures from the evaluated design range; informational only.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(32..=1024).contains(&self.chiplets) {
            out.push(format!(
                "{} chiplets is outside the 32..=1024 design range",
                self.chiplets
            ));
        }
        if !(64..=512).contains(&self.pes_per_chiplet) {
            out.push(format!(
                "{} PEs per chiplet is outside the 64..=512 design range",
                self.pes_per_chiplet
            ));
        }
        out
    }

    /// Same total PE count split over a different number of chiplets.
    pub fn with_chiplets(&self, chiplets: u64) -> Result<Self> {
        if chiplets == 0 || !self.total_pes.is_multiple_of(chiplets) {
            return Err(ModelError::config(format!(
                "chiplet count {chiplets} does not divide total_pes {}",
                self.total_pes
            )));
        }
        Ok(SystemConfig {
            chiplets,
            pes_per_chiplet: self.total_pes / chiplets,
            ..self.clone()
        })
    }

    pub fn with_distribution_bandwidth(&self, bandwidth: u64) -> Self {
        let mut sys = self.clone();
        sys.distribution_nop.bandwidth_bytes_per_cycle = bandwidth;
        sys
    }

    pub fn peak_macs_per_cycle(&self) -> u64 {
        self.total_pes
    }

    /// Wireless datarate needed to match the distribution bandwidth.
    pub fn distribution_datarate_gbps(&self) -> f64 {
        self.distribution_nop.injection_bandwidth() as f64 * 8.0 * self.clock_mhz / 1000.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCost {
    pub layer: String,
    pub layer_class: LayerClass,
    pub strategy: Strategy,
    pub chiplets: u64,
    pub pes_per_chiplet: u64,
    pub bandwidth: u64,
    pub distribution_cycles: u64,
    pub compute_cycles: u64,
    pub collection_cycles: u64,
    pub total_cycles: u64,
    pub distribution_energy_pj: f64,
    pub collection_energy_pj: f64,
    pub macs: u64,
    pub elementwise_ops: u64,
    pub distribution_bytes_unique: u64,
    pub distribution_bytes_expanded: u64,
    pub macs_per_cycle: f64,
    pub multicast_factor: f64,
}

pub fn layer_cost(layer: &LayerSpec, strategy: Strategy, sys: &SystemConfig) -> Result<LayerCost> {
    sys.validate()?;
    let plan = build_plan(layer, strategy, sys.chiplets)?;
    let chiplet = ChipletConfig {
        pes: sys.pes_per_chiplet,
        style: style_for(strategy),
        clock_mhz: sys.clock_mhz,
    };
    let dist: Vec<TensorTraffic> = plan.distribution_traffic().copied().collect();
    let output: Vec<TensorTraffic> = plan.output_traffic().copied().into_iter().collect();

    let distribution = distribution_cycles(&sys.distribution_nop, &dist, sys.chiplets);
    let compute = layer_compute_cycles(&plan, &chiplet)?;
    let collection = collection_cycles(&sys.collection_nop, plan.volumes.output_bytes, sys.chiplets)?;
    let total = distribution + compute.max(collection);

    Ok(LayerCost {
        layer: layer.name.clone(),
        layer_class: classify_layer(layer),
        strategy,
        chiplets: sys.chiplets,
        pes_per_chiplet: sys.pes_per_chiplet,
        bandwidth: sys.distribution_nop.injection_bandwidth(),
        distribution_cycles: distribution,
        compute_cycles: compute,
        collection_cycles: collection,
        total_cycles: total,
        distribution_energy_pj: transfer_energy_pj(&sys.distribution_nop, &dist, sys.chiplets),
        collection_energy_pj: transfer_energy_pj(&sys.collection_nop, &output, sys.chiplets),
        macs: plan.volumes.macs,
        elementwise_ops: plan.volumes.elementwise_ops,
        distribution_bytes_unique: plan.distribution_bytes_unique(),
        distribution_bytes_expanded: plan.distribution_bytes_expanded(),
        macs_per_cycle: plan.volumes.macs as f64 / total as f64,
        multicast_factor: multicast_factor(&plan),
    })
}

/// Fastest strategy for the layer; ties go to the earlier of KP_CP, NP_CP, YP_XP.
pub fn adaptive_strategy(layer: &LayerSpec, sys: &SystemConfig) -> Result<(Strategy, LayerCost)> {
    let mut best: Option<LayerCost> = None;
    for strategy in Strategy::ALL {
        let cost = layer_cost(layer, strategy, sys)?;
        if best.as_ref().is_none_or(|b| cost.total_cycles < b.total_cycles) {
            best = Some(cost);
        }
    }
    let best = best.expect("at least one strategy");
    Ok((best.strategy, best))
}

pub fn layer_cost_for(layer: &LayerSpec, choice: StrategyChoice, sys: &SystemConfig) -> Result<LayerCost> {
    match choice {
        StrategyChoice::Fixed(s) => layer_cost(layer, s, sys),
        StrategyChoice::Adaptive => adaptive_strategy(layer, sys).map(|(_, c)| c),
    }
}

/// Running totals over a set of layer costs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostSummary {
    pub layers: u64,
    pub distribution_cycles: u64,
    pub compute_cycles: u64,
    pub collection_cycles: u64,
    pub total_cycles: u64,
    pub macs: u64,
    pub distribution_energy_pj: f64,
    pub collection_energy_pj: f64,
    pub distribution_bytes_unique: u64,
    pub distribution_bytes_expanded: u64,
}

impl CostSummary {
    pub fn add(&mut self, c: &LayerCost) {
        self.layers += 1;
        self.distribution_cycles += c.distribution_cycles;
        self.compute_cycles += c.compute_cycles;
        self.collection_cycles += c.collection_cycles;
        self.total_cycles += c.total_cycles;
        self.macs += c.macs;
        self.distribution_energy_pj += c.distribution_energy_pj;
        self.collection_energy_pj += c.collection_energy_pj;
        self.distribution_bytes_unique += c.distribution_bytes_unique;
        self.distribution_bytes_expanded += c.distribution_bytes_expanded;
    }

    pub fn of<'a>(costs: impl IntoIterator<Item = &'a LayerCost>) -> Self {
        let mut s = CostSummary::default();
        costs.into_iter().for_each(|c| s.add(c));
        s
    }

    pub fn macs_per_cycle(&self) -> f64 {
        if self.total_cycles == 0 {
            0.0
        } else {
            self.macs as f64 / self.total_cycles as f64
        }
    }

    pub fn multicast_factor(&self) -> f64 {
        if self.distribution_bytes_unique == 0 {
            1.0
        } else {
            self.distribution_bytes_expanded as f64 / self.distribution_bytes_unique as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub strategy: StrategyChoice,
    pub layers: Vec<LayerCost>,
    pub summary: CostSummary,
}

impl ModelReport {
    pub fn total_cycles(&self) -> u64 {
        self.summary.total_cycles
    }

    pub fn total_macs(&self) -> u64 {
        self.summary.macs
    }

    pub fn avg_macs_per_cycle(&self) -> f64 {
        self.summary.macs_per_cycle()
    }

    pub fn total_distribution_energy_pj(&self) -> f64 {
        self.summary.distribution_energy_pj
    }

    /// Totals per layer class, in class order, for classes present.
    pub fn class_summaries(&self) -> Vec<(LayerClass, CostSummary)> {
        LayerClass::ALL
            .into_iter()
            .filter_map(|class| {
                let s = CostSummary::of(self.layers.iter().filter(|c| c.layer_class == class));
                (s.layers > 0).then_some((class, s))
            })
            .collect()
    }
}

/// Evaluates every layer (in parallel) and sums the sequential execution.
pub fn run_model(workload: &[LayerSpec], strategy: StrategyChoice, sys: &SystemConfig) -> Result<ModelReport> {
    if workload.is_empty() {
        return Err(ModelError::config("workload has no layers"));
    }
    sys.validate()?;
    let layers = workload
        .par_iter()
        .map(|layer| layer_cost_for(layer, strategy, sys))
        .collect::<Result<Vec<_>>>()?;
    let summary = CostSummary::of(&layers);
    Ok(ModelReport {
        strategy,
        layers,
        summary,
    })
}
