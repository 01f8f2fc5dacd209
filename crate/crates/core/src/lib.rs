// SPDX-License-Identifier: Apache-2.0

//! Analytical cost model for 2.5D scale-out DNN accelerators.
//!
//! Layers are partitioned across chiplets ([`partition`]), their inputs and
//! filters distributed over a network-on-package ([`nop`]), computed on
//! per-chiplet PE arrays ([`chiplet`]) and the outputs collected back to the
//! global SRAM. [`costmodel`] composes these into per-layer and end-to-end
//! throughput, traffic and energy, and sweeps configurations.

pub mod chiplet;
pub mod costmodel;
pub mod error;
pub mod nop;
pub mod partition;
pub mod workload;

pub use chiplet::{compute_cycles, style_for, ChipletConfig, ChipletStyle};
pub use costmodel::{
    adaptive_strategy, layer_cost, resource_budget, run_model, sweep, CostSummary, LayerCost, ModelReport,
    ResourceBudget, ResourceConstants, RowScope, SweepAxis, SweepReport, SweepRow, SystemConfig,
};
pub use error::{ModelError, Result};
pub use nop::{
    avg_hops, collection_cycles, distribution_cycles, transfer_energy_pj, trx_footprint, HopModel, NopKind, NopModel,
    TrxAnchors, TrxDesignPoint, TrxProfile,
};
pub use partition::{
    build_plan, multicast_factor, per_chiplet_assignment, PartitionPlan, Strategy, StrategyChoice, TensorRole,
    TensorTraffic, TrafficMode, WorkShare,
};
pub use workload::{classify_layer, load_workload, tensor_volumes, LayerClass, LayerKind, LayerSpec, TensorVolumes};
