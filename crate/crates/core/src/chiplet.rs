// SPDX-License-Identifier: Apache-2.0

//! Intra-chiplet compute time.
//!
//! A chiplet maps a set of "spatial" loop indices onto its PEs, folding
//! when the set is larger than the array, and steps through the remaining
//! "temporal" indices one per cycle.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::partition::{ceil_div, per_chiplet_assignment, PartitionPlan, Strategy, WorkShare};

pub const DEFAULT_CLOCK_MHZ: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChipletStyle {
    /// Output channels x input channels in space.
    NvdlaLike,
    /// Output-plane tile in space.
    ShidiannaoLike,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChipletConfig {
    pub pes: u64,
    pub style: ChipletStyle,
    pub clock_mhz: f64,
}

impl ChipletConfig {
    pub fn new(pes: u64, style: ChipletStyle) -> Self {
        ChipletConfig {
            pes,
            style,
            clock_mhz: DEFAULT_CLOCK_MHZ,
        }
    }
}

pub fn style_for(strategy: Strategy) -> ChipletStyle {
    match strategy {
        Strategy::KpCp | Strategy::NpCp => ChipletStyle::NvdlaLike,
        Strategy::YpXp => ChipletStyle::ShidiannaoLike,
    }
}

/// Size of the spatially mapped index set for a share.
pub fn spatial_extent(layer_c: u64, share: &WorkShare, style: ChipletStyle) -> u64 {
    match style {
        ChipletStyle::NvdlaLike => share.k_local * layer_c,
        ChipletStyle::ShidiannaoLike => share.out_rows * share.out_cols,
    }
}

pub fn compute_cycles(plan: &PartitionPlan, share: &WorkShare, chiplet: &ChipletConfig) -> u64 {
    if share.elementwise_ops > 0 {
        return ceil_div(share.elementwise_ops, chiplet.pes);
    }
    if share.macs == 0 {
        return 0;
    }
    let spatial = spatial_extent(plan.layer.c, share, chiplet.style);
    debug_assert_eq!(share.macs % spatial, 0, "spatial extent must divide the share");
    let temporal = share.macs / spatial;
    ceil_div(spatial, chiplet.pes) * temporal
}

/// Layer compute time: the slowest chiplet bounds the layer.
pub fn layer_compute_cycles(plan: &PartitionPlan, chiplet: &ChipletConfig) -> Result<u64> {
    let mut worst = 0;
    for idx in 0..plan.active_chiplets {
        let share = per_chiplet_assignment(plan, idx)?;
        worst = worst.max(compute_cycles(plan, &share, chiplet));
    }
    Ok(worst)
}
