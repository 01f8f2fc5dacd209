// SPDX-License-Identifier: Apache-2.0

//! Partitioning of a layer across accelerator chiplets.
//!
//! Each strategy splits one loop dimension across chiplets:
//!
//! - `KP_CP` splits output channels (filters). Every chiplet needs the whole
//!   input, so inputs are broadcast and filter slices are unicast.
//! - `NP_CP` splits the batch. Inputs are unicast, filters broadcast.
//! - `YP_XP` tiles the output plane. The whole input and all filters are
//!   broadcast and each chiplet keeps the region it needs.
//!
//! Residual layers have no filters and are split elementwise; all their
//! tensors are unicast.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::workload::{tensor_volumes, LayerKind, LayerSpec, TensorVolumes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "KP_CP")]
    KpCp,
    #[serde(rename = "NP_CP")]
    NpCp,
    #[serde(rename = "YP_XP")]
    YpXp,
}

impl Strategy {
    /// Enumeration order doubles as the tie-break order for adaptive selection.
    pub const ALL: [Strategy; 3] = [Strategy::KpCp, Strategy::NpCp, Strategy::YpXp];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::KpCp => "KP_CP",
            Strategy::NpCp => "NP_CP",
            Strategy::YpXp => "YP_XP",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_uppercase().replace('-', "_")
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = normalize(s);
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == norm)
            .ok_or_else(|| format!("unknown strategy `{s}` (valid: kp-cp, np-cp, yp-xp)"))
    }
}

/// A fixed strategy, or per-layer selection of the fastest one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyChoice {
    Fixed(Strategy),
    Adaptive,
}

impl StrategyChoice {
    pub const ALL: [StrategyChoice; 4] = [
        StrategyChoice::Fixed(Strategy::KpCp),
        StrategyChoice::Fixed(Strategy::NpCp),
        StrategyChoice::Fixed(Strategy::YpXp),
        StrategyChoice::Adaptive,
    ];
}

impl fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyChoice::Fixed(s) => s.fmt(f),
            StrategyChoice::Adaptive => f.write_str("Adaptive"),
        }
    }
}

impl From<Strategy> for StrategyChoice {
    fn from(s: Strategy) -> Self {
        StrategyChoice::Fixed(s)
    }
}

impl FromStr for StrategyChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if normalize(s) == "ADAPTIVE" {
            return Ok(StrategyChoice::Adaptive);
        }
        s.parse::<Strategy>()
            .map(StrategyChoice::Fixed)
            .map_err(|_| format!("unknown strategy `{s}` (valid: kp-cp, np-cp, yp-xp, adaptive)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TensorRole {
    Input,
    Input2,
    Filter,
    Output,
}

impl TensorRole {
    /// Input, second input and filter tensors flow from SRAM to chiplets.
    pub fn is_distribution(self) -> bool {
        !matches!(self, TensorRole::Output)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrafficMode {
    Broadcast,
    Unicast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTraffic {
    pub tensor: TensorRole,
    pub mode: TrafficMode,
    /// Bytes leaving (or entering) the global SRAM, replicas counted once.
    pub bytes_unique: u64,
    /// Bytes summed over every receiving chiplet's copy.
    pub bytes_expanded: u64,
    pub receivers: u64,
}

impl TensorTraffic {
    pub fn broadcast(tensor: TensorRole, bytes: u64, receivers: u64) -> Self {
        TensorTraffic {
            tensor,
            mode: TrafficMode::Broadcast,
            bytes_unique: bytes,
            bytes_expanded: bytes * receivers,
            receivers,
        }
    }

    pub fn unicast(tensor: TensorRole, bytes: u64, receivers: u64) -> Self {
        TensorTraffic {
            tensor,
            mode: TrafficMode::Unicast,
            bytes_unique: bytes,
            bytes_expanded: bytes,
            receivers,
        }
    }
}

/// The dimension a plan splits and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionAxis {
    /// Output channels in contiguous groups of `chunk`.
    Filters { chunk: u64 },
    /// Batch in contiguous groups of `chunk`.
    Batch { chunk: u64 },
    /// Output plane on a `rows` x `cols` grid with balanced tiles.
    OutputPlane { rows: u64, cols: u64 },
    /// Flattened elementwise index space in contiguous groups of `chunk`.
    Elementwise { chunk: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub strategy: Strategy,
    pub chiplets_total: u64,
    /// `min(chiplets_total, partition_axis_extent)`.
    pub chiplets_used: u64,
    /// Chiplets that receive a nonempty share; at most `chiplets_used`.
    pub active_chiplets: u64,
    pub per_chiplet_macs_max: u64,
    pub traffic: Vec<TensorTraffic>,
    pub partition_axis_extent: u64,
    pub axis: PartitionAxis,
    pub layer: LayerSpec,
    pub volumes: TensorVolumes,
}

/// What one chiplet computes and moves for one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WorkShare {
    pub macs: u64,
    pub elementwise_ops: u64,
    /// Both activation inputs for residual layers.
    pub input_bytes: u64,
    pub filter_bytes: u64,
    pub output_bytes: u64,
    pub n_local: u64,
    pub k_local: u64,
    pub out_rows: u64,
    pub out_cols: u64,
}

impl WorkShare {
    pub fn is_empty(&self) -> bool {
        self.macs == 0 && self.elementwise_ops == 0
    }
}

pub(crate) fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Size of group `idx` when `extent` is cut into `ceil(extent/parts)`-sized
/// leading groups.
pub(crate) fn chunk_len(extent: u64, chunk: u64, idx: u64) -> u64 {
    let start = idx.saturating_mul(chunk);
    extent.saturating_sub(start).min(chunk)
}

/// Size of part `idx` when `extent` is cut into `parts` sizes differing by at most one.
pub(crate) fn balanced_len(extent: u64, parts: u64, idx: u64) -> u64 {
    extent / parts + u64::from(idx < extent % parts)
}

/// Largest grid of at most `limit` tiles with `rows <= max_rows` and
/// `cols <= max_cols`; ties prefer the squarest grid, then fewer rows.
pub fn near_square_grid(limit: u64, max_rows: u64, max_cols: u64) -> (u64, u64) {
    let mut best = (1, 1);
    let key = |(r, c): (u64, u64)| (std::cmp::Reverse(r * c), r.abs_diff(c), r);
    for rows in 1..=limit.min(max_rows) {
        let cols = (limit / rows).min(max_cols);
        if cols == 0 {
            continue;
        }
        if key((rows, cols)) < key(best) {
            best = (rows, cols);
        }
    }
    best
}

pub fn build_plan(layer: &LayerSpec, strategy: Strategy, chiplets: u64) -> Result<PartitionPlan> {
    if chiplets == 0 {
        return Err(ModelError::config("a plan needs at least one chiplet"));
    }
    layer.validate()?;
    let v = tensor_volumes(layer)?;
    let residual = layer.kind == LayerKind::Residual;

    let (extent, axis) = match (strategy, residual) {
        (Strategy::KpCp, false) => {
            let used = chiplets.min(layer.k);
            (
                layer.k,
                PartitionAxis::Filters {
                    chunk: ceil_div(layer.k, used),
                },
            )
        }
        (Strategy::KpCp, true) => {
            let extent = v.elementwise_ops;
            let used = chiplets.min(extent);
            (
                extent,
                PartitionAxis::Elementwise {
                    chunk: ceil_div(extent, used),
                },
            )
        }
        (Strategy::NpCp, _) => {
            let used = chiplets.min(layer.n);
            (
                layer.n,
                PartitionAxis::Batch {
                    chunk: ceil_div(layer.n, used),
                },
            )
        }
        (Strategy::YpXp, _) => {
            let extent = v.out_y * v.out_x;
            let (rows, cols) = near_square_grid(chiplets.min(extent), v.out_y, v.out_x);
            (extent, PartitionAxis::OutputPlane { rows, cols })
        }
    };
    let chiplets_used = chiplets.min(extent);
    let active_chiplets = match axis {
        PartitionAxis::Filters { chunk } | PartitionAxis::Batch { chunk } | PartitionAxis::Elementwise { chunk } => {
            ceil_div(extent, chunk)
        }
        PartitionAxis::OutputPlane { rows, cols } => rows * cols,
    };

    let a = active_chiplets;
    let traffic = if residual {
        vec![
            TensorTraffic::unicast(TensorRole::Input, v.input_bytes, a),
            TensorTraffic::unicast(TensorRole::Input2, v.input2_bytes, a),
            TensorTraffic::unicast(TensorRole::Output, v.output_bytes, a),
        ]
    } else {
        let (input, filter) = match strategy {
            Strategy::KpCp => (
                TensorTraffic::broadcast(TensorRole::Input, v.input_bytes, a),
                TensorTraffic::unicast(TensorRole::Filter, v.filter_bytes, a),
            ),
            Strategy::NpCp => (
                TensorTraffic::unicast(TensorRole::Input, v.input_bytes, a),
                TensorTraffic::broadcast(TensorRole::Filter, v.filter_bytes, a),
            ),
            Strategy::YpXp => (
                TensorTraffic::broadcast(TensorRole::Input, v.input_bytes, a),
                TensorTraffic::broadcast(TensorRole::Filter, v.filter_bytes, a),
            ),
        };
        vec![
            input,
            filter,
            TensorTraffic::unicast(TensorRole::Output, v.output_bytes, a),
        ]
    };

    let per_chiplet_macs_max = match axis {
        PartitionAxis::Filters { chunk } => v.macs / layer.k * chunk,
        PartitionAxis::Batch { chunk } => v.macs / layer.n * chunk,
        PartitionAxis::OutputPlane { rows, cols } => {
            v.macs / (v.out_y * v.out_x) * ceil_div(v.out_y, rows) * ceil_div(v.out_x, cols)
        }
        PartitionAxis::Elementwise { .. } => 0,
    };

    Ok(PartitionPlan {
        strategy,
        chiplets_total: chiplets,
        chiplets_used,
        active_chiplets,
        per_chiplet_macs_max,
        traffic,
        partition_axis_extent: extent,
        axis,
        layer: layer.clone(),
        volumes: v,
    })
}

impl PartitionPlan {
    pub fn distribution_traffic(&self) -> impl Iterator<Item = &TensorTraffic> + '_ {
        self.traffic.iter().filter(|t| t.tensor.is_distribution())
    }

    pub fn output_traffic(&self) -> Option<&TensorTraffic> {
        self.traffic.iter().find(|t| t.tensor == TensorRole::Output)
    }

    pub fn distribution_bytes_unique(&self) -> u64 {
        self.distribution_traffic().map(|t| t.bytes_unique).sum()
    }

    pub fn distribution_bytes_expanded(&self) -> u64 {
        self.distribution_traffic().map(|t| t.bytes_expanded).sum()
    }

    /// Output tile of grid cell `idx` as (rows, cols).
    fn tile(&self, rows: u64, cols: u64, idx: u64) -> (u64, u64) {
        let (plane_y, plane_x) = (self.volumes.out_y, self.volumes.out_x);
        (
            balanced_len(plane_y, rows, idx / cols),
            balanced_len(plane_x, cols, idx % cols),
        )
    }
}

/// Received and produced volumes for one chiplet. Chiplets beyond the active
/// set get an all-zero share.
pub fn per_chiplet_assignment(plan: &PartitionPlan, chiplet_index: u64) -> Result<WorkShare> {
    if chiplet_index >= plan.chiplets_total {
        return Err(ModelError::Index {
            index: chiplet_index,
            total: plan.chiplets_total,
        });
    }
    if chiplet_index >= plan.active_chiplets {
        return Ok(WorkShare::default());
    }
    let l = &plan.layer;
    let v = &plan.volumes;
    let b = l.bytes_per_element;
    let (oy, ox) = (v.out_y, v.out_x);

    let share = match (plan.axis, l.kind == LayerKind::Residual) {
        (PartitionAxis::Filters { chunk }, _) => {
            let k_local = chunk_len(l.k, chunk, chiplet_index);
            WorkShare {
                macs: l.n * k_local * l.c * oy * ox * l.r * l.s,
                elementwise_ops: 0,
                input_bytes: v.input_bytes,
                filter_bytes: k_local * l.c * l.r * l.s * b,
                output_bytes: l.n * k_local * oy * ox * b,
                n_local: l.n,
                k_local,
                out_rows: oy,
                out_cols: ox,
            }
        }
        (PartitionAxis::Batch { chunk }, false) => {
            let n_local = chunk_len(l.n, chunk, chiplet_index);
            WorkShare {
                macs: n_local * l.k * l.c * oy * ox * l.r * l.s,
                elementwise_ops: 0,
                input_bytes: n_local * l.c * l.y * l.x * b,
                filter_bytes: v.filter_bytes,
                output_bytes: n_local * l.k * oy * ox * b,
                n_local,
                k_local: l.k,
                out_rows: oy,
                out_cols: ox,
            }
        }
        (PartitionAxis::OutputPlane { rows, cols }, false) => {
            let (h, w) = plan.tile(rows, cols, chiplet_index);
            WorkShare {
                macs: l.n * l.k * l.c * h * w * l.r * l.s,
                elementwise_ops: 0,
                input_bytes: v.input_bytes,
                filter_bytes: v.filter_bytes,
                output_bytes: l.n * l.k * h * w * b,
                n_local: l.n,
                k_local: l.k,
                out_rows: h,
                out_cols: w,
            }
        }
        (PartitionAxis::Batch { chunk }, true) => {
            let n_local = chunk_len(l.n, chunk, chiplet_index);
            elementwise_share(n_local * l.c * l.y * l.x, b, n_local, l.c, l.y, l.x)
        }
        (PartitionAxis::OutputPlane { rows, cols }, true) => {
            let (h, w) = plan.tile(rows, cols, chiplet_index);
            elementwise_share(l.n * l.c * h * w, b, l.n, l.c, h, w)
        }
        (PartitionAxis::Elementwise { chunk }, _) => {
            let ops = chunk_len(v.elementwise_ops, chunk, chiplet_index);
            elementwise_share(ops, b, 0, 0, 0, 0)
        }
    };
    Ok(share)
}

fn elementwise_share(ops: u64, b: u64, n_local: u64, k_local: u64, rows: u64, cols: u64) -> WorkShare {
    WorkShare {
        macs: 0,
        elementwise_ops: ops,
        input_bytes: 2 * ops * b,
        filter_bytes: 0,
        output_bytes: ops * b,
        n_local,
        k_local,
        out_rows: rows,
        out_cols: cols,
    }
}

/// Bytes received across all chiplets per byte sent from the global SRAM.
pub fn multicast_factor(plan: &PartitionPlan) -> f64 {
    multicast_factor_of(plan.distribution_traffic())
}

/// Multicast factor of an arbitrary traffic list; output entries are ignored.
pub fn multicast_factor_of<'a>(traffic: impl IntoIterator<Item = &'a TensorTraffic>) -> f64 {
    let (expanded, unique) = traffic
        .into_iter()
        .filter(|t| t.tensor.is_distribution())
        .fold((0u64, 0u64), |(e, u), t| (e + t.bytes_expanded, u + t.bytes_unique));
    if unique == 0 {
        1.0
    } else {
        expanded as f64 / unique as f64
    }
}
