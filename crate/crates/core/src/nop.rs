// SPDX-License-Identifier: Apache-2.0

//! Network-on-package models: a wired interposer mesh that serializes every
//! replica across multiple hops, and a single-hop wireless plane with native
//! broadcast.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::partition::{ceil_div, near_square_grid, TensorTraffic, TrafficMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NopKind {
    WiredMesh,
    Wireless,
}

/// How the mesh hop count is derived from the chiplet count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopModel {
    /// `sqrt(chiplets) / 2`.
    #[default]
    Sqrt,
    /// Mean Manhattan distance from the mesh centre to every chiplet of the
    /// near-square grid.
    GridExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NopModel {
    pub label: String,
    pub kind: NopKind,
    /// Bytes per cycle on one SRAM injection link.
    pub bandwidth_bytes_per_cycle: u64,
    pub multicast_capable: bool,
    /// Wired: energy per bit per hop. Wireless: TX plus one RX per bit.
    pub per_bit_energy_pj: f64,
    /// Wireless energy per bit per active receiver. Ignored by the mesh.
    #[serde(default)]
    pub rx_per_bit_energy_pj: f64,
    #[serde(default = "one")]
    pub injection_links: u64,
    #[serde(default)]
    pub hop_model: HopModel,
}

fn one() -> u64 {
    1
}

pub const DEFAULT_WIRED_PJ_PER_BIT: f64 = 0.85;
pub const DEFAULT_WIRELESS_PJ_PER_BIT: f64 = 4.01;
pub const DEFAULT_WIRELESS_RX_PJ_PER_BIT: f64 = 1.4;

impl NopModel {
    pub fn wired_mesh(label: impl Into<String>, bandwidth: u64) -> Self {
        NopModel {
            label: label.into(),
            kind: NopKind::WiredMesh,
            bandwidth_bytes_per_cycle: bandwidth,
            multicast_capable: false,
            per_bit_energy_pj: DEFAULT_WIRED_PJ_PER_BIT,
            rx_per_bit_energy_pj: 0.0,
            injection_links: 1,
            hop_model: HopModel::Sqrt,
        }
    }

    pub fn wireless(label: impl Into<String>, bandwidth: u64) -> Self {
        NopModel {
            label: label.into(),
            kind: NopKind::Wireless,
            bandwidth_bytes_per_cycle: bandwidth,
            multicast_capable: true,
            per_bit_energy_pj: DEFAULT_WIRELESS_PJ_PER_BIT,
            rx_per_bit_energy_pj: DEFAULT_WIRELESS_RX_PJ_PER_BIT,
            injection_links: 1,
            hop_model: HopModel::Sqrt,
        }
    }

    pub fn with_bandwidth(mut self, bandwidth: u64) -> Self {
        self.bandwidth_bytes_per_cycle = bandwidth;
        self
    }

    pub fn with_energy(mut self, per_bit_pj: f64, rx_per_bit_pj: f64) -> Self {
        self.per_bit_energy_pj = per_bit_pj;
        self.rx_per_bit_energy_pj = rx_per_bit_pj;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |why: &str| Err(ModelError::config(format!("NoP `{}`: {why}", self.label)));
        if self.bandwidth_bytes_per_cycle == 0 || self.injection_links == 0 {
            return fail("bandwidth must be positive");
        }
        if self.per_bit_energy_pj.is_nan() || self.per_bit_energy_pj <= 0.0 {
            return fail("per-bit energy must be positive");
        }
        match self.kind {
            NopKind::WiredMesh if self.multicast_capable => fail("a wired mesh cannot multicast"),
            NopKind::Wireless if !self.multicast_capable => fail("the wireless plane always broadcasts"),
            NopKind::Wireless
                if !(self.rx_per_bit_energy_pj > 0.0 && self.rx_per_bit_energy_pj < self.per_bit_energy_pj) =>
            {
                fail("receiver energy must be positive and below the unicast energy")
            }
            _ => Ok(()),
        }
    }

    /// Bytes per cycle the global SRAM can inject.
    pub fn injection_bandwidth(&self) -> u64 {
        self.bandwidth_bytes_per_cycle * self.injection_links
    }

    /// Transmitter share of the per-bit energy.
    pub fn tx_per_bit_energy_pj(&self) -> f64 {
        self.per_bit_energy_pj - self.rx_per_bit_energy_pj
    }

    /// Energy per bit delivered to `receivers` chiplets at once.
    pub fn broadcast_bit_energy_pj(&self, receivers: u64, chiplets: u64) -> f64 {
        match self.kind {
            NopKind::Wireless => self.tx_per_bit_energy_pj() + receivers as f64 * self.rx_per_bit_energy_pj,
            NopKind::WiredMesh => receivers as f64 * self.per_bit_energy_pj * avg_hops(self, chiplets),
        }
    }
}

pub fn avg_hops(model: &NopModel, chiplets: u64) -> f64 {
    match (model.kind, model.hop_model) {
        (NopKind::Wireless, _) => 1.0,
        (NopKind::WiredMesh, HopModel::Sqrt) => (chiplets as f64).sqrt() / 2.0,
        (NopKind::WiredMesh, HopModel::GridExact) => grid_center_distance(chiplets),
    }
}

fn grid_center_distance(chiplets: u64) -> f64 {
    let (rows, cols) = near_square_grid(chiplets, chiplets, chiplets);
    let axis_mean = |len: u64| {
        let centre = (len as f64 - 1.0) / 2.0;
        (0..len).map(|i| (i as f64 - centre).abs()).sum::<f64>() / len as f64
    };
    axis_mean(rows) + axis_mean(cols)
}

fn fill_cycles(model: &NopModel, chiplets: u64) -> u64 {
    avg_hops(model, chiplets).ceil() as u64
}

/// Cycles to push `traffic` from the SRAM to the chiplets. Fabrics without
/// multicast inject every replica separately.
pub fn distribution_cycles(model: &NopModel, traffic: &[TensorTraffic], chiplets: u64) -> u64 {
    let bytes: u64 = traffic
        .iter()
        .map(|t| {
            if model.multicast_capable {
                t.bytes_unique
            } else {
                t.bytes_expanded
            }
        })
        .sum();
    ceil_div(bytes, model.injection_bandwidth()) + fill_cycles(model, chiplets)
}

/// Cycles to write `output_bytes` back to the SRAM over the wired mesh.
pub fn collection_cycles(model_wired: &NopModel, output_bytes: u64, chiplets: u64) -> Result<u64> {
    if model_wired.kind != NopKind::WiredMesh {
        return Err(ModelError::Kind(format!(
            "collection rides the wired mesh, got wireless model `{}`",
            model_wired.label
        )));
    }
    Ok(ceil_div(output_bytes, model_wired.injection_bandwidth()) + fill_cycles(model_wired, chiplets))
}

pub fn transfer_energy_pj(model: &NopModel, traffic: &[TensorTraffic], chiplets: u64) -> f64 {
    match model.kind {
        NopKind::WiredMesh => {
            let bits: u64 = traffic.iter().map(|t| t.bytes_expanded * 8).sum();
            bits as f64 * model.per_bit_energy_pj * avg_hops(model, chiplets)
        }
        NopKind::Wireless => traffic
            .iter()
            .map(|t| {
                let bits = (t.bytes_unique * 8) as f64;
                match t.mode {
                    // idle receivers stay powered off
                    TrafficMode::Unicast => bits * model.per_bit_energy_pj,
                    TrafficMode::Broadcast => bits * model.broadcast_bit_energy_pj(t.receivers, chiplets),
                }
            })
            .sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrxProfile {
    Conservative,
    Aggressive,
}

impl std::str::FromStr for TrxProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conservative" | "c" => Ok(TrxProfile::Conservative),
            "aggressive" | "a" => Ok(TrxProfile::Aggressive),
            _ => Err(format!(
                "unknown transceiver profile `{s}` (valid: conservative, aggressive)"
            )),
        }
    }
}

impl std::fmt::Display for TrxProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrxProfile::Conservative => "conservative",
            TrxProfile::Aggressive => "aggressive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrxDesignPoint {
    pub datarate_gbps: f64,
    pub area_mm2: f64,
    pub energy_pj_per_bit: f64,
}

impl TrxDesignPoint {
    pub const fn new(datarate_gbps: f64, area_mm2: f64, energy_pj_per_bit: f64) -> Self {
        TrxDesignPoint {
            datarate_gbps,
            area_mm2,
            energy_pj_per_bit,
        }
    }

    /// Power drawn at the point's own datarate; Gb/s times pJ/bit is mW.
    pub fn power_mw(&self) -> f64 {
        self.datarate_gbps * self.energy_pj_per_bit
    }
}

/// Transceiver area/energy anchors per profile, interpolated in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrxAnchors {
    pub conservative: Vec<TrxDesignPoint>,
    pub aggressive: Vec<TrxDesignPoint>,
}

const CONSERVATIVE_ANCHORS: [TrxDesignPoint; 6] = [
    TrxDesignPoint::new(10.0, 0.3, 1.0),
    TrxDesignPoint::new(25.0, 0.5, 1.4),
    TrxDesignPoint::new(48.0, 0.8, 1.95),
    TrxDesignPoint::new(64.0, 1.0, 4.01),
    TrxDesignPoint::new(100.0, 1.6, 6.0),
    TrxDesignPoint::new(128.0, 2.2, 8.0),
];

const AGGRESSIVE_ANCHORS: [TrxDesignPoint; 6] = [
    TrxDesignPoint::new(10.0, 0.2, 0.8),
    TrxDesignPoint::new(25.0, 0.4, 1.2),
    TrxDesignPoint::new(48.0, 0.8, 1.95),
    TrxDesignPoint::new(64.0, 0.9, 2.4),
    TrxDesignPoint::new(100.0, 1.2, 3.2),
    TrxDesignPoint::new(128.0, 1.5, 4.0),
];

impl Default for TrxAnchors {
    fn default() -> Self {
        TrxAnchors {
            conservative: CONSERVATIVE_ANCHORS.to_vec(),
            aggressive: AGGRESSIVE_ANCHORS.to_vec(),
        }
    }
}

impl TrxAnchors {
    pub fn profile(&self, profile: TrxProfile) -> &[TrxDesignPoint] {
        match profile {
            TrxProfile::Conservative => &self.conservative,
            TrxProfile::Aggressive => &self.aggressive,
        }
    }

    pub fn footprint(&self, datarate_gbps: f64, profile: TrxProfile) -> Result<TrxDesignPoint> {
        if datarate_gbps.is_nan() || datarate_gbps <= 0.0 {
            return Err(ModelError::config(format!(
                "datarate must be positive, got {datarate_gbps}"
            )));
        }
        let mut anchors = self.profile(profile).to_vec();
        if anchors.is_empty() {
            return Err(ModelError::config(format!("no {profile} transceiver anchors")));
        }
        if anchors
            .iter()
            .any(|a| !(a.datarate_gbps > 0.0 && a.area_mm2 > 0.0 && a.energy_pj_per_bit > 0.0))
        {
            return Err(ModelError::config(format!("{profile} anchors must be positive")));
        }
        anchors.sort_by(|a, b| a.datarate_gbps.total_cmp(&b.datarate_gbps));
        if let Some(hit) = anchors.iter().find(|a| a.datarate_gbps == datarate_gbps) {
            return Ok(*hit);
        }
        if anchors.len() == 1 {
            return Ok(TrxDesignPoint {
                datarate_gbps,
                ..anchors[0]
            });
        }
        // segment containing the query, or the nearest end segment
        let hi = anchors
            .iter()
            .position(|a| a.datarate_gbps > datarate_gbps)
            .unwrap_or(anchors.len() - 1)
            .max(1);
        let (a, b) = (anchors[hi - 1], anchors[hi]);
        let t = (datarate_gbps.ln() - a.datarate_gbps.ln()) / (b.datarate_gbps.ln() - a.datarate_gbps.ln());
        let lerp = |u: f64, v: f64| (u.ln() + t * (v.ln() - u.ln())).exp();
        Ok(TrxDesignPoint {
            datarate_gbps,
            area_mm2: lerp(a.area_mm2, b.area_mm2),
            energy_pj_per_bit: lerp(a.energy_pj_per_bit, b.energy_pj_per_bit),
        })
    }
}

/// Footprint from the built-in anchor tables.
pub fn trx_footprint(datarate_gbps: f64, profile: TrxProfile) -> Result<TrxDesignPoint> {
    TrxAnchors::default().footprint(datarate_gbps, profile)
}

/// Built-in NoP presets keyed by label.
pub fn default_presets() -> BTreeMap<String, NopModel> {
    [
        NopModel::wired_mesh("interposer-C", 8),
        NopModel::wired_mesh("interposer-A", 16),
        NopModel::wireless("wienna-C", 16),
        NopModel::wireless("wienna-A", 32),
    ]
    .into_iter()
    .map(|m| (m.label.clone(), m))
    .collect()
}

/// Looks a preset up by exact name, then case-insensitively.
pub fn find_preset<'a>(presets: &'a BTreeMap<String, NopModel>, name: &str) -> Result<&'a NopModel> {
    presets
        .get(name)
        .or_else(|| {
            presets
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(name))
                .map(|(_, v)| v)
        })
        .ok_or_else(|| {
            let known: Vec<&str> = presets.keys().map(String::as_str).collect();
            ModelError::config(format!("unknown NoP preset `{name}` (known: {})", known.join(", ")))
        })
}
