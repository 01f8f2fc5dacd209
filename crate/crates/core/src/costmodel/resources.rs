// SPDX-License-Identifier: Apache-2.0

//! Area and power of a wireless-distribution system.
//!
//! Chiplet-side constants are per 64-PE chiplet and scale linearly with PE
//! count. The receiver is sized from the transceiver anchor tables at the
//! datarate the distribution bandwidth requires.

use serde::{Deserialize, Serialize};

use super::SystemConfig;
use crate::error::Result;
use crate::nop::{TrxAnchors, TrxProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResourceConstants {
    pub reference_pes: u64,
    pub pe_mem_area_mm2: f64,
    pub pe_mem_power_mw: f64,
    pub router_area_mm2: f64,
    pub router_power_mw: f64,
    pub sram_area_mm2: f64,
    pub sram_power_mw: f64,
    pub tx_area_mm2: f64,
    pub tx_power_mw: f64,
    /// Fraction of the transceiver energy per bit spent in the receiver.
    pub rx_energy_share: f64,
}

impl Default for ResourceConstants {
    fn default() -> Self {
        ResourceConstants {
            reference_pes: 64,
            pe_mem_area_mm2: 5.0,
            pe_mem_power_mw: 90.0,
            router_area_mm2: 0.43,
            router_power_mw: 170.0,
            sram_area_mm2: 51.0,
            sram_power_mw: 10000.0,
            tx_area_mm2: 2.0,
            tx_power_mw: 167.0,
            rx_energy_share: 1.4 / 4.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BudgetGroup {
    Chiplets,
    Memory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetItem {
    pub group: BudgetGroup,
    pub name: String,
    pub count: u64,
    pub unit_area_mm2: f64,
    pub unit_power_mw: f64,
    pub area_mm2: f64,
    pub power_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceBudget {
    pub profile: TrxProfile,
    pub datarate_gbps: f64,
    pub items: Vec<BudgetItem>,
    pub total_area_mm2: f64,
    pub total_power_mw: f64,
}

impl ResourceBudget {
    pub fn group_area_mm2(&self, group: BudgetGroup) -> f64 {
        self.items.iter().filter(|i| i.group == group).map(|i| i.area_mm2).sum()
    }

    pub fn group_power_mw(&self, group: BudgetGroup) -> f64 {
        self.items.iter().filter(|i| i.group == group).map(|i| i.power_mw).sum()
    }

    pub fn item(&self, name: &str) -> Option<&BudgetItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

pub fn resource_budget(
    sys: &SystemConfig,
    profile: TrxProfile,
    anchors: &TrxAnchors,
    constants: &ResourceConstants,
) -> Result<ResourceBudget> {
    sys.validate()?;
    let scale = sys.pes_per_chiplet as f64 / constants.reference_pes as f64;
    let datarate = sys.distribution_datarate_gbps();
    let trx = anchors.footprint(datarate, profile)?;
    let rx_power = datarate * trx.energy_pj_per_bit * constants.rx_energy_share;

    let item = |group, name: &str, count: u64, area: f64, power: f64| BudgetItem {
        group,
        name: name.to_owned(),
        count,
        unit_area_mm2: area,
        unit_power_mw: power,
        area_mm2: area * count as f64,
        power_mw: power * count as f64,
    };
    let n = sys.chiplets;
    let items = vec![
        item(
            BudgetGroup::Chiplets,
            "PEs + memory",
            n,
            constants.pe_mem_area_mm2 * scale,
            constants.pe_mem_power_mw * scale,
        ),
        item(BudgetGroup::Chiplets, "Wireless RX", n, trx.area_mm2, rx_power),
        item(
            BudgetGroup::Chiplets,
            "Collection NoP router",
            n,
            constants.router_area_mm2 * scale,
            constants.router_power_mw * scale,
        ),
        item(
            BudgetGroup::Memory,
            "Global SRAM",
            1,
            constants.sram_area_mm2,
            constants.sram_power_mw,
        ),
        item(
            BudgetGroup::Memory,
            "Wireless TX",
            1,
            constants.tx_area_mm2,
            constants.tx_power_mw,
        ),
    ];
    let total_area_mm2 = items.iter().map(|i| i.area_mm2).sum();
    let total_power_mw = items.iter().map(|i| i.power_mw).sum();
    Ok(ResourceBudget {
        profile,
        datarate_gbps: datarate,
        items,
        total_area_mm2,
        total_power_mw,
    })
}
