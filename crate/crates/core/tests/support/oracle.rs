// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference model. Everything here is derived by enumerating
//! individual tensor elements and MACs; nothing calls into the partition,
//! chiplet or NoP code paths it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use nop_explorer_core::{LayerKind, LayerSpec, NopKind, Strategy};

/// Output positions along one axis, found by sliding the window.
fn out_positions(input: u64, pad: u64, filter: u64, stride: u64) -> u64 {
    let mut count = 0;
    let mut start = 0;
    while start + filter <= input + 2 * pad {
        count += 1;
        start += stride;
    }
    count
}

pub fn out_plane(l: &LayerSpec) -> (u64, u64) {
    match l.kind {
        LayerKind::Conv2D => (
            out_positions(l.y, l.padding, l.r, l.stride),
            out_positions(l.x, l.padding, l.s, l.stride),
        ),
        LayerKind::UpConv => {
            let mut oy = 0;
            for _ in 0..l.y {
                oy += l.stride;
            }
            let mut ox = 0;
            for _ in 0..l.x {
                ox += l.stride;
            }
            (oy, ox)
        }
        LayerKind::FullyConnected => (1, 1),
        LayerKind::Residual => (l.y, l.x),
    }
}

/// MACs counted over every output position and filter tap.
pub fn brute_force_macs(l: &LayerSpec) -> u64 {
    if l.kind == LayerKind::Residual {
        return 0;
    }
    let (oy, ox) = out_plane(l);
    let mut taps = 0u64;
    for _ in 0..oy {
        for _ in 0..ox {
            for _ in 0..l.r {
                for _ in 0..l.s {
                    taps += 1;
                }
            }
        }
    }
    taps * l.n * l.k * l.c
}

/// Sizes of `parts` balanced contiguous pieces of `extent`, by dealing
/// elements out one at a time.
fn balanced_sizes(extent: u64, parts: u64) -> Vec<u64> {
    let mut sizes = vec![0; parts as usize];
    for i in 0..extent {
        sizes[(i % parts) as usize] += 1;
    }
    sizes
}

fn owner_of(sizes: &[u64], idx: u64) -> usize {
    let mut acc = 0;
    for (p, &s) in sizes.iter().enumerate() {
        acc += s;
        if idx < acc {
            return p;
        }
    }
    unreachable!("index beyond extent")
}

/// Owner under leading groups of ceil(extent / min(chiplets, extent)).
fn chunk_owner(extent: u64, chiplets: u64, idx: u64) -> usize {
    let used = chiplets.min(extent);
    let mut chunk = 1;
    while chunk * used < extent {
        chunk += 1;
    }
    (idx / chunk) as usize
}

/// Every (rows, cols) grid is tried; the largest coverage wins, then the
/// squarest, then the one with fewer rows.
pub fn brute_force_grid(chiplets: u64, oy: u64, ox: u64) -> (u64, u64) {
    let mut best: Option<(u64, u64)> = None;
    for rows in 1..=oy {
        for cols in 1..=ox {
            if rows * cols > chiplets {
                continue;
            }
            let better = match best {
                None => true,
                Some((br, bc)) => {
                    let (a, b) = (rows * cols, br * bc);
                    a > b || (a == b && (rows.abs_diff(cols), rows) < (br.abs_diff(bc), br))
                }
            };
            if better {
                best = Some((rows, cols));
            }
        }
    }
    best.unwrap()
}

/// Which chiplet owns each output (or elementwise) element.
pub struct Ownership {
    pub chiplets: u64,
    /// (n, k, oy, ox) -> chiplet; for residual layers k is the channel.
    pub owner: BTreeMap<(u64, u64, u64, u64), usize>,
    pub grid: Option<(u64, u64)>,
}

pub fn ownership(l: &LayerSpec, strategy: Strategy, chiplets: u64) -> Ownership {
    let (oy, ox) = out_plane(l);
    let residual = l.kind == LayerKind::Residual;
    let mut owner = BTreeMap::new();
    let mut grid = None;
    let (row_sizes, col_sizes) = if strategy == Strategy::YpXp {
        let (rows, cols) = brute_force_grid(chiplets, oy, ox);
        grid = Some((rows, cols));
        (balanced_sizes(oy, rows), balanced_sizes(ox, cols))
    } else {
        (vec![], vec![])
    };
    let channels = if residual { l.c } else { l.k };
    let flat_extent = l.n * channels * oy * ox;
    let mut flat = 0;
    for n in 0..l.n {
        for k in 0..channels {
            for y in 0..oy {
                for x in 0..ox {
                    let who = match (strategy, residual) {
                        (Strategy::KpCp, false) => chunk_owner(l.k, chiplets, k),
                        (Strategy::KpCp, true) => chunk_owner(flat_extent, chiplets, flat),
                        (Strategy::NpCp, _) => chunk_owner(l.n, chiplets, n),
                        (Strategy::YpXp, _) => {
                            let cols = col_sizes.len();
                            owner_of(&row_sizes, y) * cols + owner_of(&col_sizes, x)
                        }
                    };
                    owner.insert((n, k, y, x), who);
                    flat += 1;
                }
            }
        }
    }
    Ownership { chiplets, owner, grid }
}

impl Ownership {
    pub fn active(&self) -> BTreeSet<usize> {
        self.owner.values().copied().collect()
    }

    /// Chiplets owning at least one output of each batch index and of each
    /// filter.
    fn owners_by_n_and_k(&self) -> (BTreeMap<u64, BTreeSet<usize>>, BTreeMap<u64, BTreeSet<usize>>) {
        let mut by_n: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
        let mut by_k: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
        for (&(n, k, _, _), &c) in &self.owner {
            by_n.entry(n).or_default().insert(c);
            by_k.entry(k).or_default().insert(c);
        }
        (by_n, by_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tensor {
    Input,
    Input2,
    Filter,
}

/// Receive set of every distributed element, in bytes-per-element units.
pub struct ReceiveSets {
    pub elements: Vec<(Tensor, BTreeSet<usize>)>,
    pub bytes_per_element: u64,
}

impl ReceiveSets {
    pub fn unique_bytes(&self) -> u64 {
        self.elements.len() as u64 * self.bytes_per_element
    }

    pub fn expanded_bytes(&self) -> u64 {
        self.elements.iter().map(|(_, r)| r.len() as u64).sum::<u64>() * self.bytes_per_element
    }

    pub fn multicast_factor(&self) -> f64 {
        self.expanded_bytes() as f64 / self.unique_bytes() as f64
    }

    /// Bytes landing on each chiplet, per tensor kind.
    pub fn per_chiplet(&self, chiplets: u64, tensor: &[Tensor]) -> Vec<u64> {
        let mut out = vec![0; chiplets as usize];
        for (t, recv) in &self.elements {
            if tensor.contains(t) {
                for &c in recv {
                    out[c] += self.bytes_per_element;
                }
            }
        }
        out
    }
}

pub fn receive_sets(l: &LayerSpec, strategy: Strategy, own: &Ownership) -> ReceiveSets {
    let active = own.active();
    let (by_n, by_k) = own.owners_by_n_and_k();
    let mut elements = Vec::new();
    if l.kind == LayerKind::Residual {
        for tensor in [Tensor::Input, Tensor::Input2] {
            for n in 0..l.n {
                for c in 0..l.c {
                    for y in 0..l.y {
                        for x in 0..l.x {
                            let who = own.owner[&(n, c, y, x)];
                            elements.push((tensor, BTreeSet::from([who])));
                        }
                    }
                }
            }
        }
    } else {
        for n in 0..l.n {
            for _c in 0..l.c {
                for _y in 0..l.y {
                    for _x in 0..l.x {
                        let recv = match strategy {
                            Strategy::NpCp => by_n[&n].clone(),
                            Strategy::KpCp | Strategy::YpXp => active.clone(),
                        };
                        elements.push((Tensor::Input, recv));
                    }
                }
            }
        }
        for k in 0..l.k {
            for _c in 0..l.c {
                for _r in 0..l.r {
                    for _s in 0..l.s {
                        let recv = match strategy {
                            Strategy::KpCp => by_k[&k].clone(),
                            Strategy::NpCp | Strategy::YpXp => active.clone(),
                        };
                        elements.push((Tensor::Filter, recv));
                    }
                }
            }
        }
    }
    ReceiveSets {
        elements,
        bytes_per_element: l.bytes_per_element,
    }
}

/// Per-chiplet MAC counts by enumerating owned outputs and their taps.
pub fn macs_per_chiplet(l: &LayerSpec, own: &Ownership) -> Vec<u64> {
    let mut out = vec![0; own.chiplets as usize];
    if l.kind == LayerKind::Residual {
        return out;
    }
    for &who in own.owner.values() {
        out[who] += l.c * l.r * l.s;
    }
    out
}

/// Cycles for one chiplet: at each temporal step the distinct spatial
/// indices it touches are issued `pes` at a time.
pub fn chiplet_cycles(l: &LayerSpec, strategy: Strategy, own: &Ownership, chiplet: usize, pes: u64) -> u64 {
    if l.kind == LayerKind::Residual {
        // one add per output element
        let mut remaining = own.owner.values().filter(|&&c| c == chiplet).count() as u64;
        let mut cycles = 0;
        while remaining > 0 {
            remaining -= remaining.min(pes);
            cycles += 1;
        }
        return cycles;
    }
    let mut steps: HashMap<[u64; 5], HashSet<[u64; 2]>> = HashMap::new();
    for (&(n, k, y, x), &who) in &own.owner {
        if who != chiplet {
            continue;
        }
        for c in 0..l.c {
            for r in 0..l.r {
                for s in 0..l.s {
                    let (temporal, spatial) = match strategy {
                        Strategy::KpCp | Strategy::NpCp => ([n, y, x, r, s], [k, c]),
                        Strategy::YpXp => ([n, k, c, r, s], [y, x]),
                    };
                    steps.entry(temporal).or_default().insert(spatial);
                }
            }
        }
    }
    steps
        .values()
        .map(|spatial| {
            let mut left = spatial.len() as u64;
            let mut cycles = 0;
            while left > 0 {
                left -= left.min(pes);
                cycles += 1;
            }
            cycles
        })
        .sum()
}

/// Fill latency: smallest whole hop count not below the mean mesh distance.
pub fn fill_cycles(kind: NopKind, chiplets: u64) -> u64 {
    match kind {
        NopKind::Wireless => 1,
        NopKind::WiredMesh => {
            // ceil(sqrt(N) / 2) is the least h with 4h^2 >= N
            let mut h = 0;
            while 4 * h * h < chiplets {
                h += 1;
            }
            h
        }
    }
}

fn drain(mut bytes: u64, bandwidth: u64) -> u64 {
    let mut cycles = 0;
    while bytes > 0 {
        bytes -= bytes.min(bandwidth);
        cycles += 1;
    }
    cycles
}

pub struct OracleCost {
    pub distribution_cycles: u64,
    pub compute_cycles: u64,
    pub collection_cycles: u64,
    pub total_cycles: u64,
    pub multicast_factor: f64,
    pub unique_bytes: u64,
    pub expanded_bytes: u64,
    pub distribution_energy_pj: f64,
}

pub struct OracleFabric {
    pub kind: NopKind,
    pub bandwidth: u64,
    pub per_bit_pj: f64,
    pub rx_per_bit_pj: f64,
}

/// Event walk: inject cycle by cycle, then compute and collect side by side.
pub fn layer_walk(
    l: &LayerSpec,
    strategy: Strategy,
    chiplets: u64,
    pes: u64,
    dist: &OracleFabric,
    coll_bandwidth: u64,
) -> OracleCost {
    let own = ownership(l, strategy, chiplets);
    let recv = receive_sets(l, strategy, &own);
    let inject = match dist.kind {
        NopKind::Wireless => recv.unique_bytes(),
        NopKind::WiredMesh => recv.expanded_bytes(),
    };
    let distribution_end = drain(inject, dist.bandwidth) + fill_cycles(dist.kind, chiplets);

    let compute = (0..chiplets as usize)
        .map(|c| chiplet_cycles(l, strategy, &own, c, pes))
        .max()
        .unwrap_or(0);
    let output_bytes = own.owner.len() as u64 * l.bytes_per_element;
    let collection = drain(output_bytes, coll_bandwidth) + fill_cycles(NopKind::WiredMesh, chiplets);

    let mut clock = distribution_end;
    let mut compute_left = compute;
    let mut collect_left = collection;
    while compute_left > 0 || collect_left > 0 {
        compute_left = compute_left.saturating_sub(1);
        collect_left = collect_left.saturating_sub(1);
        clock += 1;
    }

    let hops = match dist.kind {
        NopKind::Wireless => 1.0,
        NopKind::WiredMesh => (chiplets as f64).sqrt() / 2.0,
    };
    let energy: f64 = recv
        .elements
        .iter()
        .map(|(_, r)| {
            let bits = (8 * recv.bytes_per_element) as f64;
            match dist.kind {
                NopKind::WiredMesh => bits * r.len() as f64 * dist.per_bit_pj * hops,
                NopKind::Wireless => {
                    bits * (dist.per_bit_pj - dist.rx_per_bit_pj + r.len() as f64 * dist.rx_per_bit_pj)
                }
            }
        })
        .sum();

    OracleCost {
        distribution_cycles: distribution_end,
        compute_cycles: compute,
        collection_cycles: collection,
        total_cycles: clock,
        multicast_factor: recv.multicast_factor(),
        unique_bytes: recv.unique_bytes(),
        expanded_bytes: recv.expanded_bytes(),
        distribution_energy_pj: energy,
    }
}
