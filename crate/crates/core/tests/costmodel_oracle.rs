// SPDX-License-Identifier: Apache-2.0

mod support;

use nop_explorer_core::nop::default_presets;
use nop_explorer_core::partition::per_chiplet_assignment;
use nop_explorer_core::{
    adaptive_strategy, build_plan, compute_cycles, layer_cost, run_model, style_for, sweep, ChipletConfig, LayerSpec,
    NopKind, NopModel, RowScope, Strategy, StrategyChoice, SweepAxis, SystemConfig,
};
use proptest::prelude::*;
use support::gen;
use support::oracle::{self, OracleFabric};

fn fabric(m: &NopModel) -> OracleFabric {
    OracleFabric {
        kind: m.kind,
        bandwidth: m.injection_bandwidth(),
        per_bit_pj: m.per_bit_energy_pj,
        rx_per_bit_pj: m.rx_per_bit_energy_pj,
    }
}

fn system(chiplets: u64, pes: u64, wireless: bool, bw: u64) -> SystemConfig {
    let p = default_presets();
    if wireless {
        SystemConfig::new(
            chiplets,
            pes,
            p["wienna-C"].clone().with_bandwidth(bw),
            p["interposer-A"].clone(),
        )
        .unwrap()
    } else {
        SystemConfig::baseline(chiplets, pes, p["interposer-A"].clone().with_bandwidth(bw)).unwrap()
    }
}

fn check_against_walk(l: &LayerSpec, st: Strategy, sys: &SystemConfig) -> Result<(), TestCaseError> {
    let cost = layer_cost(l, st, sys).unwrap();
    let walk = oracle::layer_walk(
        l,
        st,
        sys.chiplets,
        sys.pes_per_chiplet,
        &fabric(&sys.distribution_nop),
        sys.collection_nop.injection_bandwidth(),
    );
    prop_assert_eq!(cost.multicast_factor, walk.multicast_factor);
    prop_assert_eq!(cost.distribution_bytes_unique, walk.unique_bytes);
    prop_assert_eq!(cost.distribution_bytes_expanded, walk.expanded_bytes);
    prop_assert_eq!(cost.distribution_cycles, walk.distribution_cycles);
    prop_assert_eq!(cost.compute_cycles, walk.compute_cycles);
    prop_assert_eq!(cost.collection_cycles, walk.collection_cycles);
    prop_assert_eq!(cost.total_cycles, walk.total_cycles);
    let e = walk.distribution_energy_pj;
    prop_assert!(
        (cost.distribution_energy_pj - e).abs() <= 1e-9 * e.max(1.0),
        "{} vs {}",
        cost.distribution_energy_pj,
        e
    );
    Ok(())
}

#[test]
fn tiny_layer_phase_walk() {
    let l = LayerSpec::conv("tiny", 1, 4, 2, 4, 4, 1, 1);
    let sys = system(4, 64, false, 8);
    let cost = layer_cost(&l, Strategy::KpCp, &sys).unwrap();
    // inputs 32 B to 4 chiplets, filters 8 B, outputs 64 B; one hop
    assert_eq!(cost.distribution_cycles, (4 * 32 + 8) / 8 + 1);
    assert_eq!(cost.compute_cycles, 16);
    assert_eq!(cost.collection_cycles, 64 / 8 + 1);
    assert_eq!(cost.total_cycles, 18 + 16);
    check_against_walk(&l, Strategy::KpCp, &sys).unwrap();
}

#[test]
fn adaptive_matches_enumeration_on_random_layers() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let sys = SystemConfig::default();
    for i in 0..50 {
        let kind = nop_explorer_core::LayerKind::ALL[rng.gen_range(0..4)];
        let d = [
            rng.gen_range(1..=4),
            rng.gen_range(1..=512),
            rng.gen_range(1..=512),
            rng.gen_range(1..=64),
            rng.gen_range(1..=64),
            rng.gen_range(1..=5),
            rng.gen_range(1..=5),
        ];
        let l = gen::shape(kind, d, rng.gen_range(1..=2), rng.gen_range(0..=2), 1);
        let costs: Vec<u64> = Strategy::ALL
            .iter()
            .map(|&st| layer_cost(&l, st, &sys).unwrap().total_cycles)
            .collect();
        let min = *costs.iter().min().unwrap();
        let first = Strategy::ALL[costs.iter().position(|&c| c == min).unwrap()];
        let (st, cost) = adaptive_strategy(&l, &sys).unwrap();
        assert_eq!(cost.total_cycles, min, "layer {i}: {l:?}");
        assert_eq!(st, first, "layer {i}");
    }
}

#[test]
fn peak_throughput_when_spatial_fits() {
    // 256 filters over 16 chiplets; each chiplet holds 16 x 4 = 64 spatial MACs
    let l = LayerSpec::conv("peak", 1, 256, 4, 32, 32, 1, 1);
    let sys = system(16, 64, true, 16);
    let plan = build_plan(&l, Strategy::KpCp, 16).unwrap();
    let cfg = ChipletConfig::new(64, style_for(Strategy::KpCp));
    for i in 0..16 {
        let share = per_chiplet_assignment(&plan, i).unwrap();
        assert_eq!(compute_cycles(&plan, &share, &cfg) * 16 * 64, plan.volumes.macs);
    }
    let cost = layer_cost(&l, Strategy::KpCp, &sys).unwrap();
    assert_eq!(cost.macs / cost.compute_cycles, 16 * 64);
}

#[test]
fn sweep_single_cell_equals_run_model() {
    let layers = vec![
        LayerSpec::conv("a", 1, 64, 32, 28, 28, 3, 3).with_padding(1),
        LayerSpec::residual("b", 1, 64, 28, 28),
        LayerSpec::fully_connected("c", 1, 10, 64),
    ];
    let sys = SystemConfig::default();
    for choice in StrategyChoice::ALL {
        let report = sweep(&layers, &sys, SweepAxis::DistributionBandwidth, &[16], &[choice]).unwrap();
        let e2e: Vec<_> = report.end_to_end().collect();
        assert_eq!(e2e.len(), 1);
        let run = run_model(&layers, choice, &sys).unwrap();
        assert_eq!(e2e[0].summary, run.summary);
        for (class, summary) in run.class_summaries() {
            let row = report.for_class(class).next().unwrap();
            assert_eq!(row.summary, summary);
            assert_eq!(row.scope, RowScope::Class(class));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn layer_cost_matches_phase_walk(
        l in gen::small_layer(),
        st in gen::split(),
        chiplets in gen::chiplets_small(),
        pes in prop::sample::select(vec![1u64, 2, 3, 4, 8, 16, 64]),
        wireless in any::<bool>(),
        bw in 1u64..=32,
    ) {
        check_against_walk(&l, st, &system(chiplets, pes, wireless, bw))?;
    }

    #[test]
    fn compute_respects_roofline_and_more_pes_help(
        l in gen::cnn_layer(),
        st in gen::split(),
        chiplets in gen::chiplets_pow2(),
        pes in prop::sample::select(vec![16u64, 32, 64, 128, 256]),
    ) {
        let plan = build_plan(&l, st, chiplets).unwrap();
        let small = ChipletConfig::new(pes, style_for(st));
        let big = ChipletConfig::new(2 * pes, style_for(st));
        for i in 0..plan.active_chiplets.min(8) {
            let share = per_chiplet_assignment(&plan, i).unwrap();
            let work = share.macs + share.elementwise_ops;
            let c = compute_cycles(&plan, &share, &small);
            prop_assert!(c >= work.div_ceil(pes));
            prop_assert!(compute_cycles(&plan, &share, &big) <= c);
        }
    }

    #[test]
    fn throughput_bounded_and_monotone_in_bandwidth(
        l in gen::cnn_layer(),
        st in gen::split(),
        chiplets in prop::sample::select(vec![16u64, 64, 256]),
        wireless in any::<bool>(),
    ) {
        let mut last = 0.0;
        for bw in [8u64, 16, 32, 64, 128, 256] {
            let sys = system(chiplets, 64, wireless, bw);
            let c = layer_cost(&l, st, &sys).unwrap();
            prop_assert!(c.macs_per_cycle <= sys.peak_macs_per_cycle() as f64);
            prop_assert!(c.macs_per_cycle >= last);
            prop_assert_eq!(c.total_cycles, c.distribution_cycles + c.compute_cycles.max(c.collection_cycles));
            last = c.macs_per_cycle;
        }
    }

    #[test]
    fn broadcast_never_slower_end_to_end(
        l in gen::cnn_layer(),
        st in gen::split(),
        chiplets in gen::chiplets_pow2(),
        bw in prop::sample::select(vec![8u64, 16, 32, 64]),
    ) {
        // the two systems differ only in the distribution fabric
        let baseline = system(chiplets, 64, false, bw);
        let mut broadcast = system(chiplets, 64, true, bw);
        broadcast.collection_nop = baseline.collection_nop.clone();
        let wired = layer_cost(&l, st, &baseline).unwrap();
        let wireless = layer_cost(&l, st, &broadcast).unwrap();
        prop_assert!(wireless.total_cycles <= wired.total_cycles);
        prop_assert_eq!(wireless.distribution_bytes_expanded, wired.distribution_bytes_expanded);
    }

    #[test]
    fn adaptive_is_sum_of_minima(
        layers in prop::collection::vec(gen::cnn_layer(), 1..6),
        chiplets in prop::sample::select(vec![32u64, 64, 128, 256]),
    ) {
        let sys = SystemConfig::default().with_chiplets(chiplets).unwrap();
        let adaptive = run_model(&layers, StrategyChoice::Adaptive, &sys).unwrap();
        let expect: u64 = layers
            .iter()
            .map(|l| Strategy::ALL.iter().map(|&st| layer_cost(l, st, &sys).unwrap().total_cycles).min().unwrap())
            .sum();
        prop_assert_eq!(adaptive.total_cycles(), expect);
        for st in Strategy::ALL {
            prop_assert!(adaptive.total_cycles() <= run_model(&layers, st.into(), &sys).unwrap().total_cycles());
        }
        let per_layer: u64 = adaptive.layers.iter().map(|c| c.total_cycles).sum();
        prop_assert_eq!(per_layer, adaptive.total_cycles());
    }
}

#[test]
fn wireless_kind_rejected_for_collection() {
    let p = default_presets();
    let err = SystemConfig::new(4, 64, p["wienna-C"].clone(), p["wienna-A"].clone()).unwrap_err();
    assert!(matches!(err, nop_explorer_core::ModelError::Kind(_)));
    assert_eq!(p["wienna-A"].kind, NopKind::Wireless);
}
