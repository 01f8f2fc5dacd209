// SPDX-License-Identifier: Apache-2.0

//! Random layer generators for property tests.

use nop_explorer_core::{LayerKind, LayerSpec, Strategy as Split};
use proptest::prelude::*;

/// Turns raw dimensions into a valid layer of the given kind.
pub fn shape(kind: LayerKind, d: [u64; 7], stride: u64, padding: u64, b: u64) -> LayerSpec {
    let [n, k, c, y, x, r, s] = d;
    let l = match kind {
        LayerKind::Conv2D => LayerSpec::conv("g", n, k, c, y, x, r.min(y + 2 * padding), s.min(x + 2 * padding))
            .with_stride(stride)
            .with_padding(padding),
        LayerKind::UpConv => LayerSpec::upconv("g", n, k, c, y, x, r, s, stride),
        LayerKind::FullyConnected => LayerSpec::fully_connected("g", n, k, c),
        LayerKind::Residual => LayerSpec::residual("g", n, c, y, x),
    };
    LayerSpec {
        bytes_per_element: b,
        ..l
    }
}

pub fn kind() -> impl Strategy<Value = LayerKind> {
    prop::sample::select(LayerKind::ALL.to_vec())
}

pub fn split() -> impl Strategy<Value = Split> {
    prop::sample::select(Split::ALL.to_vec())
}

/// Layers with every dimension at most 8, small enough to enumerate.
pub fn small_layer() -> impl Strategy<Value = LayerSpec> {
    (kind(), prop::array::uniform7(1u64..=8), 1u64..=3, 0u64..=2, 1u64..=2)
        .prop_map(|(kind, d, stride, pad, b)| shape(kind, d, stride, pad, b))
}

/// Layer shapes in the range seen in image CNNs.
pub fn cnn_layer() -> impl Strategy<Value = LayerSpec> {
    let channels = prop::sample::select(vec![3u64, 16, 32, 64, 128, 256, 512, 1024]);
    let plane = prop::sample::select(vec![7u64, 14, 28, 56, 112, 224]);
    let filt = prop::sample::select(vec![1u64, 3, 5, 7]);
    (kind(), 1u64..=4, channels.clone(), channels, plane, filt, 1u64..=2).prop_map(|(kind, n, k, c, y, r, stride)| {
        let pad = r / 2;
        // classifiers read flattened feature maps; decoders upsample wide maps
        match kind {
            LayerKind::FullyConnected => shape(kind, [n, k, 64 * c, 1, 1, 1, 1], 1, 0, 1),
            LayerKind::UpConv => shape(kind, [n, k, c.max(64), y / 2 + 1, y / 2 + 1, 2, 2], 2, 0, 1),
            _ => shape(kind, [n, k, c, y, y, r, r], stride, pad, 1),
        }
    })
}

pub fn chiplets_small() -> impl Strategy<Value = u64> {
    1u64..=8
}

pub fn chiplets_pow2() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![1u64, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024])
}
